#pragma once

// Trees, the tree-identity sign ε_PT, density and size functionals, Δ(T),
// and the tree-lemma sum with its per-interval diagnostics.

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "tilewalsh/certificate.hpp"
#include "tilewalsh/dyadic.hpp"
#include "tilewalsh/signal.hpp"
#include "tilewalsh/walsh.hpp"

namespace tilewalsh {

struct BitileHash {
  std::size_t operator()(const Bitile& b) const noexcept {
    std::uint64_t h = b.time.pos * 0x9E3779B97F4A7C15ULL ^ (b.m + 0x632BE59BD9B4E019ULL) * 0xBF58476D1CE4E5B9ULL;
    h ^= static_cast<std::uint64_t>(b.time.k) * 0x94D049BB133111EBULL;
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};
using BitileSet = std::unordered_set<Bitile, BitileHash>;

/// A top bitile and members below it, members kept in canonical order.
struct Tree {
  Bitile top;
  std::vector<Bitile> members;

  /// Every member satisfies P <= top.
  bool valid() const;
  /// {P : P <=_u top}, the up-tree supported by the same top.
  std::vector<Bitile> up_part() const;
  /// {P : P <=_d top} and its complement, the tree-lemma split.
  std::vector<Bitile> lemma_down() const;
  std::vector<Bitile> lemma_up() const;
};

using TreeFamily = std::vector<Tree>;

/// Bitiles P' with I_{P'} ⊆ [0,1) and P <=_u P', canonical order.
std::vector<Bitile> up_ancestors(const Bitile& P);
/// Positions of the complete tree under T down to scale L: every (k, pos, m_T >> (k-k_T)).
std::vector<Bitile> tree_slots(const Bitile& top, int L);

/// Π_{i<k} r_i(x/|I_T|)^{n_i} with n_T = 2m_T+1, k = k_P - k_T, evaluated on cell
/// `cell` of a 2^R grid (R >= k_P, cell inside I_P). No order check.
int epsilon_digit_product(int k_P, const Bitile& T, int R, std::uint64_t cell);
/// ε_PT at the left endpoint of I_P. Throws std::invalid_argument unless P <=_u T.
int epsilon_pt(const Bitile& P, const Bitile& T);

/// Pointwise check of w_{P_d} = ε_PT w^∞_{T_u} h_{I_P} (and constancy of ε on I_P) on the
/// 2^{L+1} grid, fine enough for every top in universe(L). Throws unless P <=_u T and both fit.
bool verify_tree_identity(const Bitile& P, const Bitile& T, int L);

/// Cell counts of I_{P'} ∩ E_{P'} for every bitile P' with I_{P'} ⊆ [0,1), |I_{P'}| >= 2^{-L}.
/// Fractions are handled as masses count·2^{k'} over 2^L.
class DensityField {
 public:
  DensityField(const LevelSet& E, const FrequencyChoice& nfun);

  int levels() const { return levels_; }
  const LevelSet& set() const { return E_; }
  const FrequencyChoice& nfun() const { return N_; }

  /// |I_P ∩ E_P| in cells (k_P <= L).
  std::uint64_t count(const Bitile& P) const;
  /// |I_P ∩ E_P| / |I_P| as a numerator over 2^L.
  std::uint64_t mass(const Bitile& P) const { return count(P) << P.time.k; }
  Rational fraction(const Bitile& P) const;

  /// sup_{P' >= P} mass(P'), as a numerator over 2^L.
  std::uint64_t sup_mass(const Bitile& P) const;
  /// The coarsest (then smallest m) P' >= P with mass(P') > dmass·2^{-q}.
  std::optional<Bitile> witness_above(const Bitile& P, std::uint64_t dmass, double q) const;

  /// x ∈ E with N(x) ∈ ω of the tile.
  bool in_tile_set(std::uint64_t cell, const Tile& tile) const;
  /// |I ∩ E_{P_u}| in cells.
  std::uint64_t up_count(const Bitile& P) const;

 private:
  struct Entry {
    std::uint64_t pos;
    std::uint64_t m;
    std::uint64_t count;
  };
  int levels_;
  LevelSet E_;
  FrequencyChoice N_;
  std::vector<std::vector<Entry>> scales_;
};

/// mass > dmass·2^{-q}, exact for integer q.
bool mass_exceeds(std::uint64_t mass, std::uint64_t dmass, double q);

/// density(coll) as an exact rational.
Rational density(std::span<const Bitile> coll, const DensityField& field);
Rational density(std::span<const Bitile> coll, const LevelSet& E, const FrequencyChoice& nfun);

/// Δ(T)^q = |I_T|^{-1} ∫ ‖Σ_{P∈T_u} ⟨f,w_{P_d}⟩ w_{P_d}‖^q.
LqValue tree_delta(const Tree& tree, const PacketTable& table, double q, const NormPlugin& plugin);

/// Σ_P ⟨f,w_{P_d}⟩ w_{P_d} on the 2^L grid as numerators over table.denominator().
std::vector<Integer> packet_sum(std::span<const Bitile> members, const PacketTable& table);

/// Size over complete up-trees of candidate tops, with dirty-top caching for greedy removal.
class SizeEngine {
 public:
  SizeEngine(const PacketTable& table, std::span<const Bitile> coll, double q, const NormPlugin& plugin);

  bool exact() const { return exact_; }
  double q() const { return q_; }
  const PacketTable& table() const { return table_; }
  bool alive(const Bitile& P) const { return alive_.count(P) != 0; }
  std::size_t alive_count() const { return alive_.size(); }

  /// Alive members of the complete up-tree under `top`.
  std::vector<Bitile> up_tree(const Bitile& top) const;
  /// Alive members P <= top.
  std::vector<Bitile> full_tree(const Bitile& top) const;
  LqValue delta(const Bitile& top) const;

  /// Current candidate tops (u-ancestors of alive bitiles), canonical order.
  std::vector<Bitile> tops() const;
  /// Cached Δ per candidate top, refreshed lazily.
  const LqValue& cached_delta(const Bitile& top);

  struct SizeResult {
    LqValue value;
    std::optional<Tree> witness;
  };
  SizeResult size();

  void remove(std::span<const Bitile> bitiles);
  /// Recomputes every dirty Δ (in parallel over tops).
  void refresh();

 private:

  const PacketTable& table_;
  double q_;
  NormPlugin plugin_;
  bool exact_;
  BitileSet alive_;
  std::vector<Bitile> tops_;
  std::vector<LqValue> cache_;
  std::vector<bool> dirty_;
  bool tops_stale_ = true;
};

/// size(coll): max Δ over the complete up-trees of `tops` (default: all u-ancestors of coll).
SizeEngine::SizeResult size(std::span<const Bitile> coll, const PacketTable& table, double q,
                            const NormPlugin& plugin, std::optional<std::span<const Bitile>> tops = std::nullopt);

/// The maximal dyadic J ⊆ ⋃ I_P that contain no I_P (may be one scale finer than the grid).
std::vector<DyadicInterval> stopping_intervals(std::span<const Bitile> members);

struct IntervalDiagnostics {
  DyadicInterval J;
  Rational measure;       // |J|
  Rational g_measure;     // |G_J|
  double f_down_l1 = 0;   // ‖F_dJ‖_{L¹(J)}
  double f_up_l1 = 0;     // ‖F_uJ‖_{L¹(J)}
  double down_bound = 0;  // size·|G_J|
  double up_bound = 0;    // 2|G_J| inf_J M f̃
};

struct TreeFormResult {
  Rational lhs;  // Σ_P |⟨f,w_{P_d}⟩⟨w_{P_d}, g 1_{E_{P_u}}⟩|
  Rational lhs_down;
  Rational lhs_up;
  LqValue size;
  Rational density;
  Rational top_measure;
  double ratio = 0;  // lhs / (size·density·|I_T|)
  bool dual_bound_ok = true;
  std::vector<IntervalDiagnostics> intervals;
  std::vector<Certificate> certificates;
};

/// The tree-lemma form for one tree with its 𝒥 / G_J / F_dJ / F_uJ diagnostics.
TreeFormResult tree_form_sum(const Tree& tree, const PacketTable& f_table, const Signal& g, const DensityField& field,
                             double q, const NormPlugin& plugin);

/// |⟨f,w_{P_d}⟩⟨w_{P_d}, g 1_{E_{P_u}}⟩| for one bitile, exact.
Rational bitile_form_term(const Bitile& P, const PacketTable& f_table, const Signal& g, const DensityField& field);

/// |G_J| <= 2 density(T) |J| for each J in 𝒥.
std::vector<Certificate> gj_certificate(const Tree& tree, const DensityField& field);

/// |G_J| for every J in 𝒥, exact.
std::vector<std::pair<DyadicInterval, Rational>> g_sets(const Tree& tree, const DensityField& field);

}  // namespace tilewalsh
