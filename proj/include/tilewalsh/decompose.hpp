#pragma once

// Density and size decompositions, the leveled forest, the bilinear-form
// certificate, tile-type estimation and restricted weak-type experiments.

#include <optional>
#include <span>
#include <vector>

#include "tilewalsh/certificate.hpp"
#include "tilewalsh/dyadic.hpp"
#include "tilewalsh/signal.hpp"
#include "tilewalsh/timefreq.hpp"
#include "tilewalsh/walsh.hpp"

namespace tilewalsh {

struct DensityDecomposition {
  std::vector<Bitile> sparse;
  std::vector<Tree> trees;
  Rational density;  // density of the input collection
  std::vector<Certificate> certificates;
};

/// sparse = {P : sup_{P'>=P} fraction <= 2^{-q} density}; the rest is grouped under maximal witnesses.
DensityDecomposition density_decompose(std::span<const Bitile> coll, const DensityField& field, double q);

struct SizeDecomposition {
  std::vector<Bitile> small;
  std::vector<Tree> trees;               // complete trees {P <= T_j}, in extraction order
  std::vector<std::vector<Bitile>> up_parts;
  std::vector<LqValue> deltas;           // Δ(T_j) at extraction
  LqValue sigma;                         // threshold scale (size of the input unless overridden)
  LqValue small_size;                    // size(small)
  Rational top_mass;                     // Σ_j |I_{T_j}|
  double mass_constant = 0;              // Σ_j |I_{T_j}| σ^q / ‖f‖_q^q
  std::vector<Certificate> certificates;
};

/// Greedy minimal-center extraction of trees with Δ > σ/2. With `sigma` unset σ = size(coll).
SizeDecomposition size_decompose(std::span<const Bitile> coll, const PacketTable& table, const LqValue& f_norm,
                                 double q, const NormPlugin& plugin, std::optional<LqValue> sigma = std::nullopt);
SizeDecomposition size_decompose(std::span<const Bitile> coll, const Signal& f, double q, const NormPlugin& plugin);

struct ForestLevel {
  int n = 0;
  std::vector<Tree> trees;  // density trees first, then size trees
  std::size_t density_tree_count = 0;
  Rational top_mass;        // Σ_j |I_{T_{n,j}}|
  double mass_constant = 0; // Σ_j |I_{T_{n,j}}| · 2^{nq}
  std::vector<Certificate> certificates;
};

struct LeveledForest {
  std::vector<ForestLevel> levels;
  std::vector<Bitile> residual;  // zero-contribution bitiles left after exhaustion
  int n_start = 0;
  std::vector<Certificate> certificates;
};

/// Alternating density and size decompositions from the starting level down until
/// every remaining bitile has zero coefficient or zero density. Rejects |E| = 0 and f = 0.
LeveledForest full_decompose(std::span<const Bitile> coll, const PacketTable& table, const LqValue& f_norm,
                             const DensityField& field, double q, const NormPlugin& plugin);

struct CarlesonFormReport {
  LeveledForest forest;
  Rational form_total;  // Σ_P |⟨f,w_{P_d}⟩⟨w_{P_d}, g 1_{E_{P_u}}⟩|
  Rational pairing;     // ⟨Cf, g 1_E⟩
  std::vector<Rational> level_sums;
  double bound = 0;     // |E|^{1/q'} ‖f‖_q
  double ratio = 0;
  std::vector<double> tree_ratios;  // tree-lemma ratios, forest order
  double max_tree_ratio = 0;
  std::vector<Certificate> certificates;
};

CarlesonFormReport carleson_form_certificate(const Signal& f, const Signal& g, const LevelSet& E,
                                             const FrequencyChoice& nfun, double q, const NormPlugin& plugin);

struct TileTypeResult {
  double ratio = 0;  // (Σ_T ‖W_T f‖_q^q)^{1/q} / ‖f‖_q
  LqValue family_norm;
  LqValue f_norm;
  std::vector<Quantity> tree_norms;  // ‖W_T f‖_q^q per tree
  std::vector<Certificate> certificates;
};

/// Throws std::invalid_argument if a tree is not an up-tree or two distinct (P, T) pairs share down-tile area.
TileTypeResult tile_type_constant(const TreeFamily& family, const Signal& f, double q, const NormPlugin& plugin);

struct RestrictedWeakTypeReport {
  Rational e_measure;
  Rational f_measure;
  Rational e_tilde_measure;  // equals |E| when |E| <= |F|
  bool e_larger = false;
  LevelSet e_tilde;
  Rational pairing;    // ⟨Cf, g 1_Ẽ⟩
  Rational form_sum;   // Σ_P |⟨f,w_{P_d}⟩⟨w_{P_d}, g 1_{Ẽ_{P_u}}⟩|
  double log_bound = 0;
  double lorentz_bound = 0;
  double ratio = 0;          // |pairing| / log_bound
  double form_ratio = 0;     // form_sum / log_bound
  double lorentz_ratio = 0;  // |pairing| / lorentz_bound
  std::vector<Certificate> certificates;
};

/// The major subset Ẽ = E \ {M(1_F) > 2|F|/|E|} (Ẽ = E when |E| <= |F|).
LevelSet major_subset(const LevelSet& E, const LevelSet& F);

RestrictedWeakTypeReport restricted_weak_type(const LevelSet& F, const LevelSet& E, const Signal& f, const Signal& g,
                                              const FrequencyChoice& nfun, double p, const NormPlugin& plugin);

}  // namespace tilewalsh
