#pragma once

// Integer-indexed dyadic geometry of the phase plane: intervals in [0,1),
// tiles of area 1, bitiles of area 2, and their partial orders. No floating
// point is used anywhere in this module.

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "tilewalsh/numeric.hpp"

namespace tilewalsh {

/// Largest resolution exponent supported by the finite universes.
inline constexpr int kMaxLevels = 20;

/// [pos·2^-k, (pos+1)·2^-k)
struct DyadicInterval {
  int k = 0;
  std::uint64_t pos = 0;

  auto operator<=>(const DyadicInterval&) const = default;

  Rational left() const { return Rational(Integer(pos)) * pow2(-k); }
  Rational length() const { return pow2(-k); }
  bool in_unit() const { return k >= 0 && k < 63 && pos < pow2u(k); }
  DyadicInterval parent() const { return {k - 1, pos >> 1}; }
  DyadicInterval child(int bit) const { return {k + 1, 2 * pos + static_cast<std::uint64_t>(bit)}; }
  /// The ancestor at scale kk <= k.
  DyadicInterval ancestor(int kk) const { return {kk, pos >> (k - kk)}; }
  /// First and one-past-last grid cell covered at resolution L (requires k <= L).
  std::uint64_t first_cell(int L) const { return pos << (L - k); }
  std::uint64_t cell_count(int L) const { return pow2u(L - k); }
};

/// b ⊆ a.
bool interval_contains(const DyadicInterval& a, const DyadicInterval& b);
bool intervals_disjoint(const DyadicInterval& a, const DyadicInterval& b);

/// Frequency interval 2^k·[index, index+1).
struct FrequencyInterval {
  int k = 0;
  std::uint64_t index = 0;

  auto operator<=>(const FrequencyInterval&) const = default;

  /// Integer endpoints (valid while they fit in 64 bits).
  std::uint64_t lower() const { return index << k; }
  std::uint64_t upper() const { return (index + 1) << k; }
  bool contains_point(std::uint64_t x) const { return (x >> k) == index; }
};

bool frequency_contains(const FrequencyInterval& a, const FrequencyInterval& b);

/// I × |I|^{-1}[n, n+1).
struct Tile {
  DyadicInterval time;
  std::uint64_t n = 0;

  auto operator<=>(const Tile&) const = default;

  FrequencyInterval frequency() const { return {time.k, n}; }
};

bool tile_le(const Tile& p, const Tile& p2);
bool tiles_intersect(const Tile& a, const Tile& b);

/// I × |I|^{-1}[2m, 2m+2), split into the down-tile (2m) and up-tile (2m+1).
/// The defaulted ordering is the canonical (k, pos, m) order.
struct Bitile {
  DyadicInterval time;
  std::uint64_t m = 0;

  auto operator<=>(const Bitile&) const = default;

  Tile down() const { return {time, 2 * m}; }
  Tile up() const { return {time, 2 * m + 1}; }
  FrequencyInterval frequency() const { return {time.k + 1, m}; }
  /// Center of the frequency interval, (2m+1)·2^k.
  std::uint64_t center() const { return (2 * m + 1) << time.k; }
};

bool bitile_le(const Bitile& a, const Bitile& b);
bool bitile_le_d(const Bitile& a, const Bitile& b);
bool bitile_le_u(const Bitile& a, const Bitile& b);

/// All bitiles with I ⊆ [0,1), |I| >= 2^-L, and an up-tile frequency interval
/// meeting [0, 2^L] (the range of a grid frequency choice), in canonical order.
class BitileUniverse {
 public:
  explicit BitileUniverse(int levels);

  int levels() const { return levels_; }
  const std::vector<Bitile>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

  bool contains(const Bitile& b) const { return index_of(b).has_value(); }
  /// Position of b in items(), computed arithmetically.
  std::optional<std::size_t> index_of(const Bitile& b) const;
  /// Number of admissible m values at scale k.
  std::uint64_t frequencies_at(int k) const;

 private:
  int levels_;
  std::vector<Bitile> items_;
};

/// Throws std::invalid_argument unless 1 <= L <= kMaxLevels.
BitileUniverse bitile_universe(int levels);

}  // namespace tilewalsh
