#include "tilewalsh/dyadic.hpp"

#include <stdexcept>
#include <string>

namespace tilewalsh {

bool interval_contains(const DyadicInterval& a, const DyadicInterval& b) {
  if (b.k < a.k) return false;
  return (b.pos >> (b.k - a.k)) == a.pos;
}

bool intervals_disjoint(const DyadicInterval& a, const DyadicInterval& b) {
  return !interval_contains(a, b) && !interval_contains(b, a);
}

bool frequency_contains(const FrequencyInterval& a, const FrequencyInterval& b) {
  if (b.k > a.k) return false;
  const int shift = a.k - b.k;
  if (shift >= 64) return a.index == 0;
  return (b.index >> shift) == a.index;
}

bool tile_le(const Tile& p, const Tile& p2) {
  return interval_contains(p2.time, p.time) && frequency_contains(p.frequency(), p2.frequency());
}

bool tiles_intersect(const Tile& a, const Tile& b) {
  const bool time = !intervals_disjoint(a.time, b.time);
  const bool freq = frequency_contains(a.frequency(), b.frequency()) ||
                    frequency_contains(b.frequency(), a.frequency());
  return time && freq;
}

bool bitile_le(const Bitile& a, const Bitile& b) {
  return interval_contains(b.time, a.time) && frequency_contains(a.frequency(), b.frequency());
}

bool bitile_le_d(const Bitile& a, const Bitile& b) { return tile_le(a.down(), b.down()); }

bool bitile_le_u(const Bitile& a, const Bitile& b) { return tile_le(a.up(), b.up()); }

BitileUniverse::BitileUniverse(int levels) : levels_(levels) {
  if (levels < 1 || levels > kMaxLevels)
    throw std::invalid_argument("resolution L=" + std::to_string(levels) + " outside [1, " +
                                std::to_string(kMaxLevels) + "]");
  items_.reserve(static_cast<std::size_t>(levels) * pow2u(levels - 1) + pow2u(levels));
  for (int k = 0; k <= levels; ++k) {
    const std::uint64_t mcount = frequencies_at(k);
    for (std::uint64_t pos = 0; pos < pow2u(k); ++pos)
      for (std::uint64_t m = 0; m < mcount; ++m) items_.push_back({{k, pos}, m});
  }
}

// (2m+1)·2^k <= 2^L: for k < L this is m < 2^{L-k-1}; at k = L only m = 0.
std::uint64_t BitileUniverse::frequencies_at(int k) const {
  if (k < 0 || k > levels_) return 0;
  return k < levels_ ? pow2u(levels_ - k - 1) : 1;
}

std::optional<std::size_t> BitileUniverse::index_of(const Bitile& b) const {
  const int k = b.time.k;
  if (k < 0 || k > levels_ || b.time.pos >= pow2u(k) || b.m >= frequencies_at(k)) return std::nullopt;
  const std::uint64_t per_scale = pow2u(levels_ - 1);
  const std::uint64_t base = static_cast<std::uint64_t>(k) * per_scale;
  return static_cast<std::size_t>(base + b.time.pos * frequencies_at(k) + b.m);
}

BitileUniverse bitile_universe(int levels) { return BitileUniverse(levels); }

}  // namespace tilewalsh
