#pragma once

// Seeded instance generators built on splitmix64, so every instance can be
// reproduced from its seed by any implementation of the documented recipe.

#include <cstdint>
#include <optional>
#include <vector>

#include "tilewalsh/dyadic.hpp"
#include "tilewalsh/signal.hpp"
#include "tilewalsh/timefreq.hpp"

namespace tilewalsh {

/// state += 0x9E3779B97F4A7C15, then the standard splitmix64 finalizer.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, n) by rejection of the low 2^64 mod n outputs. Requires n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  bool coin() { return (next() >> 63) != 0; }

 private:
  std::uint64_t state_;
};

/// Denominator of generated signal values.
inline constexpr std::int64_t kSampleScale = std::int64_t{1} << 16;

/// Every component is k/2^16 with k uniform in [-2^16, 2^16]; cells outside
/// `support` are zero.
Signal random_signal(SplitMix64& rng, int levels, int dim, ValueKind kind, const LevelSet* support = nullptr);

/// random_signal, then each cell is halved until its `plugin` norm is at most 1.
Signal random_unit_signal(SplitMix64& rng, int levels, int dim, ValueKind kind, const NormPlugin& plugin,
                          const LevelSet* support = nullptr);

/// ⌊μ·2^L⌋ cells chosen by a partial Fisher–Yates shuffle of 0..2^L-1.
LevelSet random_level_set(SplitMix64& rng, int levels, double mu);

/// N(x) uniform in [0, 2^L] per cell.
FrequencyChoice random_frequency_choice(SplitMix64& rng, int levels);

/// Each universe member kept with probability 1/2.
std::vector<Bitile> random_collection(SplitMix64& rng, const BitileUniverse& universe);

/// A uniform top from the universe and a nonempty random subset of its complete tree.
Tree random_tree(SplitMix64& rng, int levels);

/// Up to `trees` up-trees; members are proposed at random and rejected when their
/// down-tile meets the down-tile of an already accepted member.
TreeFamily random_up_tree_family(SplitMix64& rng, int levels, int trees);

}  // namespace tilewalsh
