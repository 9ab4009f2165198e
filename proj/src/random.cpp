#include "tilewalsh/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tilewalsh {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("empty sampling range");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

std::int64_t SplitMix64::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

Signal random_signal(SplitMix64& rng, int levels, int dim, ValueKind kind, const LevelSet* support) {
  Signal shape(levels, dim, kind);
  const auto comp = static_cast<std::size_t>(shape.components());
  std::vector<Integer> num(comp << levels);
  for (std::size_t x = 0; x < shape.cells(); ++x)
    for (std::size_t c = 0; c < comp; ++c) {
      const std::int64_t k = rng.between(-kSampleScale, kSampleScale);
      num[x * comp + c] = (support && !support->contains(x)) ? 0 : static_cast<long>(k);
    }
  return Signal::from_numerators(levels, dim, kind, std::move(num), Integer(kSampleScale));
}

Signal random_unit_signal(SplitMix64& rng, int levels, int dim, ValueKind kind, const NormPlugin& plugin,
                          const LevelSet* support) {
  const Signal raw = random_signal(rng, levels, dim, kind, support);
  const auto comp = static_cast<std::size_t>(raw.components());
  // one common denominator 2^(16+e_max), per-cell shift e
  std::vector<int> shift(raw.cells(), 0);
  int max_shift = 0;
  for (std::size_t x = 0; x < raw.cells(); ++x) {
    const auto v = raw.numerators_at(x);
    Integer den = raw.denominator();
    while (value_norm(v, den, raw.dim(), raw.kind(), plugin) > 1.0) {
      den *= 2;
      ++shift[x];
    }
    max_shift = std::max(max_shift, shift[x]);
  }
  std::vector<Integer> num(raw.numerators());
  for (std::size_t x = 0; x < raw.cells(); ++x)
    for (std::size_t c = 0; c < comp; ++c) num[x * comp + c] <<= static_cast<mp_bitcnt_t>(max_shift - shift[x]);
  Integer den = raw.denominator();
  den <<= static_cast<mp_bitcnt_t>(max_shift);
  Signal out = Signal::from_numerators(levels, dim, raw.kind(), std::move(num), den);
  out.reduce();
  return out;
}

LevelSet random_level_set(SplitMix64& rng, int levels, double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("set measure must lie in [0, 1]");
  const std::uint64_t n = pow2u(levels);
  const auto count = static_cast<std::uint64_t>(std::floor(mu * static_cast<double>(n)));
  std::vector<std::uint64_t> cells(n);
  std::iota(cells.begin(), cells.end(), std::uint64_t{0});
  for (std::uint64_t i = 0; i < count; ++i) std::swap(cells[i], cells[i + rng.below(n - i)]);
  cells.resize(count);
  std::sort(cells.begin(), cells.end());
  return LevelSet(levels, cells);
}

FrequencyChoice random_frequency_choice(SplitMix64& rng, int levels) {
  std::vector<std::uint64_t> values(pow2u(levels));
  for (auto& v : values) v = rng.below(pow2u(levels) + 1);
  return FrequencyChoice(levels, std::move(values));
}

std::vector<Bitile> random_collection(SplitMix64& rng, const BitileUniverse& universe) {
  std::vector<Bitile> out;
  for (const auto& P : universe.items())
    if (rng.coin()) out.push_back(P);
  return out;
}

Tree random_tree(SplitMix64& rng, int levels) {
  const BitileUniverse universe(levels);
  const Bitile top = universe.items()[rng.below(universe.size())];
  const auto slots = tree_slots(top, levels);
  Tree t{top, {}};
  for (const auto& P : slots)
    if (rng.coin()) t.members.push_back(P);
  if (t.members.empty()) t.members.push_back(slots[rng.below(slots.size())]);
  std::sort(t.members.begin(), t.members.end());
  return t;
}

TreeFamily random_up_tree_family(SplitMix64& rng, int levels, int trees) {
  const BitileUniverse universe(levels);
  TreeFamily family;
  std::vector<Tile> taken;
  auto free_tile = [&](const Tile& d) {
    return std::none_of(taken.begin(), taken.end(), [&](const Tile& t) { return tiles_intersect(t, d); });
  };
  for (int t = 0; t < trees; ++t) {
    const Bitile top = universe.items()[rng.below(universe.size())];
    Tree tree{top, {}};
    for (const auto& P : tree_slots(top, levels)) {
      if (!bitile_le_u(P, top) || !rng.coin()) continue;
      if (!free_tile(P.down())) continue;
      taken.push_back(P.down());
      tree.members.push_back(P);
    }
    if (tree.members.empty()) continue;
    std::sort(tree.members.begin(), tree.members.end());
    family.push_back(std::move(tree));
  }
  return family;
}

}  // namespace tilewalsh
