#include <doctest.h>

#include <cmath>
#include <limits>

#include "../common/oracles.hpp"
#include "tilewalsh/operators.hpp"
#include "tilewalsh/random.hpp"

using namespace tilewalsh;

namespace {
Signal scalar(int L, std::vector<Rational> v) { return Signal::scalar(L, v); }
Rational mean(const Signal& f) {
  Rational s = 0;
  for (const auto& v : f.values()) s += v;
  return s / static_cast<long>(f.cells());
}
}  // namespace

TEST_CASE("partial sum examples") {
  SplitMix64 rng(1);
  const Signal f = random_signal(rng, 3, 1, ValueKind::Vector);
  CHECK(partial_sum(f, 8) == f);
  CHECK(partial_sum(f, 0).is_zero());
  const Signal m = partial_sum(f, 1);
  for (const auto& v : m.values()) CHECK(v == mean(f));
  CHECK_THROWS_AS(partial_sum(f, 9), std::invalid_argument);
}

TEST_CASE("carleson direct examples") {
  SplitMix64 rng(2);
  const Signal f = random_signal(rng, 3, 2, ValueKind::Vector);
  CHECK(carleson_direct(f, FrequencyChoice::constant(3, 8)) == f);
  CHECK(carleson_direct(f, FrequencyChoice::constant(3, 0)).is_zero());
  const Rational a(3, 5), b(-7, 2);
  const Signal g = scalar(1, {a, b});
  const Signal c = carleson_direct(g, FrequencyChoice(1, {1, 2}));
  CHECK(c.at(0, 0) == (a + b) / 2);
  CHECK(c.at(1, 0) == b);
}

TEST_CASE("carleson bitile examples and oracle") {
  const BitileUniverse u(3);
  const Signal c = scalar(3, std::vector<Rational>(8, Rational(5, 4)));
  SplitMix64 rng(3);
  FrequencyChoice N = random_frequency_choice(rng, 3);
  std::vector<std::uint64_t> pos(N.values());
  for (auto& v : pos) v = std::max<std::uint64_t>(v, 1);
  CHECK(carleson_bitile(c, FrequencyChoice(3, pos), u) == c);
  const Signal f = random_signal(rng, 3, 1, ValueKind::Vector);
  CHECK(carleson_bitile(f, FrequencyChoice::constant(3, 0), u).is_zero());
  for (int L = 1; L <= 6; ++L) {
    const BitileUniverse uu(L);
    for (int i = 0; i < 10; ++i) {
      const Signal g = random_signal(rng, L, 2, ValueKind::Vector);
      const FrequencyChoice M = random_frequency_choice(rng, L);
      CHECK(carleson_bitile(g, M, uu) == carleson_direct(g, M));
    }
  }
  CHECK_THROWS_AS(carleson_direct(f, FrequencyChoice::constant(2, 0)), std::invalid_argument);
}

TEST_CASE("universe truncation is sound") {
  // bitiles with ω ⊆ [0, 2^{L+2}) outside the universe add nothing
  SplitMix64 rng(4);
  for (int L = 1; L <= 3; ++L) {
    const BitileUniverse u(L);
    for (int i = 0; i < 10; ++i) {
      const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
      const FrequencyChoice N = random_frequency_choice(rng, L);
      const auto fv = f.values();
      std::vector<Rational> extra(f.cells(), 0);
      for (int k = 0; k <= L; ++k)
        for (std::uint64_t p = 0; p < (1u << k); ++p)
          for (std::uint64_t m = 0; ((2 * m + 2) << k) <= (1u << (L + 2)); ++m) {
            if (u.contains({{k, p}, m})) continue;
            const Rational a = oracle::linf_coefficient(fv, L, k, p, 2 * m);
            for (std::uint64_t x = 0; x < f.cells(); ++x)
              if ((N[x] >> k) == 2 * m + 1) extra[x] += a * oracle::packet(k, p, 2 * m, x, L);
          }
      for (const auto& e : extra) CHECK(e == 0);
    }
  }
}

TEST_CASE("operators are linear") {
  SplitMix64 rng(5);
  const BitileUniverse u(4);
  for (int i = 0; i < 5; ++i) {
    const Signal f = random_signal(rng, 4, 1, ValueKind::Vector);
    const Signal g = random_signal(rng, 4, 1, ValueKind::Vector);
    const FrequencyChoice N = random_frequency_choice(rng, 4);
    const Rational s(3, 7);
    CHECK(carleson_bitile(f + g * s, N, u) == carleson_bitile(f, N, u) + carleson_bitile(g, N, u) * s);
    CHECK(martingale_transform(f + g * s, IntervalSigns(-1)) ==
          martingale_transform(f, IntervalSigns(-1)) + martingale_transform(g, IntervalSigns(-1)) * s);
  }
}

TEST_CASE("maximal partial sum examples") {
  const Signal c = Signal::from_values(2, 2, ValueKind::Vector, std::vector<Rational>{3, 4, 3, 4, 3, 4, 3, 4});
  for (double v : maximal_partial_sum(c, NormPlugin::euclidean())) CHECK(v == doctest::Approx(5.0));
  const auto s = maximal_partial_sum(scalar(1, {1, -1}), NormPlugin::euclidean());
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.0));
  SplitMix64 rng(6);
  const Signal f = random_signal(rng, 4, 1, ValueKind::Vector);
  const auto sf = maximal_partial_sum(f, NormPlugin::euclidean());
  for (std::size_t x = 0; x < f.cells(); ++x) CHECK(sf[x] >= std::abs(f.at(x, 0).get_d()) - 1e-15);
}

TEST_CASE("martingale transform examples") {
  SplitMix64 rng(7);
  const Signal f = random_signal(rng, 3, 1, ValueKind::Vector);
  Signal centered = f;
  const Rational avg = mean(f);
  std::vector<Rational> av(f.cells(), avg);
  centered = f - scalar(3, av);
  CHECK(martingale_transform(f, IntervalSigns(1)) == centered);
  CHECK(martingale_transform(f, IntervalSigns(-1)) == centered * Rational(-1));
  const Signal g = scalar(1, {3, 1});
  const std::vector<DyadicInterval> fam{{0, 0}};
  CHECK(martingale_transform(g, IntervalSigns(1), fam) == scalar(1, {1, -1}));
  CHECK(martingale_transform(g, IntervalSigns(-1), fam) == scalar(1, {-1, 1}));
  IntervalSigns partial;
  CHECK_THROWS_AS(martingale_transform(g, partial), std::invalid_argument);
}

TEST_CASE("martingale transforms are isometric for the Euclidean norm") {
  SplitMix64 rng(8);
  for (int i = 0; i < 5; ++i) {
    const Signal f = random_signal(rng, 4, 2, ValueKind::Vector);
    const auto base = lq_norm(martingale_transform(f, IntervalSigns(1)), 2.0, NormPlugin::euclidean());
    IntervalSigns signs;
    for (int k = 0; k < 4; ++k)
      for (std::uint64_t p = 0; p < (1u << k); ++p) signs.set({k, p}, rng.coin() ? 1 : -1);
    const auto other = lq_norm(martingale_transform(f, signs), 2.0, NormPlugin::euclidean());
    REQUIRE(base.power);
    REQUIRE(other.power);
    CHECK(*base.power == *other.power);
  }
}

TEST_CASE("stopped haar sums") {
  const Signal f = scalar(2, {1, 1, 0, 0});
  const auto big = stopped_haar_sum(f, 10.0, {0, 0}, NormPlugin::euclidean(), 2.0);
  CHECK(big.sum == martingale_transform(f, IntervalSigns(1)));
  CHECK(std::isfinite(big.ratio));
  const auto none = stopped_haar_sum(f, 0.1, {0, 0}, NormPlugin::euclidean(), 2.0);
  CHECK(none.family.empty());
  CHECK(none.lp_norm == 0.0);
  // Mf = (1, 1, 1/2, 1/2): intervals inside [0,1/2) have inf Mf = 1 > 3/4
  const auto mid = stopped_haar_sum(f, 0.75, {0, 0}, NormPlugin::euclidean(), 2.0);
  const std::vector<DyadicInterval> expect{{0, 0}, {1, 1}};
  CHECK(mid.family == expect);
  CHECK(mid.sum == scalar(2, {Rational(1, 2), Rational(1, 2), Rational(-1, 2), Rational(-1, 2)}));
}

TEST_CASE("martingale transform BMO constants are stable across L") {
  const NormPlugin plugin = NormPlugin::euclidean();
  std::vector<double> worst;
  for (int L = 4; L <= 8; ++L) {
    double w = 0;
    for (int i = 0; i < 20; ++i) {
      SplitMix64 rng(900 + 100 * static_cast<std::uint64_t>(L) + static_cast<std::uint64_t>(i));
      const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
      IntervalSigns signs;
      for (int k = 0; k < L; ++k)
        for (std::uint64_t p = 0; p < (1u << k); ++p) signs.set({k, p}, rng.coin() ? 1 : -1);
      const double sup = lq_norm(f, std::numeric_limits<double>::infinity(), plugin).value;
      w = std::max(w, bmo_norm(martingale_transform(f, signs), plugin) / sup);
    }
    worst.push_back(w);
  }
  for (std::size_t i = 1; i < worst.size(); ++i) CHECK(std::abs(worst[i] / worst[i - 1] - 1.0) <= 0.2);
}
