#include <doctest.h>

#include <cmath>
#include <limits>

#include "../common/oracles.hpp"
#include "tilewalsh/random.hpp"
#include "tilewalsh/signal.hpp"

using namespace tilewalsh;

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("7") == 7);
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("1.5e-3") == Rational(3, 2000));
  CHECK(format_rational(Rational(6, 8)) == "3/4");
  CHECK(format_rational(Rational(-4, 2)) == "-2");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
}

TEST_CASE("value norm examples") {
  const std::vector<Rational> v{3, 4};
  CHECK(value_norm(v, 2, ValueKind::Vector, NormPlugin::euclidean()) == doctest::Approx(5.0));
  const std::vector<Rational> id{1, 0, 0, 1};
  CHECK(value_norm(id, 2, ValueKind::Matrix, NormPlugin::schatten(2)) == doctest::Approx(std::sqrt(2.0)));
  const std::vector<Rational> ones{1, 1};
  CHECK(value_norm(ones, 2, ValueKind::Vector, NormPlugin::lp(1.5)) == doctest::Approx(std::pow(2.0, 2.0 / 3.0)));
  CHECK_THROWS_AS(value_norm(ones, 3, ValueKind::Vector, NormPlugin::euclidean()), std::invalid_argument);
}

TEST_CASE("norm plugin parsing and duals") {
  CHECK(NormPlugin::parse("euclidean").name() == "euclidean");
  CHECK(NormPlugin::parse("lp:4").name() == "lp:4");
  CHECK(NormPlugin::parse("lp:4").dual().p == doctest::Approx(4.0 / 3.0));
  CHECK(NormPlugin::parse("schatten:3").family == NormPlugin::Family::Schatten);
  CHECK_THROWS_AS(NormPlugin::parse("lp:x"), std::invalid_argument);
  CHECK_THROWS_AS(NormPlugin::parse("sup"), std::invalid_argument);
}

TEST_CASE("Holder at each point for dual pairs") {
  SplitMix64 rng(5);
  for (const char* desc : {"euclidean", "lp:3", "lp:1.5", "schatten:4", "schatten:1.5"}) {
    const NormPlugin plugin = NormPlugin::parse(desc);
    const auto kind = plugin.family == NormPlugin::Family::Schatten ? ValueKind::Matrix : ValueKind::Vector;
    const Signal f = random_signal(rng, 3, 3, kind);
    const Signal g = random_signal(rng, 3, 3, kind);
    for (std::size_t x = 0; x < f.cells(); ++x) {
      const auto a = f.value(x);
      const auto b = g.value(x);
      Rational dot = 0;
      for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
      const double bound = value_norm(a, 3, kind, plugin) * value_norm(b, 3, kind, plugin.dual());
      CHECK(std::abs(dot.get_d()) <= bound * (1 + 1e-9));
    }
  }
}

TEST_CASE("schatten 2 is the Frobenius norm") {
  SplitMix64 rng(9);
  const Signal m = random_signal(rng, 2, 3, ValueKind::Matrix);
  for (std::size_t x = 0; x < m.cells(); ++x) {
    const auto v = m.value(x);
    double fro = 0;
    for (const auto& e : v) fro += e.get_d() * e.get_d();
    CHECK(value_norm(v, 3, ValueKind::Matrix, NormPlugin::schatten(2)) == doctest::Approx(std::sqrt(fro)).epsilon(1e-12));
  }
}

TEST_CASE("lq norm examples") {
  const std::vector<Rational> vals{Rational(3), Rational(4), Rational(3), Rational(4)};
  const Signal c = Signal::from_values(1, 2, ValueKind::Vector, vals);
  CHECK(lq_norm(c, 3.0, NormPlugin::euclidean()).value == doctest::Approx(5.0));
  const Signal s = Signal::scalar(1, std::vector<Rational>{1, -1});
  const auto n2 = lq_norm(s, 2.0, NormPlugin::euclidean());
  REQUIRE(n2.power);
  CHECK(*n2.power == 1);
  CHECK(n2.value == doctest::Approx(1.0));
  const Signal last = Signal::scalar(2, std::vector<Rational>{0, 0, 0, Rational(-7, 2)});
  CHECK(lq_norm(last, std::numeric_limits<double>::infinity(), NormPlugin::euclidean()).value == doctest::Approx(3.5));
}

TEST_CASE("maximal function examples") {
  const Signal c = Signal::scalar(2, std::vector<Rational>(4, Rational(-2)));
  for (double v : maximal_function(c, NormPlugin::euclidean())) CHECK(v == doctest::Approx(2.0));
  const Signal ind = Signal::scalar(1, std::vector<Rational>{1, 0});
  const auto m = maximal_function(ind, NormPlugin::euclidean());
  CHECK(m[0] == doctest::Approx(1.0));
  CHECK(m[1] == doctest::Approx(0.5));
  SplitMix64 rng(3);
  for (int L = 1; L <= 6; ++L) {
    const LevelSet F = random_level_set(rng, L, 0.3);
    const auto exact = dyadic_maximal<Rational>(F.indicator(), L);
    std::vector<bool> bits(F.cells());
    for (std::size_t x = 0; x < F.cells(); ++x) bits[x] = F.contains(x);
    const auto expect = oracle::maximal_indicator(bits, L);
    for (std::size_t x = 0; x < F.cells(); ++x) {
      CHECK(exact[x] == expect[x]);
      CHECK(exact[x] >= F.measure());
    }
  }
}

TEST_CASE("bmo examples") {
  CHECK(bmo_norm(Signal::scalar(2, std::vector<Rational>(4, Rational(5))), NormPlugin::euclidean()) == 0.0);
  CHECK(bmo_norm(Signal::scalar(1, std::vector<Rational>{1, -1}), NormPlugin::euclidean()) == doctest::Approx(1.0));
  SplitMix64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const Signal f = random_signal(rng, 4, 2, ValueKind::Vector);
    const auto sup = lq_norm(f, std::numeric_limits<double>::infinity(), NormPlugin::euclidean()).value;
    CHECK(bmo_norm(f, NormPlugin::euclidean()) <= 2 * sup + 1e-12);
  }
}

TEST_CASE("level sets and frequency choices") {
  const std::vector<std::uint64_t> cells{1, 3};
  const LevelSet s(2, cells);
  CHECK(s.measure() == Rational(1, 2));
  CHECK(s.members() == cells);
  CHECK_THROWS(LevelSet(2, std::vector<std::uint64_t>{4}));
  CHECK_THROWS_AS(FrequencyChoice(2, {0, 1, 2, 5}), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyChoice(2, {0, 1, 2}), std::invalid_argument);
  CHECK(FrequencyChoice::constant(2, 4).values() == std::vector<std::uint64_t>(4, 4));
}

TEST_CASE("signals keep exact values") {
  const Signal a = Signal::scalar(1, std::vector<Rational>{Rational(1, 3), Rational(1, 6)});
  const Signal b = Signal::scalar(1, std::vector<Rational>{Rational(2, 3), Rational(-1, 6)});
  const Signal s = a + b;
  CHECK(s.at(0, 0) == 1);
  CHECK(s.at(1, 0) == 0);
  CHECK((a * Rational(3)).at(0, 0) == 1);
  CHECK_THROWS_AS(a + Signal(2, 1), std::invalid_argument);
}
