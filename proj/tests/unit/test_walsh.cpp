#include <doctest.h>

#include "../common/oracles.hpp"
#include "tilewalsh/random.hpp"
#include "tilewalsh/walsh.hpp"

using namespace tilewalsh;

namespace {
SignPattern pattern(std::initializer_list<int> v) {
  SignPattern p;
  for (int x : v) p.push_back(static_cast<std::int8_t>(x));
  return p;
}
}  // namespace

TEST_CASE("rademacher examples") {
  CHECK(rademacher(0, 0, 1) == 1);
  CHECK(rademacher(0, 1, 1) == -1);
  CHECK(rademacher(1, 1, 2) == -1);
  for (int L = 1; L <= 8; ++L) CHECK(rademacher(0, 0, L) == 1);
}

TEST_CASE("walsh examples") {
  CHECK(walsh(0, 3) == SignPattern(8, 1));
  CHECK(walsh(1, 1) == pattern({1, -1}));
  CHECK(walsh(3, 2) == pattern({1, -1, -1, 1}));
  CHECK_THROWS_AS(walsh(4, 2), std::invalid_argument);
}

TEST_CASE("walsh matches the Rademacher product definition") {
  for (int L = 1; L <= 6; ++L)
    for (std::uint64_t n = 0; n < (1u << L); ++n) {
      const auto w = walsh(n, L);
      for (std::uint64_t x = 0; x < (1u << L); ++x) CHECK(w[x] == oracle::walsh(n, x, L));
    }
}

TEST_CASE("wave packet examples") {
  const auto w0 = wave_packet({{0, 0}, 0}, 2);
  CHECK(w0.pattern == SignPattern(4, 1));
  CHECK(w0.half_exp() == 0);
  const auto w1 = wave_packet({{1, 0}, 1}, 2);
  CHECK(w1.pattern == pattern({1, -1, 0, 0}));
  CHECK(w1.half_exp() == 1);
  const auto h = haar_packet({1, 1}, 2);
  CHECK(h.pattern == pattern({0, 0, 1, -1}));
  CHECK(h.half_exp() == 1);
  CHECK_THROWS_AS(wave_packet({{1, 0}, 2}, 2), std::invalid_argument);
  CHECK_THROWS_AS(wave_packet({{3, 0}, 0}, 2), std::invalid_argument);
}

TEST_CASE("haar packets are the n = 1 wave packets") {
  for (int L = 1; L <= 6; ++L)
    for (int k = 0; k < L; ++k)
      for (std::uint64_t pos = 0; pos < (1u << k); ++pos) {
        const auto h = haar_packet({k, pos}, L, PacketNorm::Linf);
        for (std::uint64_t x = 0; x < (1u << L); ++x) {
          const bool in = (x >> (L - k)) == pos;
          const bool left = ((x >> (L - k - 1)) & 1) == 0;
          CHECK(h.pattern[x] == (in ? (left ? 1 : -1) : 0));
        }
      }
}

TEST_CASE("fwht examples") {
  const std::vector<Rational> c(8, Rational(3, 7));
  const auto co = fwht(c);
  CHECK(co[0] == Rational(3, 7));
  for (std::size_t i = 1; i < 8; ++i) CHECK(co[i] == 0);
  const Rational a(5, 3), b(-1, 2);
  const auto pair = fwht(std::vector<Rational>{a, b});
  CHECK(pair[0] == (a + b) / 2);
  CHECK(pair[1] == (a - b) / 2);
  CHECK_THROWS_AS(fwht(std::vector<Rational>(3, Rational(1))), std::invalid_argument);
}

TEST_CASE("fwht round trip and vector values") {
  for (int L = 1; L <= 7; ++L) {
    SplitMix64 rng(100 + static_cast<std::uint64_t>(L));
    const Signal f = random_signal(rng, L, 3, ValueKind::Vector);
    CHECK(inverse_fwht(fwht(f)) == f);
    const Signal m = random_signal(rng, L, 2, ValueKind::Matrix);
    CHECK(inverse_fwht(fwht(m)) == m);
  }
}

TEST_CASE("walsh functions are orthonormal") {
  for (int L = 1; L <= 6; ++L) {
    const std::size_t n = std::size_t{1} << L;
    for (std::uint64_t a = 0; a < n; ++a) {
      const auto wa = walsh(a, L);
      for (std::uint64_t b = 0; b < n; ++b) {
        const auto wb = walsh(b, L);
        long dot = 0;
        for (std::size_t x = 0; x < n; ++x) dot += wa[x] * wb[x];
        CHECK(dot == (a == b ? static_cast<long>(n) : 0));
      }
    }
  }
}

TEST_CASE("pairing examples") {
  const Signal v = Signal::from_values(2, 2, ValueKind::Vector,
                                       std::vector<Rational>{1, 2, 1, 2, 1, 2, 1, 2});
  const auto p0 = pairing(v, {{0, 0}, 1}, PacketNorm::L2);
  CHECK(p0.value == std::vector<Rational>{0, 0});
  const std::vector<Rational> s{1, 2, 3, 4};
  const Signal f = Signal::scalar(2, s);
  const auto p = pairing(f, {{1, 0}, 1}, PacketNorm::Linf);
  CHECK(p.value.at(0) == Rational(-1, 4));
  CHECK(p.half_exp == 0);
  // ⟨pattern, w_P⟩ = 2^{1/2}·(1/2), so ⟨w_P, w_P⟩ = 2^{1/2}·⟨pattern, w_P⟩ = 1
  const auto wp = wave_packet({{1, 0}, 1}, 2);
  std::vector<Rational> vals;
  for (auto x : wp.pattern) vals.push_back(x);
  const auto self = pairing(Signal::scalar(2, vals), wp.tile, PacketNorm::L2);
  CHECK(self.value.at(0) == Rational(1, 2));
  CHECK(self.half_exp == 1);
}

TEST_CASE("packet table matches direct pairings") {
  for (int L = 1; L <= 5; ++L) {
    SplitMix64 rng(7 + static_cast<std::uint64_t>(L));
    const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
    const PacketTable table(f);
    const auto fv = f.values();
    for (int k = 0; k <= L; ++k)
      for (std::uint64_t pos = 0; pos < (1u << k); ++pos)
        for (std::uint64_t n = 0; n < (1u << (L - k)); ++n) {
          const Rational got = table.linf_value({{k, pos}, n}).at(0);
          CHECK(got == oracle::linf_coefficient(fv, L, k, pos, n));
        }
    // beyond resolution: zero
    CHECK(table.is_zero({{0, 0}, 1u << L}));
  }
}

TEST_CASE("packets of related tiles: orthogonality and brute-force inner products") {
  const int L = 4;
  std::vector<Tile> tiles;
  for (int k = 0; k <= L; ++k)
    for (std::uint64_t pos = 0; pos < (1u << k); ++pos)
      for (std::uint64_t n = 0; n < (1u << (L - k)); ++n) tiles.push_back({{k, pos}, n});
  for (const auto& a : tiles)
    for (const auto& b : tiles) {
      const auto wa = wave_packet(a, L, PacketNorm::Linf).pattern;
      const auto wb = wave_packet(b, L, PacketNorm::Linf).pattern;
      long dot = 0;
      for (std::size_t x = 0; x < wa.size(); ++x) dot += wa[x] * wb[x];
      if (!tiles_intersect(a, b)) CHECK(dot == 0);
      if (a.time == b.time && a.n != b.n) CHECK(dot == 0);
    }
}
