#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../common/oracles.hpp"
#include "tilewalsh/random.hpp"
#include "tilewalsh/timefreq.hpp"

using namespace tilewalsh;

namespace {

std::vector<bool> bools(const LevelSet& s) {
  std::vector<bool> out(s.cells());
  for (std::size_t x = 0; x < s.cells(); ++x) out[x] = s.contains(x);
  return out;
}

std::vector<oracle::Bitile> plain(const std::vector<Bitile>& v) {
  std::vector<oracle::Bitile> out;
  for (const auto& b : v) out.push_back({b.time.k, b.time.pos, b.m});
  return out;
}

Signal walsh_signal(std::uint64_t n, int L) {
  std::vector<Rational> v;
  for (auto s : walsh(n, L)) v.push_back(s);
  return Signal::scalar(L, v);
}

// Δ^q of an explicit member set under top T, from test-side packets.
double delta_power_oracle(const std::vector<Bitile>& members, const Bitile& T, const std::vector<Rational>& f, int L,
                          double q) {
  std::vector<Rational> sum(f.size(), 0);
  for (const auto& P : members) {
    const Rational a = oracle::linf_coefficient(f, L, P.time.k, P.time.pos, 2 * P.m) * oracle::pow2(P.time.k);
    for (std::uint64_t x = 0; x < f.size(); ++x) sum[x] += a * oracle::packet(P.time.k, P.time.pos, 2 * P.m, x, L);
  }
  double integral = 0;
  for (const auto& v : sum) integral += std::pow(std::abs(v.get_d()), q);
  return integral / static_cast<double>(f.size()) * std::ldexp(1.0, T.time.k);
}

}  // namespace

TEST_CASE("epsilon examples") {
  const Bitile T{{0, 0}, 0};
  CHECK(epsilon_pt(T, T) == 1);
  // digit product of n_T = 1 at the left endpoints of [0,1/2) and [1/2,1)
  CHECK(epsilon_digit_product(1, T, 1, 0) == 1);
  CHECK(epsilon_digit_product(1, T, 1, 1) == -1);
  // the same sign through the order relation: n_T = 3 with P = ([1/2,1), m = 0)
  const Bitile T3{{0, 0}, 1};
  CHECK(epsilon_pt({{1, 1}, 0}, T3) == -1);
  CHECK(epsilon_pt({{1, 0}, 0}, T3) == 1);
  CHECK_THROWS_AS(epsilon_pt({{1, 0}, 0}, T), std::invalid_argument);
}

TEST_CASE("tree identity checks") {
  CHECK(verify_tree_identity({{0, 0}, 0}, {{0, 0}, 0}, 2));
  CHECK(verify_tree_identity({{2, 3}, 0}, {{1, 1}, 1}, 3));
  CHECK_THROWS_AS(verify_tree_identity({{1, 0}, 0}, {{0, 0}, 0}, 3), std::invalid_argument);
}

TEST_CASE("epsilon is constant on I_P") {
  for (int L = 1; L <= 4; ++L) {
    const BitileUniverse u(L);
    for (const auto& T : u.items())
      for (const auto& P : u.items()) {
        if (!bitile_le_u(P, T)) continue;
        const int R = L + 2;
        const int e = epsilon_pt(P, T);
        for (std::uint64_t c = P.time.pos << (R - P.time.k); c < (P.time.pos + 1) << (R - P.time.k); ++c)
          CHECK(epsilon_digit_product(P.time.k, T, R, c) == e);
      }
  }
}

TEST_CASE("pairing transfer to Haar functions") {
  const int L = 3;
  const int R = L + 1;
  SplitMix64 rng(21);
  const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
  const auto fv = f.values();
  std::vector<Rational> fine(std::size_t{1} << R);
  for (std::size_t c = 0; c < fine.size(); ++c) fine[c] = fv[c >> 1];
  const BitileUniverse u(L);
  for (const auto& T : u.items())
    for (const auto& P : u.items()) {
      if (!bitile_le_u(P, T)) continue;
      const Rational a = oracle::linf_coefficient(fine, R, P.time.k, P.time.pos, 2 * P.m);
      std::vector<Rational> fw(fine.size());
      for (std::size_t c = 0; c < fine.size(); ++c) fw[c] = fine[c] * oracle::packet(T.time.k, T.time.pos, 2 * T.m + 1, c, R);
      const Rational b = oracle::linf_coefficient(fw, R, P.time.k, P.time.pos, 1);
      for (std::uint64_t c = 0; c < fine.size(); ++c) {
        const Rational lhs = a * oracle::packet(P.time.k, P.time.pos, 2 * P.m, c, R);
        const Rational rhs = b * oracle::packet(P.time.k, P.time.pos, 1, c, R) *
                             oracle::packet(T.time.k, T.time.pos, 2 * T.m + 1, c, R);
        CHECK(lhs == rhs);
      }
    }
}

TEST_CASE("density examples") {
  const std::vector<Bitile> coll{{{1, 0}, 0}, {{2, 3}, 1}};
  CHECK(density(coll, LevelSet(2), FrequencyChoice::constant(2, 1)) == 0);
  LevelSet full(2);
  for (std::size_t x = 0; x < 4; ++x) full.insert(x);
  // ν = 3 lies in ω_P = 2[0,2) of ([0,1/2), m = 0)
  CHECK(density(coll, full, FrequencyChoice::constant(2, 3)) == 1);
  SplitMix64 rng(22);
  const BitileUniverse u(2);
  for (int i = 0; i < 50; ++i) {
    const Bitile P = u.items()[rng.below(u.size())];
    const LevelSet E = random_level_set(rng, 2, 0.5);
    const FrequencyChoice N = random_frequency_choice(rng, 2);
    CHECK(density(std::vector<Bitile>{P}, E, N) == oracle::sup_fraction({P.time.k, P.time.pos, P.m}, bools(E), N.values(), 2));
  }
}

TEST_CASE("density is monotone in E and in the collection") {
  SplitMix64 rng(23);
  for (int i = 0; i < 30; ++i) {
    const int L = 1 + static_cast<int>(rng.below(5));
    const BitileUniverse u(L);
    const auto coll = random_collection(rng, u);
    std::vector<Bitile> sub;
    for (const auto& P : coll)
      if (rng.coin()) sub.push_back(P);
    const LevelSet E = random_level_set(rng, L, 0.5);
    LevelSet bigger = E;
    for (std::size_t x = 0; x < E.cells(); ++x)
      if (rng.coin()) bigger.insert(x);
    const FrequencyChoice N = random_frequency_choice(rng, L);
    CHECK(density(sub, E, N) <= density(coll, E, N));
    CHECK(density(coll, E, N) <= density(coll, bigger, N));
    CHECK(density(coll, E, N) == oracle::density(plain(coll), bools(E), N.values(), L));
  }
}

TEST_CASE("tree delta examples") {
  const int L = 3;
  const Bitile T{{0, 0}, 2};
  const Signal f = walsh_signal(2 * T.m, L);
  const PacketTable table(f);
  CHECK(tree_delta({T, {}}, table, 2.0, NormPlugin::euclidean()).value == 0.0);
  for (double q : {2.0, 3.0, 4.0}) {
    const auto d = tree_delta({T, {T}}, table, q, NormPlugin::euclidean());
    CHECK(d.value == doctest::Approx(1.0));
  }
  SplitMix64 rng(24);
  for (int i = 0; i < 20; ++i) {
    const Signal g = random_signal(rng, L, 2, ValueKind::Vector);
    const PacketTable gt(g);
    const Tree t = random_tree(rng, L);
    Rational energy = 0;
    for (const auto& P : t.up_part()) {
      for (int c = 0; c < 2; ++c) {
        std::vector<Rational> comp(g.cells());
        for (std::size_t x = 0; x < g.cells(); ++x) comp[x] = g.at(x, c);
        const Rational a = oracle::linf_coefficient(comp, L, P.time.k, P.time.pos, 2 * P.m);
        energy += a * a * oracle::pow2(P.time.k);
      }
    }
    const auto d = tree_delta(t, gt, 2.0, NormPlugin::euclidean());
    REQUIRE(d.power);
    CHECK(*d.power == energy * oracle::pow2(t.top.time.k));
  }
}

TEST_CASE("size examples and the brute-force subtree oracle") {
  const int L = 3;
  SplitMix64 rng(25);
  const Signal z = random_signal(rng, L, 1, ValueKind::Vector);
  CHECK(size(std::vector<Bitile>{}, PacketTable(z), 2.0, NormPlugin::euclidean()).value.value == 0.0);
  const Bitile P{{0, 0}, 1};
  const auto one = size(std::vector<Bitile>{P}, PacketTable(walsh_signal(2, L)), 2.0, NormPlugin::euclidean());
  CHECK(one.value.value == doctest::Approx(1.0));
  const BitileUniverse u(L);
  double worst_gap = 0;
  for (int i = 0; i < 12; ++i) {
    std::vector<Bitile> coll;
    while (coll.size() < 7) {
      const Bitile b = u.items()[rng.below(u.size())];
      if (std::find(coll.begin(), coll.end(), b) == coll.end()) coll.push_back(b);
    }
    const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
    const auto fv = f.values();
    const PacketTable table(f);
    for (double q : {2.0, 4.0}) {
      double brute = 0;
      for (int k = 0; k <= L; ++k)
        for (std::uint64_t pos = 0; pos < (1u << k); ++pos)
          for (std::uint64_t m = 0; m < (1u << (L - k)); ++m) {
            const Bitile T{{k, pos}, m};
            std::vector<Bitile> under;
            for (const auto& b : coll)
              if (bitile_le_u(b, T)) under.push_back(b);
            for (std::uint64_t mask = 1; mask < (1u << under.size()); ++mask) {
              std::vector<Bitile> s;
              for (std::size_t j = 0; j < under.size(); ++j)
                if ((mask >> j) & 1) s.push_back(under[j]);
              brute = std::max(brute, std::pow(delta_power_oracle(s, T, fv, L, q), 1.0 / q));
            }
          }
      const double computed = size(coll, table, q, NormPlugin::euclidean()).value.value;
      if (q == 2.0) {
        CHECK(computed == doctest::Approx(brute).epsilon(1e-12));
      } else {
        CHECK(computed <= brute * (1 + 1e-12));
        worst_gap = std::max(worst_gap, brute / std::max(computed, 1e-300));
      }
    }
  }
  CHECK(worst_gap >= 1.0);
}

TEST_CASE("size is monotone in the collection for q = 2") {
  SplitMix64 rng(26);
  for (int i = 0; i < 20; ++i) {
    const int L = 1 + static_cast<int>(rng.below(4));
    const BitileUniverse u(L);
    const auto coll = random_collection(rng, u);
    std::vector<Bitile> sub;
    for (const auto& P : coll)
      if (rng.coin()) sub.push_back(P);
    const PacketTable table(random_signal(rng, L, 2, ValueKind::Vector));
    const auto a = size(sub, table, 2.0, NormPlugin::euclidean()).value;
    const auto b = size(coll, table, 2.0, NormPlugin::euclidean()).value;
    REQUIRE(a.power);
    REQUIRE(b.power);
    CHECK(*a.power <= *b.power);
  }
}

TEST_CASE("tree form sum examples") {
  const int L = 2;
  SplitMix64 rng(27);
  const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
  const Signal g = random_unit_signal(rng, L, 1, ValueKind::Vector, NormPlugin::euclidean());
  const PacketTable table(f);
  const FrequencyChoice N = random_frequency_choice(rng, L);
  const Bitile P{{1, 1}, 0};
  const Tree t{P, {P}};
  CHECK(tree_form_sum(t, table, g, DensityField(LevelSet(L), N), 2.0, NormPlugin::euclidean()).lhs == 0);
  LevelSet E(L);
  for (std::size_t x = 0; x < 4; ++x) E.insert(x);
  const DensityField field(E, N);
  CHECK(tree_form_sum(t, table, Signal(L, 1), field, 2.0, NormPlugin::euclidean()).lhs == 0);
  // |⟨f, w_{P_d}⟩⟨w_{P_d}, g 1_{E_{P_u}}⟩| = 2^k |∫ f w^∞| |∫ g 1_{E_{P_u}} w^∞|
  const auto fv = f.values();
  std::vector<Rational> ge(4, 0);
  for (std::uint64_t x = 0; x < 4; ++x)
    if ((N[x] >> P.time.k) == 2 * P.m + 1) ge[x] = g.at(x, 0);
  const Rational expect = abs(oracle::linf_coefficient(fv, L, 1, 1, 0) * oracle::linf_coefficient(ge, L, 1, 1, 0)) * 2;
  const auto r = tree_form_sum(t, table, g, field, 2.0, NormPlugin::euclidean());
  CHECK(r.lhs == expect);
  CHECK(bitile_form_term(P, table, g, field) == expect);
}

TEST_CASE("tree lemma diagnostics on random trees") {
  SplitMix64 rng(28);
  for (int i = 0; i < 40; ++i) {
    const int L = 1 + static_cast<int>(rng.below(5));
    const Tree t = random_tree(rng, L);
    const Signal f = random_signal(rng, L, 1, ValueKind::Vector);
    const Signal g = random_unit_signal(rng, L, 1, ValueKind::Vector, NormPlugin::euclidean());
    const LevelSet E = random_level_set(rng, L, 0.75);
    const FrequencyChoice N = random_frequency_choice(rng, L);
    const DensityField field(E, N);
    const PacketTable table(f);
    const auto r = tree_form_sum(t, table, g, field, 2.0, NormPlugin::euclidean());
    CHECK(all_theorem_backed_pass(r.certificates));
    CHECK(r.lhs == r.lhs_down + r.lhs_up);
    Rational direct = 0;
    for (const auto& P : t.members) direct += bitile_form_term(P, table, g, field);
    CHECK(r.lhs == direct);
    // members of T_d above the same J have disjoint up-tile frequency windows
    const auto down = t.lemma_down();
    for (const auto& [J, gj] : g_sets(t, field)) {
      std::vector<Bitile> above;
      for (const auto& P : down)
        if (P.time.k < J.k && interval_contains(P.time, J)) above.push_back(P);
      for (std::size_t a = 0; a < above.size(); ++a)
        for (std::size_t b = a + 1; b < above.size(); ++b) {
          const auto fa = above[a].up().frequency();
          const auto fb = above[b].up().frequency();
          CHECK((fa.upper() <= fb.lower() || fb.upper() <= fa.lower()));
        }
    }
  }
}

TEST_CASE("G_J examples") {
  SplitMix64 rng(29);
  const Tree t = random_tree(rng, 4);
  const FrequencyChoice N = random_frequency_choice(rng, 4);
  for (const auto& c : gj_certificate(t, DensityField(LevelSet(4), N))) {
    CHECK(c.pass);
    CHECK(std::get<Rational>(c.lhs) == 0);
  }
  LevelSet full(4);
  for (std::size_t x = 0; x < 16; ++x) full.insert(x);
  const FrequencyChoice top(4, std::vector<std::uint64_t>(16, t.top.up().frequency().lower()));
  for (const auto& c : gj_certificate(t, DensityField(full, top))) CHECK(c.pass);
}
