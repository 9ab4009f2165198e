#include <doctest.h>

#include <algorithm>

#include "tilewalsh/io.hpp"
#include "tilewalsh/random.hpp"

using namespace tilewalsh;

TEST_CASE("splitmix64 reference stream") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFull);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
  SplitMix64 a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.below(7) == b.below(7));
  SplitMix64 c(5);
  for (int i = 0; i < 1000; ++i) CHECK(c.below(13) < 13);
}

TEST_CASE("random level sets and frequency choices") {
  SplitMix64 rng(51);
  for (int L = 1; L <= 8; ++L) {
    for (double mu : {0.0, 0.25, 0.5, 1.0}) {
      const LevelSet s = random_level_set(rng, L, mu);
      CHECK(s.count() == static_cast<std::size_t>(mu * (1 << L)));
    }
    const FrequencyChoice N = random_frequency_choice(rng, L);
    for (auto v : N.values()) CHECK(v <= (1u << L));
  }
}

TEST_CASE("random trees are valid") {
  SplitMix64 rng(52);
  for (int i = 0; i < 200; ++i) {
    const int L = 1 + static_cast<int>(rng.below(5));
    const Tree t = random_tree(rng, L);
    CHECK(t.valid());
    CHECK(!t.members.empty());
    const TreeFamily fam = random_up_tree_family(rng, L, 3);
    std::vector<Bitile> downs;
    for (const auto& T : fam)
      for (const auto& P : T.members) downs.push_back(P);
    std::sort(downs.begin(), downs.end());
    CHECK(std::adjacent_find(downs.begin(), downs.end()) == downs.end());
  }
}

TEST_CASE("json round trips") {
  SplitMix64 rng(53);
  const Signal f = random_signal(rng, 3, 2, ValueKind::Matrix);
  CHECK(signal_from_json(signal_to_json(f)) == f);
  const LevelSet s = random_level_set(rng, 4, 0.5);
  CHECK(level_set_from_json(level_set_to_json(s)) == s);
  CHECK(level_set_from_json(Json{{"levels", 2}, {"bits", "0110"}}) == LevelSet(2, std::vector<std::uint64_t>{1, 2}));
  const FrequencyChoice N = random_frequency_choice(rng, 4);
  CHECK(frequency_choice_from_json(frequency_choice_to_json(N)) == N);
  const Bitile b{{2, 3}, 1};
  CHECK(bitile_from_json(bitile_json(b)) == b);
  CHECK(rational_from_json(Json("-3/6")) == Rational(-1, 2));
  CHECK(rational_from_json(Json("0.125")) == Rational(1, 8));
  CHECK(rational_from_json(Json(2)) == 2);
  CHECK_THROWS(level_set_from_json(Json{{"levels", 2}, {"bits", "01"}}));
}
