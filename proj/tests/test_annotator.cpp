#include <doctest.h>

#include "rfw/annotator.hpp"
#include "support.hpp"

using namespace rfw;
using rfw::testing::fixture;
using rfw::testing::random_up;

namespace {

StateSet states(const Nft& T, std::initializer_list<const char*> names) {
  std::vector<int> v;
  for (const char* n : names) v.push_back(T.state_index(n));
  return make_set(v);
}

// Cover by exhaustive search: every subset, compatibility from scratch,
// order by sorted name lists.
std::optional<StateSet> brute_cover(const Nft& T, const StateSet& S, const Word& w) {
  auto names = [&](const StateSet& C) {
    std::vector<std::string> n;
    for (int q : C) n.push_back(T.state_name(q));
    std::sort(n.begin(), n.end());
    return n;
  };
  for (std::size_t j = 0; j <= w.size(); ++j) {
    Word u(w.begin(), w.begin() + static_cast<long>(j));
    std::optional<StateSet> best;
    for (std::size_t m = 1; m < (std::size_t{1} << S.size()); ++m) {
      StateSet C;
      for (std::size_t k = 0; k < S.size(); ++k)
        if (m & (std::size_t{1} << k)) C.push_back(S[k]);
      if (!is_compatible(T, C) || push(T, C, u) != push(T, S, u)) continue;
      if (!best || names(C) < names(*best)) best = C;
    }
    if (best) return best;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("cover examples") {
  Nft d = fixture("double"), r = fixture("replace");
  AnalysisContext dc(d), rc(r);
  auto c = cover(dc, states(d, {"q0"}), d.input.parse("012"));
  REQUIRE(c);
  CHECK(c->time == 0);
  CHECK(c->C == states(d, {"q0"}));
  auto c2 = cover(dc, states(d, {"q1", "q2"}), d.input.parse("0001"));
  REQUIRE(c2);
  CHECK(c2->time == 0);
  CHECK(c2->C == states(d, {"q1", "q2"}));
  auto c3 = cover(rc, states(r, {"q1", "q2"}), r.input.parse("0101"));
  REQUIRE(c3);
  CHECK(c3->C == states(r, {"q1"}));
  CHECK(c3->time == 2);
  CHECK(brute_cover(r, states(r, {"q1", "q2"}), r.input.parse("0101")) == c3->C);
  CHECK_FALSE(cover(rc, states(r, {"q1", "q2"}), r.input.parse("0")));
}

TEST_CASE("annotate examples") {
  Nft d = fixture("double"), r = fixture("replace");
  AnalysisContext dc(d), rc(r);
  auto sets = annotate(dc, parse_up(d.input, "(001)^w"), 9);
  StateSet q0 = states(d, {"q0"}), q12 = states(d, {"q1", "q2"});
  std::vector<StateSet> want{q0, q12, q12, q0, q12, q12, q0, q12, q12, q0};
  CHECK(sets == want);
  for (const auto& C : annotate(rc, parse_up(r.input, "(1)^w"), 20)) CHECK(C == states(r, {"q0"}));
  // 0^ω is outside replace's domain: the frontier never gets covered.
  CHECK_THROWS_AS(annotate(rc, parse_up(r.input, "(0)^w"), 5, 50), Diverged);
}

TEST_CASE("C0 is released before the first letter when it needs no lookahead") {
  Nft d = fixture("double");
  AnalysisContext ctx(d);
  Annotator A(ctx);
  auto first = A.start();
  REQUIRE(first.size() == 1);
  CHECK(first[0] == d.initial_set());
}

TEST_CASE("property: cover agrees with exhaustive search") {
  std::mt19937 rng(3);
  for (const char* name : {"replace", "double", "normalize", "tree_compat"}) {
    Nft T = fixture(name);
    AnalysisContext ctx(T);
    for (int i = 0; i < 150; ++i) {
      StateSet S;
      for (int q = 0; q < T.num_states(); ++q)
        if (rng() % 2) S.push_back(q);
      if (S.empty()) continue;
      Word w = rfw::testing::random_word(rng, T.input.size(), 0, 6);
      auto c = cover(ctx, S, w);
      auto b = brute_cover(T, S, w);
      CHECK(c.has_value() == b.has_value());
      if (c && b) CHECK(c->C == *b);
    }
  }
}

TEST_CASE("property: annotation is a pre-step chain containing the accepting run") {
  std::mt19937 rng(17);
  for (const char* name : {"replace", "double", "normalize", "tree_compat"}) {
    Nft T = fixture(name);
    AnalysisContext ctx(T);
    int tested = 0;
    for (int i = 0; i < 400 && tested < 40; ++i) {
      UPWord x = random_up(rng, T.input.size(), 5, 4);
      auto run = oracle_run(T, x);
      if (!run || !oracle_eval(T, x)) continue;
      ++tested;
      auto sets = annotate(ctx, x, 40);
      CHECK(subset_of(sets[0], T.initial_set()));
      for (std::size_t k = 0; k < sets.size(); ++k) {
        CHECK(contains(sets[k], run->state_at(k)));
        CHECK(ctx.is_compatible(sets[k]));
        if (k + 1 < sets.size()) CHECK(analyze_step(T, sets[k], Word{at(x, k)}, sets[k + 1]).has_value());
      }
      // Same stream, same annotation.
      CHECK(annotate(ctx, x, 40) == sets);
    }
    CHECK(tested >= 20);
  }
}
