#include <doctest.h>

#include "reference.hpp"
#include "rfw/convert.hpp"
#include "rfw/determinize.hpp"
#include "support.hpp"

using namespace rfw;
using rfw::testing::random_up;
using rfw::testing::small_corpus;

namespace {

Dsst sst_fixture(const std::string& name) { return load_dsst(std::string(RFW_FIXTURE_DIR) + "/" + name + ".json"); }
TwoWayTransducer twoway_fixture(const std::string& name) { return load_twoway(std::string(RFW_FIXTURE_DIR) + "/" + name + ".json"); }

std::vector<UPWord> inputs(std::size_t letters, std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<UPWord> xs;
  while (xs.size() < count) xs.push_back(random_up(rng, letters, 5, 4));
  return xs;
}

// Agreement of two dSSTs on the first n output letters, or both undefined.
bool same_limit(const Dsst& a, const Dsst& b, const UPWord& x, std::size_t n) {
  auto fa = eval_limit(a, x), fb = eval_limit(b, x);
  if (fa.has_value() != fb.has_value()) return false;
  return !fa || take(*fa, n) == take(*fb, n);
}

Substitution subst(std::initializer_list<RegWord> words) { return Substitution{std::vector<RegWord>(words)}; }

bool has_path(const std::vector<Decomposition::Node>& level, const std::vector<std::vector<int>>& labels, std::size_t d = 0) {
  if (d == labels.size()) return true;
  for (const auto& nd : level)
    if (nd.label == labels[d] && has_path(nd.children, labels, d + 1)) return true;
  return false;
}

std::size_t count_nodes(const std::vector<Decomposition::Node>& level) {
  std::size_t n = level.size();
  for (const auto& nd : level) n += count_nodes(nd.children);
  return n;
}

}  // namespace

TEST_CASE("twoway_to_sst examples") {
  TwoWayTransducer r2 = twoway_fixture("replace_2dt");
  Dsst r = twoway_to_sst(r2);
  CHECK(check_bounded(r, 1));
  for (const auto& x : inputs(3, 10, 5)) {
    auto ref = reference::replace(x, 80);
    auto got = eval_limit(r, x);
    REQUIRE(got.has_value() == ref.has_value());
    if (got) CHECK(take(*got, 80) == *ref);
  }

  TwoWayTransducer copy;
  copy.input = Alphabet({"a", "b"});
  copy.output = Alphabet({"a", "b"});
  int s = copy.add_state("s");
  copy.set_move(s, 0, kEndmarker, {s, Dir::Right, {}});
  for (Letter a = 0; a < 2; ++a) copy.set_move(s, 0, a, {s, Dir::Right, {a}});
  Dsst id = twoway_to_sst(copy);
  CHECK(id.num_states() == 2);
  for (const auto& x : small_corpus(2, 2, 2)) CHECK(eval_limit(id, x) == x);
}

TEST_CASE("twoway_to_sst on the double machine") {
  Dsst d = twoway_to_sst(twoway_fixture("double_2dt"));
  CHECK(check_bounded(d, 1));
  for (const auto& x : inputs(3, 10, 6)) {
    auto got = eval_limit(d, x);
    REQUIRE(got);
    CHECK(take(*got, 80) == *reference::double_(x, 80));
  }
}

TEST_CASE("sst_to_twoway examples") {
  Dsst r = sst_fixture("replace_sst"), d = sst_fixture("double_sst");
  TwoWayTransducer r2 = sst_to_twoway(r), d2 = sst_to_twoway(d);
  UPWord x = parse_up(r.input, "(001)^w");
  auto res = eval_2dt(r2, x, 60);
  REQUIRE(res.status == TwoWayResult::Status::Defined);
  CHECK(res.out == take(*eval_limit(r, x), 60));
  UPWord y = parse_up(d.input, "002(0)^w");
  auto dres = eval_2dt(d2, y, 30);
  REQUIRE(dres.status == TwoWayResult::Status::Defined);
  CHECK(dres.out == take(*eval_limit(d, y), 30));

  Dsst constants;
  constants.input = Alphabet({"a"});
  constants.output = Alphabet({"b"});
  constants.add_register("out");
  constants.add_state("s");
  constants.set_edge(0, 0, 0, Substitution{{constants.parse("$out b b")}});
  TwoWayTransducer c2 = sst_to_twoway(constants);
  CHECK_FALSE(c2.moves_left());
  CHECK(c2.output.render(eval_2dt(c2, parse_up(c2.input, "(a)^w"), 5).out) == "bbbbb");

  CHECK_THROWS_AS(sst_to_twoway(sst_fixture("kbounded_sst")), std::invalid_argument);
}

TEST_CASE("property: sst_to_twoway agrees with eval_limit") {
  Dsst r = sst_fixture("replace_sst"), d = sst_fixture("double_sst");
  TwoWayTransducer r2 = sst_to_twoway(r), d2 = sst_to_twoway(d);
  for (const auto& x : inputs(3, 40, 9)) {
    auto fr = eval_limit(r, x);
    auto got = eval_2dt(r2, x, 50, 200000);
    CHECK((got.status == TwoWayResult::Status::Defined) == fr.has_value());
    if (fr) CHECK(got.out == take(*fr, 50));
    CHECK(eval_2dt(d2, x, 50).out == take(*eval_limit(d, x), 50));
  }
}

TEST_CASE("round trip sst to 2dT to sst") {
  for (const char* name : {"replace_sst", "double_sst"}) {
    Dsst S = sst_fixture(name);
    Dsst back = twoway_to_sst(sst_to_twoway(S));
    CHECK(check_bounded(back, 1));
    for (const auto& x : inputs(3, 10, 21)) CHECK(same_limit(S, back, x, 100));
  }
}

TEST_CASE("decomposition example forest") {
  // Registers r = 0, s = 1 over the letters a = 0, b = 1.
  Decomposition D(2, 5);
  CHECK(D.bound() == 36);
  CHECK(D.roots().size() == 36);
  RegWord none;
  D.step(subst({{letter_sym(0), reg_sym(0)}, {reg_sym(0), letter_sym(1)}}), none);
  D.step(subst({{reg_sym(1), letter_sym(0), reg_sym(1)}, {reg_sym(0), letter_sym(1)}}), none);
  D.step(subst({{reg_sym(0)}, {reg_sym(1)}}), none);
  D.check();
  CHECK(D.height() == 3);
  D.merge(2);
  D.check();
  REQUIRE(D.height() == 2);
  CHECK(D.skeleton(1, 0) == std::vector<int>{0});
  CHECK(D.skeleton(1, 1) == std::vector<int>{0});
  CHECK(D.skeleton(2, 0) == std::vector<int>{1, 1});
  CHECK(D.skeleton(2, 1) == std::vector<int>{0});
  CHECK(has_path(D.roots(), {{5, 0}, {1, 4}, {2, 1}}));
  CHECK(has_path(D.roots(), {{5, 0}, {3, 2}, {1, 3}}));
  CHECK(has_path(D.roots(), {{3, 0}, {1, 2}, {1, 1}}));
  CHECK_FALSE(has_path(D.roots(), {{5, 0}, {1, 4}, {1, 1}}));
  CHECK_FALSE(D.can_merge(0));
}

TEST_CASE("decomposition consumes copies into out") {
  // Single register r, K = 2: r <- r a, then out <- out r r b.
  Decomposition D(1, 2);
  RegWord none;
  D.step(subst({{reg_sym(0), letter_sym(0)}}), none);
  D.step(subst({{reg_sym(0), letter_sym(0)}}), none);
  D.check();
  RegWord got = D.step(subst({{}}), {reg_sym(0), reg_sym(0), letter_sym(1)});
  CHECK(got == RegWord{letter_sym(0), letter_sym(0), letter_sym(0), letter_sym(0), letter_sym(1)});
  D.check();
}

TEST_CASE("property: forest invariant holds after every transition") {
  std::mt19937 rng(17);
  int merges = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Decomposition D(2, 2);
    for (int i = 0; i < 25; ++i) {
      // Copyless updates keep every composition 2-bounded; out reads at most one of each.
      Substitution lam{{{}, {}}};
      std::vector<int> owner{static_cast<int>(rng() % 3), static_cast<int>(rng() % 3)};
      RegWord alpha;
      for (int r = 0; r < 2; ++r) {
        if (owner[static_cast<std::size_t>(r)] == 2) alpha.push_back(reg_sym(r));
        else lam.assign[static_cast<std::size_t>(owner[static_cast<std::size_t>(r)])].push_back(reg_sym(r));
      }
      for (auto& w : lam.assign)
        if (rng() % 2) w.push_back(letter_sym(static_cast<Letter>(rng() % 2)));
      std::size_t before = D.height();
      D.step(lam, alpha);
      if (D.height() <= before) ++merges;
      D.check();
      CHECK(D.height() <= D.bound());
      CHECK(count_nodes(D.roots()) > 0);
    }
  }
  CHECK(merges > 0);
}

TEST_CASE("kbounded_to_copyless examples") {
  Dsst k = sst_fixture("kbounded_sst");
  Dsst c = kbounded_to_copyless(k, 2);
  CHECK(check_copyless(c));
  for (const auto& x : small_corpus(2, 3, 3)) CHECK(same_limit(k, c, x, 100));
  CHECK(eval(c, c.input.parse("aab")).out() == c.output.parse("aaaab"));
  CHECK_THROWS_AS(kbounded_to_copyless(k, 1), std::invalid_argument);

  Dsst r = sst_fixture("replace_sst");
  Dsst rc = kbounded_to_copyless(r, 1);
  CHECK(check_copyless(rc));
  for (const auto& x : inputs(3, 20, 33)) CHECK(same_limit(r, rc, x, 100));
}

TEST_CASE("composition with a deterministic transducer") {
  // N copies its input; S is the replace machine.
  Nft N;
  N.input = Alphabet({"0", "1", "2"});
  N.output = Alphabet({"0", "1", "2"});
  int q = N.add_state("q", true, true);
  for (Letter a = 0; a < 3; ++a) N.add_transition(q, a, q, {a});
  Dsst S = sst_fixture("replace_sst");
  ComposedEvaluator E(N, S);
  Word x = N.input.parse("0010201");
  for (Letter a : x) E.feed(a);
  CHECK(E.live_runs() == 1);
  CHECK(E.output() == eval(S, x).out());
}

TEST_CASE("composition trims a wrong guess") {
  // N guesses at the first letter whether the second letter is b.
  Nft N;
  N.input = Alphabet({"a", "b"});
  N.output = Alphabet({"x", "y"});
  int s = N.add_state("s", true, true), yes = N.add_state("yes", false, true), no = N.add_state("no", false, true);
  int id = N.add_state("id", false, true);
  N.add_transition(s, 0, yes, {0});
  N.add_transition(s, 0, no, {0});
  N.add_transition(yes, 1, id, {1});
  N.add_transition(no, 0, id, {0});
  N.add_transition(id, 0, id, {0});
  N.add_transition(id, 1, id, {1});
  // S doubles each block of x's when it meets a y.
  Dsst S;
  S.input = N.output;
  S.output = N.output;
  S.add_register("out");
  S.add_register("r");
  S.add_state("s");
  S.set_edge(0, 0, 0, Substitution{{S.parse("$out x"), S.parse("$r x")}});
  S.set_edge(0, 1, 0, Substitution{{S.parse("$out $r y"), {}}});
  for (const char* w : {"abaab", "aabab"}) {
    ComposedEvaluator E(N, S);
    Word x = N.input.parse(w);
    E.feed(x[0]);
    CHECK(E.live_runs() == 2);
    for (std::size_t i = 1; i < x.size(); ++i) E.feed(x[i]);
    CHECK(E.live_runs() == 1);
    Word mapped;
    for (Letter a : x) mapped.push_back(a);
    CHECK(E.output() == eval(S, mapped).out());
  }
  ComposedEvaluator E(N, S);
  CHECK_THROWS_AS(E.feed(1), std::runtime_error);
}

TEST_CASE("composition of the double transducer agrees with the determinizer") {
  Nft N = rfw::testing::fixture("double");
  Dsst S;
  S.input = N.output;
  S.output = N.output;
  S.add_register("out");
  S.add_state("s");
  for (Letter b = 0; b < 3; ++b) {
    Substitution up{{RegWord{reg_sym(0), letter_sym(b)}}};
    S.set_edge(0, b, 0, up);
  }
  UPWord x = parse_up(N.input, "(001)^w");
  ComposedEvaluator E(N, S);
  for (std::size_t i = 0; i < 60; ++i) E.feed(at(x, i));
  Word oracle = *reference::double_(x, 200);
  CHECK(is_prefix(E.output(), oracle));
  CHECK(E.output().size() >= 50);
  PipelineResult p = run_pipeline(N, x, 60);
  CHECK(is_prefix(p.out, oracle));
  Word shorter = p.out.size() < E.output().size() ? p.out : E.output();
  Word longer = p.out.size() < E.output().size() ? E.output() : p.out;
  CHECK(is_prefix(shorter, longer));
}
