#include <doctest.h>

#include "reference.hpp"
#include "random_state.hpp"
#include "rfw/annotator.hpp"
#include "rfw/determinize.hpp"
#include "support.hpp"

using namespace rfw;
using rfw::testing::fixture;
using rfw::testing::random_up;

namespace {

StateSet states(const Nft& T, std::initializer_list<const char*> names) {
  std::vector<int> s;
  for (const char* n : names) s.push_back(T.state_index(n));
  return make_set(s);
}

Word w(const Nft& T, const std::string& s) { return T.output.parse(s); }

// In-domain UP inputs for replace and double.
std::vector<UPWord> corpus(std::mt19937& rng, std::size_t count, bool replace_domain) {
  std::vector<UPWord> xs;
  while (xs.size() < count) {
    UPWord x = random_up(rng, 3, 6, 4);
    if (replace_domain && !reference::replace(x, 1)) continue;
    xs.push_back(x);
  }
  return xs;
}

}  // namespace

TEST_CASE("tree of compatibles") {
  Nft T = fixture("tree_compat");
  AnalysisContext ctx(T);
  auto tree = tree_of(ctx, states(T, {"1", "2", "3"}));
  CHECK(tree.size() == 10);
  std::size_t leaves = 0;
  for (const auto& p : tree) {
    CHECK(p.front() == states(T, {"1", "2", "3"}));
    for (std::size_t i = 1; i < p.size(); ++i) {
      CHECK(subset_of(p[i], p[i - 1]));
      CHECK(p[i] != p[i - 1]);
      CHECK(ctx.is_compatible(p[i]));
    }
    leaves += p.back().size() == 1;
  }
  CHECK(leaves == 7);
}

TEST_CASE("init examples") {
  Nft d = fixture("double");
  AnalysisContext ctx(d);
  Determinizer det(ctx);
  CHECK(det.init(states(d, {"q0"})).empty());
  CHECK_FALSE(det.state().separable);
  CHECK(det.state().lag.at(d.state_index("q0")).empty());

  Nft r = fixture("replace");
  AnalysisContext rctx(r);
  Determinizer rdet(rctx);
  rdet.init(states(r, {"q0"}));
  CHECK_FALSE(rdet.state().separable);
  CHECK_THROWS(rdet.init(states(r, {"q1", "q2"})));

  Nft t = fixture("two_loops");
  AnalysisContext tctx(t);
  Determinizer tdet(tctx);
  tdet.init(states(t, {"p", "q"}));
  CHECK(tdet.state().separable);
  CHECK(tdet.state().theta.size() == tctx.theta_length());
  for (const auto& [p, m] : tdet.state().nb)
    for (const auto& [q, n] : m) CHECK(n == 0);
  for (const auto& [p, v] : tdet.state().regs) CHECK(v.empty());
  for (const auto& [q, v] : tdet.state().last) CHECK(v.empty());
}

TEST_CASE("step_nonsep examples") {
  Nft d = fixture("double");
  AnalysisContext ctx(d);
  Determinizer det(ctx);
  det.init(states(d, {"q0"}));
  CHECK(det.step_nonsep(0, states(d, {"q1", "q2"})) == w(d, "0"));
  CHECK(det.state().separable);
  // The loop (0)^ω has an empty preperiod, so the advance "0" of q2 lands in last.
  int q1 = d.state_index("q1"), q2 = d.state_index("q2");
  CHECK(det.state().max_lag.empty());
  CHECK(det.state().lag.at(q1).empty());
  CHECK(det.state().lag.at(q2).empty());
  CHECK(det.state().last.at(q1).empty());
  CHECK(det.state().last.at(q2) == w(d, "0"));

  Nft r = fixture("replace");
  AnalysisContext rctx(r);
  Determinizer rdet(rctx);
  rdet.init(states(r, {"q0"}));
  CHECK(rdet.step_nonsep(1, states(r, {"q0"})) == w(r, "1"));
  CHECK(rdet.state().lag.at(r.state_index("q0")).empty());
  CHECK_THROWS(rdet.step_nonsep(2, states(r, {"q1"})));

  Nft z;
  z.input = Alphabet({"a"});
  z.output = Alphabet({"b"});
  z.add_state("s", true, true);
  z.add_transition(0, 0, 0, {});
  AnalysisContext zctx(z);
  Determinizer zdet(zctx);
  zdet.init({0});
  CHECK(zdet.step_nonsep(0, {0}).empty());
  CHECK(zdet.state().lag.at(0).empty());
}

TEST_CASE("step_sep_aligned example") {
  Nft d = fixture("double");
  AnalysisContext ctx(d);
  Determinizer det(ctx);
  det.init(states(d, {"q0"}));
  StateSet C = states(d, {"q1", "q2"});
  det.step_nonsep(0, C);
  int q1 = d.state_index("q1"), q2 = d.state_index("q2");
  // val(q1) = "0", val(q2) = "00"; nothing lags, so both go to last, and q2's
  // "000" is resized to θ·"0" with θ = "00".
  CHECK(det.step_sep_aligned(0, C).empty());
  CHECK(det.state().theta == w(d, "00"));
  CHECK(det.state().last.at(q1) == w(d, "0"));
  CHECK(det.state().last.at(q2) == w(d, "0"));
  CHECK(det.state().nb.at({C}).at(q2) == 1);
  CHECK(det.state().production({C, {q1}}) == w(d, "00"));
  CHECK(det.state().production({C, {q2}}) == w(d, "0000"));
  // One more letter gives q1 a full θ, so the root emits it.
  CHECK(det.step_sep_aligned(0, C) == w(d, "00"));
  CHECK(det.state().out == w(d, "000"));
  CHECK_THROWS(det.step_sep_aligned(1, states(d, {"q0"})));
}

TEST_CASE("run_pipeline examples") {
  Nft r = fixture("replace");
  auto res = run_pipeline(r, parse_up(r.input, "(001)^w"), 30);
  CHECK(res.out.size() >= 20);
  CHECK(is_prefix(res.out, parse_up(r.output, "(1)^w")));

  Nft d = fixture("double");
  auto dres = run_pipeline(d, parse_up(d.input, "002(0)^w"), 40);
  CHECK(is_prefix(dres.out, parse_up(d.output, "00002(0)^w")));
  CHECK(dres.out.size() >= 5);

  Nft n = fixture("normalize");
  CHECK_THROWS_AS(run_pipeline(n, parse_up(n.input, "(0)^w"), 10), NotContinuousError);
}

TEST_CASE("property: invariants and prefix soundness along the pipeline") {
  std::mt19937 rng(12);
  for (const char* name : {"replace", "double"}) {
    Nft T = fixture(name);
    for (const UPWord& x : corpus(rng, 8, std::string(name) == "replace")) {
      PipelineOptions opt;
      opt.check_invariants = true;
      opt.trace = true;
      auto res = run_pipeline(T, x, 120, opt);
      auto f = oracle_eval(T, x);
      REQUIRE(f);
      CHECK(is_prefix(res.out, *f));
      CHECK(max_window_count(res.trace, res.register_names.size()) <= 1);
    }
  }
}

TEST_CASE("resize_last examples") {
  Nft d = fixture("double");
  AnalysisContext ctx(d);
  Determinizer det(ctx);
  det.init(states(d, {"q0"}));
  StateSet C = states(d, {"q1", "q2"});
  det.step_nonsep(0, C);
  int q1 = d.state_index("q1"), q2 = d.state_index("q2");
  Word theta = det.state().theta;

  // last = θ²·w gives last = w and two more θ at the root.
  det.mutable_state().last[q2] = concat(power(theta, 2), w(d, "0"));
  det.resize_last();
  CHECK(det.state().last.at(q2) == w(d, "0"));
  CHECK(det.state().nb.at({C}).at(q2) == 2);
  CHECK(det.state().nb.at({C}).at(q1) == 0);

  // All root counts positive with empty max-lag: out takes θ^min.
  Word before = det.state().out;
  det.mutable_state().nb[{C}][q1] = 1;
  det.mutable_state().nb[{C}][q2] = 3;
  det.resize_last();
  CHECK(det.state().out == concat(before, theta));
  CHECK(det.state().nb.at({C}).at(q1) == 0);
  CHECK(det.state().nb.at({C}).at(q2) == 2);

  // Overflow above 2 moves to the children holding the state.
  det.mutable_state().nb[{C}][q2] = 4;
  det.resize_last();
  CHECK(det.state().nb.at({C}).at(q2) == 2);
  CHECK(det.state().regs.at({C, {q2}}) == power(theta, 2));
  CHECK(det.state().nb.at({C, {q2}}).at(q2) == 0);
  CHECK(det.state().regs.at({C, {q1}}).empty());
}

TEST_CASE("resize_last on an inner node") {
  Nft T = fixture("tree_compat");
  AnalysisContext ctx(T);
  Determinizer det(ctx);
  StateSet C = states(T, {"1", "2", "3"}), C12 = states(T, {"1", "2"});
  int s1 = T.state_index("1");
  std::mt19937 rng(0);
  rfw::testing::random_separable_state(rng, det, C, w(T, "xx"), 0);
  for (int q : C) {
    det.mutable_state().lag[q] = {};
    det.mutable_state().last[q] = {};
  }
  det.mutable_state().max_lag = {};
  det.mutable_state().out = {};
  det.mutable_state().nb[{C, C12}][s1] = 4;
  det.resize_last();
  CHECK(det.state().nb.at({C, C12}).at(s1) == 2);
  // The only child of {1,2} holding 1 is {1}; its 2 are emitted at once.
  CHECK(det.state().nb.at({C, C12, {s1}}).at(s1) == 0);
  CHECK(det.state().regs.at({C, C12, {s1}}) == w(T, "xxxx"));
  CHECK(det.state().out.empty());
}

TEST_CASE("preprocess close case") {
  Nft d = fixture("double");
  AnalysisContext ctx(d);
  Determinizer det(ctx);
  det.init(states(d, {"q0"}));
  StateSet C = states(d, {"q1", "q2"});
  int q1 = d.state_index("q1");
  det.step_nonsep(0, C);
  for (int k = 0; k < 7; ++k) det.step_sep_aligned(0, C);
  const auto& s = det.state();
  REQUIRE_FALSE(s.lagging(q1));
  Word expected = concat(concat(s.max_lag, s.regs.at({C, {q1}})),
                         concat(power(s.theta, static_cast<std::size_t>(s.nb.at({C}).at(q1) + s.nb.at({C, {q1}}).at(q1))), s.last.at(q1)));
  Word out = s.out;
  std::string kind;
  Word emitted = det.preprocess(1, states(d, {"q0"}), kind);
  CHECK(kind == "close");
  CHECK(emitted == expected);
  CHECK(det.state().C == StateSet{q1});
  CHECK_FALSE(det.state().separable);
  CHECK(det.state().out == concat(out, emitted));
  CHECK(det.step_nonsep(1, states(d, {"q0"})) == w(d, "1"));
  CHECK_THROWS(det.preprocess(0, states(d, {"q1"}), kind));
}

TEST_CASE("preprocess non-close case") {
  Nft T = fixture("three_rates");
  AnalysisContext ctx(prepare_transducer(T));
  const Nft& N = ctx.nft();
  UPWord x = parse_up(N.input, std::string(60, 'a') + "b(a)^w");
  auto sets = annotate(ctx, x, 61);
  Determinizer det(ctx);
  det.init(sets[0]);
  for (std::size_t i = 0; i < 60; ++i) det.step(at(x, i), sets[i + 1]);
  DeterminizerState before = det.state();
  REQUIRE(before.separable);
  StateSet C = before.C, Cp = sets[61];
  REQUIRE(Cp.size() == 2);
  std::string kind;
  Word emitted = det.preprocess(N.input.find("b"), sets[61], kind);
  CHECK(kind == "nonclose");
  const auto& s = det.state();
  CHECK(s.C == Cp);
  std::vector<Word> lags;
  for (int q : Cp) lags.push_back(before.lag.at(q));
  CHECK(emitted == concat(lcp(lags), before.regs.at({C, Cp})));
  for (const TreePath& p : tree_of(ctx, Cp)) {
    TreePath old{C};
    old.insert(old.end(), p.begin(), p.end());
    CHECK(s.nb.at(p) == before.nb.at(old));
    if (p.size() > 1) CHECK(s.regs.at(p) == before.regs.at(old));
  }
  for (int q : Cp)
    CHECK(s.last.at(q) == concat(power(before.theta, static_cast<std::size_t>(before.nb.at({C}).at(q))), before.last.at(q)));
}

TEST_CASE("property: resize_last preserves the production equation") {
  std::mt19937 rng(77);
  Nft T = fixture("tree_compat"), R = fixture("three_rates");
  AnalysisContext ctx(T), rctx(R);
  Determinizer det(ctx), rdet(rctx);
  int pushed = 0;
  for (int k = 0; k < 200; ++k) {
    bool first = k % 2 == 0;
    Determinizer& D = first ? det : rdet;
    StateSet C = first ? states(T, {"1", "2", "3"}) : states(R, {"p1", "p2", "p3"});
    Word theta = first ? w(T, "xxx") : w(R, "xyx");
    rfw::testing::random_separable_state(rng, D, C, theta, static_cast<int>(rng() % 4));
    DeterminizerState before = D.state();
    D.resize_last();
    const DeterminizerState& after = D.state();
    for (const auto& [p, m] : before.nb) {
      if (p.back().size() == 1) CHECK(after.production(p) == before.production(p));
      if (p.size() > 1) {
        CHECK(is_prefix(before.regs.at(p), after.regs.at(p)));
        for (const auto& [q, n] : after.nb.at(p)) {
          CHECK(n >= 0);
          CHECK(n <= 2);
        }
      }
      pushed += after.nb.at(p) != before.nb.at(p);
    }
    for (int q : C) CHECK(after.last.at(q).size() < theta.size());
  }
  CHECK(pushed > 50);
}

TEST_CASE("property: invariants on the three-rate transducer") {
  Nft T = fixture("three_rates");
  std::mt19937 rng(3);
  std::map<std::string, int> kinds;
  for (int k = 0; k < 12; ++k) {
    std::string s = std::string(10 + rng() % 60, 'a');
    const char* tails[] = {"b(a)^w", "c(a)^w", "d(e)^w", "(a)^w", "b(ab)^w", "(ae)^w"};
    s += std::string(rng() % 2 ? "b" : "") + std::string(rng() % 30, 'a') + tails[rng() % 6];
    UPWord x = parse_up(T.input, s);
    auto f = oracle_eval(T, x);
    if (!f) continue;
    PipelineOptions opt;
    opt.check_invariants = true;
    opt.trace = true;
    auto res = run_pipeline(T, x, 120, opt);
    CHECK(is_prefix(res.out, *f));
    CHECK(max_window_count(res.trace, res.register_names.size()) <= 1);
    for (const auto& t : res.trace) kinds[t.kind]++;
  }
  CHECK(kinds["nonclose"] > 0);
  CHECK(kinds["close"] > 0);
  CHECK(kinds["aligned"] > 0);
}

TEST_CASE("trace lines") {
  Nft d = fixture("double");
  PipelineOptions opt;
  opt.trace = true;
  auto res = run_pipeline(d, parse_up(d.input, "(001)^w"), 6, opt);
  REQUIRE(res.trace.size() == 7);
  CHECK(res.trace[0].kind == "init");
  for (const auto& t : res.trace) {
    CHECK(t.json.find("\"mode\"") != std::string::npos);
    CHECK(t.json.find("\"max_lag\"") != std::string::npos);
    CHECK(t.json.find("\"emitted\"") != std::string::npos);
  }
  Word all;
  for (const auto& t : res.trace) all = concat(all, t.emitted);
  CHECK(all == res.out);
}
