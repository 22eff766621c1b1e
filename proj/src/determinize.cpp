#include "rfw/determinize.hpp"

#include <algorithm>
#include <deque>
#include <json.hpp>

#include "rfw/annotator.hpp"

namespace rfw {

namespace {

using nlohmann::json;

StateSet image(const std::map<int, int>& f, const StateSet& S) {
  std::vector<int> r;
  for (int q : S) r.push_back(f.at(q));
  return make_set(std::move(r));
}

Word theta_power(const Word& theta, std::size_t n) { return power(theta, n); }

bool in_theta_star(const Word& w, const Word& theta) {
  if (theta.empty()) return w.empty();
  return w.size() % theta.size() == 0 && w == power(theta, w.size() / theta.size());
}

std::string path_name(const Nft& T, const TreePath& p) {
  std::string r;
  for (std::size_t i = 0; i < p.size(); ++i) r += (i ? "/" : "") + T.set_name(p[i]);
  return r;
}

}  // namespace

std::vector<TreePath> tree_of(AnalysisContext& ctx, const StateSet& C) {
  std::vector<TreePath> paths{{C}};
  for (std::size_t k = 0; k < paths.size(); ++k) {
    StateSet last = paths[k].back();
    for (const StateSet& D : ctx.comp_subsets(last)) {
      if (D.empty() || D == last) continue;
      TreePath p = paths[k];
      p.push_back(D);
      paths.push_back(std::move(p));
    }
  }
  return paths;
}

bool DeterminizerState::lagging(int q) const { return lag.at(q).size() < max_lag.size(); }

Word DeterminizerState::production(const TreePath& path) const {
  int q = path.back().front();
  if (lagging(q)) return concat(out, lag.at(q));
  Word w = concat(out, max_lag);
  for (std::size_t i = 1; i <= path.size(); ++i) {
    TreePath p(path.begin(), path.begin() + static_cast<long>(i));
    if (i > 1) w = concat(w, regs.at(p));
    w = concat(w, power(theta, static_cast<std::size_t>(nb.at(p).at(q))));
  }
  return concat(w, last.at(q));
}

Determinizer::Determinizer(AnalysisContext& ctx) : ctx_(ctx) { reg_id({}); }

const std::vector<TreePath>& Determinizer::tree(const StateSet& C) {
  auto it = trees_.find(C);
  if (it == trees_.end()) it = trees_.emplace(C, tree_of(ctx_, C)).first;
  return it->second;
}

int Determinizer::reg_id(const TreePath& p) {
  auto [it, fresh] = reg_ids_.emplace(p, static_cast<int>(reg_names_.size()));
  if (fresh) reg_names_.push_back(p);
  return it->second;
}

void Determinizer::begin() {
  if (depth_++ > 0) return;
  sym_.clear();
  start_store_.clear();
  start_store_[0] = s_.out;
  sym_[{}] = {reg_sym(0)};
  for (const auto& [p, w] : s_.regs) {
    int id = reg_id(p);
    start_store_[id] = w;
    sym_[p] = {reg_sym(id)};
  }
  start_out_len_ = s_.out.size();
}

RegWord& Determinizer::sym(const TreePath& p) { return sym_.at(p.size() <= 1 ? TreePath{} : p); }

bool Determinizer::reg_empty(const TreePath& p) const {
  for (const Sym& s : sym_.at(p.size() <= 1 ? TreePath{} : p))
    if (!s.is_reg || !start_store_.at(s.id).empty()) return false;
  return true;
}

void Determinizer::append_word(const TreePath& p, const Word& w) {
  RegWord& r = sym(p);
  for (Letter a : w) r.push_back(letter_sym(a));
}

Word Determinizer::power_theta(std::size_t n) const { return theta_power(s_.theta, n); }

Word Determinizer::commit(const std::string& kind) {
  if (--depth_ > 0) return {};
  auto value = [&](const RegWord& w) {
    Word r;
    for (const Sym& s : w) {
      if (!s.is_reg) {
        r.push_back(s.id);
        continue;
      }
      const Word& v = start_store_.at(s.id);
      r.insert(r.end(), v.begin(), v.end());
    }
    return r;
  };
  TraceStep t;
  s_.regs.clear();
  for (const auto& [p, w] : sym_) {
    if (p.empty())
      s_.out = value(w);
    else
      s_.regs[p] = value(w);
    if (trace_on_) t.update[reg_id(p)] = w;
  }
  if (s_.out.size() < start_out_len_) throw std::logic_error("out register shrank");
  Word emitted = drop(s_.out, start_out_len_);
  if (trace_on_) {
    const Nft& T = ctx_.nft();
    t.index = letters_;
    t.separable = s_.separable;
    t.C = s_.C;
    t.emitted = emitted;
    t.kind = kind;
    json j;
    j["i"] = letters_;
    j["kind"] = kind;
    j["mode"] = s_.separable ? "separable" : "non-separable";
    json C = json::array();
    for (int q : s_.C) C.push_back(T.state_name(q));
    j["C"] = C;
    json lag = json::object();
    for (const auto& [q, w] : s_.lag) lag[T.state_name(q)] = T.output.render(w);
    j["lag"] = lag;
    j["max_lag"] = T.output.render(s_.max_lag);
    json nb = json::object();
    for (const auto& [p, m] : s_.nb) {
      json counts = json::object();
      for (const auto& [q, n] : m)
        if (n) counts[T.state_name(q)] = n;
      if (!counts.empty()) nb[path_name(T, p)] = counts;
    }
    j["nb"] = nb;
    j["emitted"] = T.output.render(emitted);
    t.json = j.dump();
    trace_.push_back(std::move(t));
  }
  return emitted;
}

Word Determinizer::init(const StateSet& C0) {
  if (!ctx_.is_compatible(C0)) throw std::invalid_argument("initial set " + ctx_.nft().set_name(C0) + " is not compatible");
  s_ = DeterminizerState{};
  letters_ = 0;
  begin();
  s_.J = s_.C = C0;
  for (int q : C0) {
    s_.pre[q] = q;
    s_.lag[q] = {};
  }
  if (ctx_.is_separable(C0)) {
    AdvanceProfile profile = advance_profile(s_.lag);
    LoopingFuture f = ctx_.looping_future(C0, profile);
    s_.separable = true;
    s_.max_lag = f.tau;
    s_.theta = f.theta;
    for (const TreePath& p : tree(C0)) {
      for (int q : p.back()) s_.nb[p][q] = 0;
      if (p.size() > 1) sym_[p] = {};
    }
    for (int q : C0) s_.last[q] = {};
  }
  return commit("init");
}

void Determinizer::enter_separable(const std::map<int, Word>& alpha) {
  LoopingFuture f = ctx_.looping_future(s_.C, advance_profile(alpha));
  s_.separable = true;
  s_.max_lag = f.tau;
  s_.theta = f.theta;
  std::size_t k = f.tau.size();
  s_.lag.clear();
  s_.last.clear();
  for (const auto& [q, a] : alpha) {
    s_.lag[q] = take(UPWord{a, {}}, std::min(k, a.size()));
    s_.last[q] = drop(a, k);
  }
  s_.nb.clear();
  for (auto it = sym_.begin(); it != sym_.end();) it = it->first.empty() ? std::next(it) : sym_.erase(it);
  for (const TreePath& p : tree(s_.C)) {
    for (int q : p.back()) s_.nb[p][q] = 0;
    if (p.size() > 1) sym_[p] = {};
  }
  resize_last();
}

void Determinizer::leave_separable(const std::map<int, Word>& alpha) {
  s_.separable = false;
  s_.lag = alpha;
  s_.max_lag.clear();
  s_.theta.clear();
  s_.nb.clear();
  s_.last.clear();
  for (auto it = sym_.begin(); it != sym_.end();) it = it->first.empty() ? std::next(it) : sym_.erase(it);
}

Word Determinizer::step_nonsep(Letter a, const StateSet& next) {
  if (s_.separable) throw std::logic_error("step_nonsep in separable mode");
  auto st = analyze_step(ctx_.nft(), s_.C, {a}, next);
  if (!st) throw std::invalid_argument("not a pre-step");
  begin();
  std::map<int, Word> delta;
  for (int q : next) delta[q] = concat(s_.lag.at(st->pre.at(q)), st->val.at(q));
  AdvanceProfile profile = advance_profile(delta);
  append_word({}, profile.common);
  std::map<int, int> pre;
  for (int q : next) pre[q] = s_.pre.at(st->pre.at(q));
  s_.pre = pre;
  s_.C = next;
  s_.J = image(s_.pre, next);
  if (ctx_.is_separable(next))
    enter_separable(profile.advance);
  else
    leave_separable(profile.advance);
  return commit("nonsep");
}

void Determinizer::down(const TreePath& path) {
  auto& nbp = s_.nb.at(path);
  const StateSet& Cn = path.back();
  int m = nbp.at(Cn.front());
  for (int q : Cn) m = std::min(m, nbp.at(q));
  if (m > 0) {
    if (path.size() == 1 && !s_.max_lag.empty()) throw InvariantViolation("4e", "root emits θ while max-lag is nonempty");
    append_word(path, power_theta(static_cast<std::size_t>(m)));
    for (int q : Cn) nbp[q] -= m;
  }
  std::vector<TreePath> children;
  for (const StateSet& D : ctx_.comp_subsets(Cn)) {
    if (D.empty() || D == Cn) continue;
    TreePath c = path;
    c.push_back(D);
    children.push_back(std::move(c));
  }
  for (int q : Cn) {
    int& v = s_.nb.at(path).at(q);
    if (v <= 2) continue;
    for (const TreePath& c : children)
      if (contains(c.back(), q)) s_.nb.at(c).at(q) += v - 2;
    v = 2;
  }
  for (const TreePath& c : children) down(c);
}

void Determinizer::resize_last() {
  if (!s_.separable) return;
  begin();
  std::size_t Th = s_.theta.size();
  TreePath root{s_.C};
  for (int q : s_.C) {
    Word& l = s_.last.at(q);
    std::size_t n = l.size() / Th;
    if (!is_prefix(power_theta(n), l)) throw InvariantViolation("4c", "last is not a prefix of θ^ω");
    l = drop(l, n * Th);
    s_.nb.at(root).at(q) += static_cast<int>(n);
  }
  down(root);
  commit("resize");
}

Word Determinizer::step_sep_aligned(Letter a, const StateSet& next) {
  if (!s_.separable) throw std::logic_error("aligned step in non-separable mode");
  auto st = analyze_step(ctx_.nft(), s_.C, {a}, next);
  if (!st || !st->step) throw std::invalid_argument("not a step");
  begin();
  std::map<TreePath, std::map<int, int>> nb;
  std::map<TreePath, RegWord> regs;
  regs[{}] = sym_.at({});
  for (const TreePath& pi : tree(next)) {
    std::size_t n = pi.size();
    std::vector<StateSet> img;
    for (const StateSet& D : pi) img.push_back(image(st->pre, D));
    TreePath rho;
    for (std::size_t i = 0; i < n; ++i)
      if (i == 0 || img[i] != img[i - 1]) rho.push_back(img[i]);
    bool keep = n == 1 || img[n - 1] != img[n - 2];
    for (int q : pi.back()) nb[pi][q] = keep ? s_.nb.at(rho).at(st->pre.at(q)) : 0;
    if (n > 1) regs[pi] = keep ? sym_.at(rho) : RegWord{};
  }
  std::map<int, Word> lag, last;
  for (int q : next) {
    int p = st->pre.at(q);
    const Word& v = st->val.at(q);
    const Word& lp = s_.lag.at(p);
    if (!is_prefix(lp, s_.max_lag)) throw InvariantViolation("4a", "lag is not a prefix of max-lag");
    std::size_t k = s_.max_lag.size() - lp.size();
    lag[q] = concat(lp, Word(v.begin(), v.begin() + static_cast<long>(std::min(k, v.size()))));
    last[q] = concat(s_.last.at(p), drop(v, k));
  }
  std::vector<Word> lags;
  for (const auto& [q, w] : lag) lags.push_back(w);
  Word c = lcp(lags);
  for (auto& [q, w] : lag) w = drop(w, c.size());
  s_.max_lag = drop(s_.max_lag, c.size());
  sym_ = std::move(regs);
  append_word({}, c);
  s_.nb = std::move(nb);
  s_.lag = std::move(lag);
  s_.last = std::move(last);
  std::map<int, int> pre;
  for (int q : next) pre[q] = s_.pre.at(st->pre.at(q));
  s_.pre = pre;
  s_.C = next;
  s_.J = image(s_.pre, next);
  resize_last();
  return commit("aligned");
}

Word Determinizer::preprocess(Letter a, const StateSet& next, std::string& kind) {
  if (!s_.separable) throw std::logic_error("preprocess in non-separable mode");
  auto st = analyze_step(ctx_.nft(), s_.C, {a}, next);
  if (!st) throw std::invalid_argument("not a pre-step");
  StateSet Cp = image(st->pre, next);
  if (Cp == s_.C) throw std::invalid_argument("preprocess on a step");
  begin();
  TreePath root{s_.C}, pi{s_.C, Cp};
  bool close = true;
  for (const TreePath& p : tree(s_.C)) {
    if (p.size() <= pi.size() || !std::equal(pi.begin(), pi.end(), p.begin())) continue;
    for (const auto& [q, n] : s_.nb.at(p))
      if (n) close = false;
    if (!reg_empty(p)) close = false;
  }
  auto restrict_to = [&] {
    std::map<int, int> pre;
    for (int q : Cp) pre[q] = s_.pre.at(q);
    s_.pre = pre;
    s_.C = Cp;
    s_.J = image(s_.pre, Cp);
  };
  if (close) {
    kind = "close";
    bool any_lagging = std::any_of(Cp.begin(), Cp.end(), [&](int q) { return s_.lagging(q); });
    std::map<int, Word> delta;
    for (int q : Cp) {
      std::size_t n = static_cast<std::size_t>(s_.nb.at(root).at(q) + s_.nb.at(pi).at(q));
      delta[q] = concat(concat(any_lagging ? s_.lag.at(q) : Word{}, power_theta(n)), s_.last.at(q));
    }
    AdvanceProfile profile = advance_profile(delta);
    if (!any_lagging) {
      append_word({}, s_.max_lag);
      RegWord moved = sym_.at(pi);
      RegWord& out = sym_.at({});
      out.insert(out.end(), moved.begin(), moved.end());
    }
    append_word({}, profile.common);
    restrict_to();
    if (ctx_.is_separable(Cp))
      enter_separable(profile.advance);
    else
      leave_separable(profile.advance);
  } else {
    kind = "nonclose";
    std::vector<Word> lags;
    for (int q : Cp) lags.push_back(s_.lag.at(q));
    Word c = lcp(lags);
    append_word({}, c);
    {
      RegWord moved = sym_.at(pi);
      RegWord& out = sym_.at({});
      out.insert(out.end(), moved.begin(), moved.end());
    }
    std::map<int, Word> lag, last;
    for (int q : Cp) {
      lag[q] = drop(s_.lag.at(q), c.size());
      last[q] = concat(power_theta(static_cast<std::size_t>(s_.nb.at(root).at(q))), s_.last.at(q));
    }
    s_.max_lag = drop(s_.max_lag, c.size());
    std::map<TreePath, std::map<int, int>> nb;
    std::map<TreePath, RegWord> regs;
    regs[{}] = sym_.at({});
    for (const TreePath& p : tree(Cp)) {
      TreePath old{s_.C};
      old.insert(old.end(), p.begin(), p.end());
      nb[p] = s_.nb.at(old);
      if (p.size() > 1) regs[p] = sym_.at(old);
    }
    sym_ = std::move(regs);
    s_.nb = std::move(nb);
    s_.lag = std::move(lag);
    s_.last = std::move(last);
    restrict_to();
  }
  return commit(kind);
}

Word Determinizer::step(Letter a, const StateSet& next) {
  begin();
  ++letters_;
  std::string kind;
  if (!s_.separable) {
    kind = "nonsep";
    step_nonsep(a, next);
  } else {
    auto st = analyze_step(ctx_.nft(), s_.C, {a}, next);
    if (!st) throw std::invalid_argument("not a pre-step");
    if (st->step) {
      kind = "aligned";
      step_sep_aligned(a, next);
    } else {
      preprocess(a, next, kind);
      if (s_.separable)
        step_sep_aligned(a, next);
      else
        step_nonsep(a, next);
    }
  }
  return commit(kind);
}

// ---------------------------------------------------------------------------

InvariantChecker::InvariantChecker(AnalysisContext& ctx) : ctx_(ctx) {
  std::size_t k = ctx.nft().input.size();
  for (Letter a = 0; a < static_cast<Letter>(k); ++a) {
    futures_.push_back({a});
    for (Letter b = 0; b < static_cast<Letter>(k); ++b) futures_.push_back({a, b});
    futures_.push_back({a, a, a});
    futures_.push_back({a, a, a, a});
  }
}

void InvariantChecker::start(const StateSet& C0) {
  prefix_.clear();
  sets_ = {C0};
  back_ = {{}};
  vals_.assign(1, {});
  origin_.assign(1, {});
  witness_.clear();
  for (int q : C0) {
    vals_[0][q] = {};
    origin_[0][q] = q;
  }
}

void InvariantChecker::advance(Letter a, const StateSet& next) {
  auto st = analyze_step(ctx_.nft(), sets_.back(), {a}, next);
  if (!st) throw InvariantViolation("1", "annotated sets do not form a pre-step");
  std::map<int, Word> vals;
  std::map<int, int> origin;
  for (int q : next) {
    int p = st->pre.at(q);
    vals[q] = concat(vals_.back().at(p), st->val.at(q));
    origin[q] = origin_.back().at(p);
  }
  prefix_.push_back(a);
  sets_.push_back(next);
  back_.push_back(st->pre);
  vals_.push_back(std::move(vals));
  origin_.push_back(std::move(origin));
}

void InvariantChecker::check(const DeterminizerState& s) {
  const Nft& T = ctx_.nft();
  std::size_t i = prefix_.size();
  auto fail = [&](const std::string& id, const std::string& what) {
    throw InvariantViolation(id, what + " after " + std::to_string(i) + " letters");
  };

  if (s.C != sets_.back()) fail("1", "C differs from the annotation");

  // Invariant 2: unique runs from J, with origins given by pre.
  for (int q : s.J)
    if (!T.is_initial(q)) fail("2", "J is not a subset of I");
  int n = T.num_states();
  std::vector<int> count(static_cast<std::size_t>(n), 0), from(static_cast<std::size_t>(n), -1);
  for (int q : s.J) {
    count[static_cast<std::size_t>(q)] = 1;
    from[static_cast<std::size_t>(q)] = q;
  }
  for (Letter a : prefix_) {
    std::vector<int> c2(static_cast<std::size_t>(n), 0), f2(static_cast<std::size_t>(n), -1);
    for (int p = 0; p < n; ++p) {
      if (!count[static_cast<std::size_t>(p)]) continue;
      for (int t : T.out_of(p, a)) {
        auto to = static_cast<std::size_t>(T.transition(t).to);
        c2[to] = std::min(2, c2[to] + count[static_cast<std::size_t>(p)]);
        f2[to] = from[static_cast<std::size_t>(p)];
      }
    }
    count = std::move(c2);
    from = std::move(f2);
  }
  for (int q : s.C) {
    if (count[static_cast<std::size_t>(q)] != 1) fail("2", "state " + T.state_name(q) + " has no unique run from J");
    if (from[static_cast<std::size_t>(q)] != s.pre.at(q)) fail("2", "pre disagrees with the run of " + T.state_name(q));
  }
  StateSet img;
  for (int q : s.C) img.push_back(s.pre.at(q));
  if (make_set(img) != s.J) fail("2", "pre is not onto J");

  const auto& V = vals_.back();
  if (!s.separable) {
    AdvanceProfile profile = advance_profile(V);
    if (s.out != profile.common) fail("3", "out differs from the common production");
    for (int q : s.C)
      if (s.lag.at(q) != profile.advance.at(q)) fail("3", "lag differs from the advance of " + T.state_name(q));
    return;
  }

  const Word& th = s.theta;
  UPWord theta_w = canonicalize(Word{}, th);
  bool some_empty = false;
  for (int q : s.C) {
    if (!is_prefix(s.lag.at(q), s.max_lag)) fail("4a", "lag of " + T.state_name(q) + " is not a prefix of max-lag");
    some_empty = some_empty || s.lag.at(q).empty();
  }
  if (!some_empty) fail("4a", "no empty lag");
  for (const auto& [p, w] : s.regs)
    if (!in_theta_star(w, th)) fail("4b", "register " + path_name(T, p) + " is not in θ*");
  for (int q : s.C) {
    const Word& l = s.last.at(q);
    if (!is_prefix(l, theta_w)) fail("4c", "last of " + T.state_name(q) + " is not a prefix of θ^ω");
  }
  for (int q : s.C) {
    if (!s.lagging(q)) continue;
    if (!s.last.at(q).empty()) fail("4d", "lagging " + T.state_name(q) + " has nonempty last");
    for (const auto& [p, m] : s.nb) {
      if (!contains(p.back(), q)) continue;
      if (m.at(q)) fail("4d", "lagging " + T.state_name(q) + " has nb > 0 on " + path_name(T, p));
      if (p.size() > 1 && !s.regs.at(p).empty()) fail("4d", "lagging " + T.state_name(q) + " under nonempty " + path_name(T, p));
    }
  }
  for (const auto& [p, m] : s.nb) {
    if (p.back().size() != 1) continue;
    if (s.production(p) != V.at(p.back().front())) fail("4e", "production equation fails on " + path_name(T, p));
  }

  // Invariant 4f on short future steps.
  UPWord bound = concat(s.max_lag, theta_w);
  for (int q : s.C)
    if (!is_prefix(s.out, V.at(q))) fail("4f", "out is not a prefix of the production of " + T.state_name(q));
  for (const Word& u : futures_) {
    StateSet S = push(T, s.C, u);
    for (const StateSet& D : ctx_.comp_subsets(S)) {
      auto st = analyze_step(T, s.C, u, D);
      if (!st || !st->step) continue;
      for (int q : D) {
        Word w = concat(drop(V.at(st->pre.at(q)), s.out.size()), st->val.at(q));
        if (!is_prefix(w, bound)) fail("4f", "future production exceeds out·max-lag·θ^ω");
      }
    }
  }

  // Invariant 4g: non-close paths have an early large advance.
  std::size_t need = 2 * th.size();
  for (const auto& [p, m] : s.nb) {
    bool close = true;
    for (const auto& [p2, m2] : s.nb) {
      if (p2.size() <= p.size() || !std::equal(p.begin(), p.end(), p2.begin())) continue;
      for (const auto& [q, v] : m2)
        if (v) close = false;
      if (!s.regs.at(p2).empty()) close = false;
    }
    if (close) continue;
    const StateSet& Cn = p.back();
    std::vector<StateSet> E(i + 1);
    E[i] = Cn;
    for (std::size_t j = i; j > 0; --j) E[j - 1] = image(back_[j], E[j]);
    auto large = [&](std::size_t j) {
      std::vector<Word> ws;
      std::size_t longest = 0;
      for (int e : E[j]) {
        ws.push_back(vals_[j].at(e));
        longest = std::max(longest, ws.back().size());
      }
      return longest - lcp(ws).size() >= need;
    };
    auto w = witness_.find(Cn);
    if (w != witness_.end() && w->second <= i && large(w->second)) continue;
    bool found = false;
    for (std::size_t j = i + 1; j-- > 0;)
      if (large(j)) {
        witness_[Cn] = j;
        found = true;
        break;
      }
    if (!found) fail("4g", "non-close path " + path_name(T, p) + " has no decomposition");
  }
}

// ---------------------------------------------------------------------------

Nft prepare_transducer(const Nft& T) {
  if (!is_unambiguous(T)) throw std::invalid_argument("transducer is ambiguous");
  Nft N = clean(T);
  auto c = is_continuous(N);
  if (!c.continuous) throw NotContinuousError("not continuous", *c.witness);
  return trim(make_productive(N));
}

Pipeline::Pipeline(const Nft& T, const PipelineOptions& opt)
    : ctx_(std::make_unique<AnalysisContext>(prepare_transducer(T), opt.theta)), ann_(*ctx_, opt.max_lookahead), det_(*ctx_) {
  det_.set_trace(opt.trace);
  if (opt.check_invariants) checker_.emplace(*ctx_);
  auto first = ann_.start();
  ready_.insert(ready_.end(), first.begin(), first.end());
}

void Pipeline::push(Letter a) {
  auto sets = ann_.feed(a);
  ready_.insert(ready_.end(), sets.begin(), sets.end());
  letters_.push_back(a);
  ++pushed_;
}

bool Pipeline::advance() {
  if (ready_.empty() || (started_ && letters_.empty())) return false;
  StateSet C = ready_.front();
  ready_.pop_front();
  annotation_.push_back(C);
  if (!started_) {
    started_ = true;
    det_.init(C);
    if (checker_) {
      checker_->start(C);
      checker_->check(det_.state());
    }
  } else {
    Letter a = letters_.front();
    letters_.pop_front();
    det_.step(a, C);
    if (checker_) {
      checker_->advance(a, C);
      checker_->check(det_.state());
    }
  }
  out_lengths_.push_back(det_.state().out.size());
  return true;
}

PipelineResult run_pipeline(const Nft& T, const UPWord& x, std::size_t letters, const PipelineOptions& opt) {
  Pipeline p(T, opt);
  std::size_t fed = 0;
  while (!p.started() || p.steps() < letters)
    if (!p.advance()) p.push(at(x, fed++));
  PipelineResult r;
  r.theta_length = p.theta_length();
  r.out = p.out();
  r.out_lengths = p.out_lengths();
  r.annotation = p.annotation();
  r.trace = p.determinizer().trace();
  r.register_names = p.determinizer().register_names();
  return r;
}

int max_window_count(const std::vector<TraceStep>& trace, std::size_t registers) {
  std::vector<CountingMatrix> ms;
  for (const TraceStep& t : trace) {
    Substitution s = Substitution::empty(registers);
    for (const auto& [id, w] : t.update) s.assign.at(static_cast<std::size_t>(id)) = w;
    ms.push_back(counting_matrix(s, 2));
  }
  int worst = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CountingMatrix m = ms[i];
    worst = std::max(worst, m.max_entry());
    for (std::size_t j = i + 1; j < ms.size() && worst < 2; ++j) {
      m = multiply(m, ms[j]);
      worst = std::max(worst, m.max_entry());
    }
  }
  return worst;
}

}  // namespace rfw
