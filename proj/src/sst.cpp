#include "rfw/sst.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace rfw {

Substitution Substitution::identity(std::size_t registers) {
  Substitution s;
  for (std::size_t r = 0; r < registers; ++r) s.assign.push_back({reg_sym(static_cast<int>(r))});
  return s;
}

Substitution Substitution::empty(std::size_t registers) {
  Substitution s;
  s.assign.resize(registers);
  return s;
}

RegWord apply(const Substitution& s, const RegWord& w) {
  RegWord out;
  for (const Sym& x : w) {
    if (!x.is_reg) {
      out.push_back(x);
      continue;
    }
    if (x.id < 0 || static_cast<std::size_t>(x.id) >= s.assign.size()) throw std::invalid_argument("unknown register");
    const auto& v = s.assign[static_cast<std::size_t>(x.id)];
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
  if (s1.assign.size() != s2.assign.size()) throw std::invalid_argument("substitutions over different registers");
  Substitution r;
  for (const auto& w : s2.assign) r.assign.push_back(rfw::apply(s1, w));
  return r;
}

std::vector<Word> apply(const Substitution& s, const std::vector<Word>& regs) {
  std::vector<Word> next(s.assign.size());
  for (std::size_t r = 0; r < s.assign.size(); ++r)
    for (const Sym& x : s.assign[r]) {
      if (!x.is_reg) {
        next[r].push_back(x.id);
        continue;
      }
      const Word& v = regs.at(static_cast<std::size_t>(x.id));
      next[r].insert(next[r].end(), v.begin(), v.end());
    }
  return next;
}

int CountingMatrix::max_entry() const { return cell.empty() ? 0 : *std::max_element(cell.begin(), cell.end()); }

int CountingMatrix::max_row_sum() const {
  int best = 0;
  for (std::size_t r = 0; r < n; ++r) {
    int s = 0;
    for (std::size_t c = 0; c < n; ++c) s += at(r, c);
    best = std::max(best, s);
  }
  return best;
}

CountingMatrix counting_matrix(const Substitution& s, int cap) {
  CountingMatrix m;
  m.n = s.assign.size();
  m.cap = cap;
  m.cell.assign(m.n * m.n, 0);
  for (std::size_t c = 0; c < m.n; ++c)
    for (const Sym& x : s.assign[c])
      if (x.is_reg) {
        int& v = m.cell[static_cast<std::size_t>(x.id) * m.n + c];
        v = std::min(cap, v + 1);
      }
  return m;
}

CountingMatrix multiply(const CountingMatrix& m1, const CountingMatrix& m2) {
  // |s1 o s2 (s)|_r = sum_t |s2(s)|_t |s1(t)|_r
  CountingMatrix m;
  m.n = m1.n;
  m.cap = m1.cap;
  m.cell.assign(m.n * m.n, 0);
  for (std::size_t r = 0; r < m.n; ++r)
    for (std::size_t s = 0; s < m.n; ++s) {
      long v = 0;
      for (std::size_t t = 0; t < m.n; ++t) v += static_cast<long>(m1.at(r, t)) * m2.at(t, s);
      m.cell[r * m.n + s] = static_cast<int>(std::min<long>(m.cap, v));
    }
  return m;
}

bool is_copyless(const Substitution& s) { return counting_matrix(s, 2).max_row_sum() <= 1; }

bool is_k_bounded(const Substitution& s, int K) { return counting_matrix(s, K + 1).max_entry() <= K; }

int Dsst::add_state(const std::string& name) {
  if (state_index(name) >= 0) throw std::invalid_argument("duplicate state '" + name + "'");
  states_.push_back(name);
  edges_.emplace_back(input.size());
  return static_cast<int>(states_.size()) - 1;
}

int Dsst::add_register(const std::string& name) {
  if (register_index(name) >= 0) throw std::invalid_argument("duplicate register '" + name + "'");
  registers_.push_back(name);
  return static_cast<int>(registers_.size()) - 1;
}

int Dsst::state_index(const std::string& name) const {
  auto it = std::find(states_.begin(), states_.end(), name);
  return it == states_.end() ? -1 : static_cast<int>(it - states_.begin());
}

int Dsst::register_index(const std::string& name) const {
  auto it = std::find(registers_.begin(), registers_.end(), name);
  return it == registers_.end() ? -1 : static_cast<int>(it - registers_.begin());
}

void Dsst::set_edge(int q, Letter a, int to, Substitution update) {
  if (q < 0 || q >= num_states() || to < 0 || to >= num_states()) throw std::invalid_argument("unknown state");
  if (a < 0 || static_cast<std::size_t>(a) >= input.size()) throw std::invalid_argument("unknown letter");
  if (update.assign.size() != registers_.size()) throw std::invalid_argument("update over the wrong registers");
  for (std::size_t r = 0; r < update.assign.size(); ++r)
    for (std::size_t k = 0; k < update.assign[r].size(); ++k) {
      const Sym& x = update.assign[r][k];
      if (x.is_reg && (x.id < 0 || static_cast<std::size_t>(x.id) >= registers_.size())) throw std::invalid_argument("unknown register");
      if (!x.is_reg && (x.id < 0 || static_cast<std::size_t>(x.id) >= output.size())) throw std::invalid_argument("unknown output letter");
      bool is_out = x.is_reg && x.id == out_;
      bool allowed = static_cast<int>(r) == out_ && k == 0;
      if (is_out && !allowed) throw std::invalid_argument("out may only occur first in its own update");
    }
  const auto& o = update.assign[static_cast<std::size_t>(out_)];
  if (o.empty() || !(o[0] == reg_sym(out_))) throw std::invalid_argument("update of out must start with out");
  edges_[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)] = SstEdge{to, std::move(update)};
}

const SstEdge* Dsst::edge(int q, Letter a) const {
  const auto& e = edges_.at(static_cast<std::size_t>(q)).at(static_cast<std::size_t>(a));
  return e ? &*e : nullptr;
}

std::string Dsst::render(const RegWord& w) const {
  std::vector<std::string> tokens;
  Word run;
  auto flush = [&]() {
    if (!run.empty()) tokens.push_back(output.render(run));
    run.clear();
  };
  for (const Sym& x : w) {
    if (x.is_reg) {
      flush();
      tokens.push_back("$" + register_name(x.id));
    } else {
      run.push_back(x.id);
    }
  }
  flush();
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) s += (i ? " " : "") + tokens[i];
  return s;
}

RegWord Dsst::parse(const std::string& s) const {
  RegWord w;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '$') {
      int r = register_index(tok.substr(1));
      if (r < 0) throw std::invalid_argument("unknown register '" + tok + "'");
      w.push_back(reg_sym(r));
    } else {
      for (Letter a : output.parse(tok)) w.push_back(letter_sym(a));
    }
  }
  return w;
}

Word SstRun::out() const { return registers.at(static_cast<std::size_t>(out_index)); }

SstRun eval(const Dsst& S, const Word& prefix) {
  SstRun run;
  run.state = S.initial();
  run.out_index = S.out();
  run.registers.assign(S.num_registers(), Word{});
  for (Letter a : prefix) {
    const SstEdge* e = S.edge(run.state, a);
    if (!e) {
      run.blocked = true;
      return run;
    }
    run.registers = rfw::apply(e->update, run.registers);
    run.state = e->to;
    ++run.position;
  }
  return run;
}

namespace {

// Smallest (prefix, period) describing w on its whole length, with prefix+period <= limit.
std::optional<std::pair<std::size_t, std::size_t>> guess_period(const Word& w, std::size_t limit) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t l = 1; l <= limit && l < w.size(); ++l) {
    std::size_t p = w.size() - l;
    while (p > 0 && w[p - 1] == w[p - 1 + l]) --p;
    if (p + l <= limit && (!best || p + l < best->first + best->second)) best = {p, l};
  }
  return best;
}

std::vector<bool> emptiness(const std::vector<Word>& regs) {
  std::vector<bool> e;
  for (const auto& r : regs) e.push_back(r.empty());
  return e;
}

}  // namespace

std::optional<UPWord> eval_limit(const Dsst& S, const UPWord& x) {
  std::size_t P = x.prefix.size(), V = x.period.size();
  int state = S.initial();
  std::vector<Word> regs(S.num_registers());
  std::size_t i = 0;
  auto step = [&]() {
    const SstEdge* e = S.edge(state, at(x, i));
    if (!e) return false;
    regs = rfw::apply(e->update, regs);
    state = e->to;
    ++i;
    return true;
  };
  // Lasso of the control state at period boundaries.
  std::map<int, std::size_t> seen;
  while (i < P)
    if (!step()) return std::nullopt;
  std::size_t L = 0;
  while (true) {
    auto it = seen.find(state);
    if (it != seen.end()) {
      L = i - it->second;
      break;
    }
    seen[state] = i;
    for (std::size_t k = 0; k < V; ++k)
      if (!step()) return std::nullopt;
  }
  // From here on every L letters repeat the same updates; the emptiness
  // pattern of the registers at loop boundaries is eventually periodic.
  std::map<std::vector<bool>, std::size_t> patterns;
  std::vector<std::size_t> out_len;
  while (true) {
    auto e = emptiness(regs);
    auto it = patterns.find(e);
    if (it != patterns.end()) {
      if (regs[static_cast<std::size_t>(S.out())].size() == out_len[it->second]) return std::nullopt;
      break;
    }
    patterns[e] = out_len.size();
    out_len.push_back(regs[static_cast<std::size_t>(S.out())].size());
    for (std::size_t k = 0; k < L; ++k) step();
  }
  std::size_t want = 64 + 4 * (P + L);
  const std::size_t max_len = 1 << 13;
  std::optional<std::pair<std::size_t, std::size_t>> prev;
  while (true) {
    while (regs[static_cast<std::size_t>(S.out())].size() < want) step();
    const Word& out = regs[static_cast<std::size_t>(S.out())];
    Word w(out.begin(), out.begin() + static_cast<long>(want));
    auto g = guess_period(w, want / 3);
    if (g && prev && *g == *prev) {
      Word pre(w.begin(), w.begin() + static_cast<long>(g->first));
      Word per(w.begin() + static_cast<long>(g->first), w.begin() + static_cast<long>(g->first + g->second));
      return canonicalize(pre, per);
    }
    prev = g;
    if (want >= max_len) throw std::runtime_error("output is not ultimately periodic within the search bound");
    want *= 2;
  }
}

bool check_bounded(const Dsst& S, int K) {
  bool copyless = K == 0;
  int cap = copyless ? 2 : K + 1;
  // Reachable states.
  std::vector<bool> reach(static_cast<std::size_t>(S.num_states()), false);
  std::deque<int> work{S.initial()};
  reach[static_cast<std::size_t>(S.initial())] = true;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a)
      if (const SstEdge* e = S.edge(q, a))
        if (!reach[static_cast<std::size_t>(e->to)]) {
          reach[static_cast<std::size_t>(e->to)] = true;
          work.push_back(e->to);
        }
  }
  auto bad = [&](const CountingMatrix& m) { return copyless ? m.max_row_sum() > 1 : m.max_entry() > K; };
  std::set<std::pair<int, CountingMatrix>> seen;
  std::deque<std::pair<int, CountingMatrix>> items;
  for (int q = 0; q < S.num_states(); ++q) {
    if (!reach[static_cast<std::size_t>(q)]) continue;
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a)
      if (const SstEdge* e = S.edge(q, a)) {
        auto m = counting_matrix(e->update, cap);
        if (seen.insert({e->to, m}).second) items.push_back({e->to, m});
      }
  }
  while (!items.empty()) {
    auto [q, m] = items.front();
    items.pop_front();
    if (bad(m)) return false;
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a)
      if (const SstEdge* e = S.edge(q, a)) {
        auto m2 = multiply(m, counting_matrix(e->update, cap));
        if (seen.insert({e->to, m2}).second) items.push_back({e->to, m2});
      }
  }
  return true;
}

bool Dba::accepts(const UPWord& x) const {
  std::size_t P = x.prefix.size(), V = x.period.size();
  int s = initial;
  for (std::size_t i = 0; i < P; ++i) {
    s = delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x.prefix[i])];
    if (s < 0) return false;
  }
  // Run whole periods until the state at a period boundary repeats.
  std::map<int, std::size_t> seen;
  std::vector<bool> acc_in_block;
  while (!seen.count(s)) {
    seen[s] = acc_in_block.size();
    bool acc = false;
    for (std::size_t k = 0; k < V; ++k) {
      s = delta[static_cast<std::size_t>(s)][static_cast<std::size_t>(x.period[k])];
      if (s < 0) return false;
      acc = acc || accepting[static_cast<std::size_t>(s)];
    }
    acc_in_block.push_back(acc);
  }
  for (std::size_t k = seen[s]; k < acc_in_block.size(); ++k)
    if (acc_in_block[k]) return true;
  return false;
}

Dba domain_automaton(const Dsst& S) {
  // State: control state, emptiness of each register, and whether out just grew.
  using Key = std::tuple<int, std::vector<bool>, bool>;
  Dba D;
  D.letters = S.input.size();
  std::map<Key, int> index;
  std::deque<Key> work;
  auto add = [&](const Key& k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(D.delta.size());
    index.emplace(k, id);
    D.delta.emplace_back(D.letters, -1);
    D.accepting.push_back(std::get<2>(k));
    std::string name = S.state_name(std::get<0>(k)) + "/";
    for (bool e : std::get<1>(k)) name += e ? '0' : '1';
    if (std::get<2>(k)) name += "*";
    D.names.push_back(name);
    work.push_back(k);
    return id;
  };
  D.initial = add({S.initial(), std::vector<bool>(S.num_registers(), true), false});
  while (!work.empty()) {
    Key k = work.front();
    work.pop_front();
    int from = index.at(k);
    const auto& empty = std::get<1>(k);
    for (Letter a = 0; a < static_cast<Letter>(D.letters); ++a) {
      const SstEdge* e = S.edge(std::get<0>(k), a);
      if (!e) continue;
      auto nonempty = [&](const RegWord& w, std::size_t skip) {
        for (std::size_t i = skip; i < w.size(); ++i)
          if (!w[i].is_reg || !empty[static_cast<std::size_t>(w[i].id)]) return true;
        return false;
      };
      std::vector<bool> next(S.num_registers());
      for (std::size_t r = 0; r < next.size(); ++r) next[r] = !nonempty(e->update.assign[r], 0);
      bool grew = nonempty(e->update.assign[static_cast<std::size_t>(S.out())], 1);
      D.delta[static_cast<std::size_t>(from)][static_cast<std::size_t>(a)] = add({e->to, next, grew});
    }
  }
  return D;
}

Dba universal_dba(std::size_t letters) {
  Dba D;
  D.letters = letters;
  D.delta.assign(1, std::vector<int>(letters, 0));
  D.accepting = {true};
  D.names = {"all"};
  return D;
}

Dba empty_dba(std::size_t letters) {
  Dba D;
  D.letters = letters;
  D.delta.assign(1, std::vector<int>(letters, 0));
  D.accepting = {false};
  D.names = {"none"};
  return D;
}

Dsst restrict_domain(const Dsst& S, const Dba& D) {
  if (D.letters != S.input.size()) throw std::invalid_argument("automaton over a different alphabet");
  Dsst R;
  R.input = S.input;
  R.output = S.output;
  for (std::size_t r = 0; r < S.num_registers(); ++r) R.add_register(S.register_name(static_cast<int>(r)));
  std::string buf = "out'";
  while (R.register_index(buf) >= 0) buf += "'";
  int pending = R.add_register(buf);
  R.set_out(S.out());
  std::map<std::pair<int, int>, int> index;
  std::deque<std::pair<int, int>> work;
  auto add = [&](std::pair<int, int> k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = R.add_state(S.state_name(k.first) + "|" + D.names[static_cast<std::size_t>(k.second)]);
    index.emplace(k, id);
    work.push_back(k);
    return id;
  };
  R.set_initial(add({S.initial(), D.initial}));
  while (!work.empty()) {
    auto k = work.front();
    work.pop_front();
    int from = index.at(k);
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a) {
      const SstEdge* e = S.edge(k.first, a);
      int d = D.delta[static_cast<std::size_t>(k.second)][static_cast<std::size_t>(a)];
      if (!e || d < 0) continue;
      int to = add({e->to, d});
      Substitution s = e->update;
      s.assign.push_back({reg_sym(pending)});
      RegWord added(s.assign[static_cast<std::size_t>(S.out())].begin() + 1, s.assign[static_cast<std::size_t>(S.out())].end());
      auto& o = s.assign[static_cast<std::size_t>(S.out())];
      auto& p = s.assign[static_cast<std::size_t>(pending)];
      if (D.accepting[static_cast<std::size_t>(k.second)]) {
        o = {reg_sym(S.out()), reg_sym(pending)};
        o.insert(o.end(), added.begin(), added.end());
        p.clear();
      } else {
        o = {reg_sym(S.out())};
        p.insert(p.end(), added.begin(), added.end());
      }
      R.set_edge(from, a, to, std::move(s));
    }
  }
  return R;
}

}  // namespace rfw
