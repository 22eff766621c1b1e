#include "rfw/convert.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace rfw {

namespace {

void append(RegWord& w, const RegWord& v) { w.insert(w.end(), v.begin(), v.end()); }

void append_letters(RegWord& w, const Word& u) {
  for (Letter b : u) w.push_back(letter_sym(b));
}

}  // namespace

// ---------------------------------------------------------------------------
// Two-way to one-bounded streaming: crossing sequences.

namespace {

struct Crossing {
  int first = -1;
  std::vector<int> next;  // -1 for no exit
  int look = 0;           // lookbehind state after the prefix read so far
  bool start = true;      // registers not yet loaded with the endmarker outputs

  bool operator<(const Crossing& o) const {
    return std::tie(first, next, look, start) < std::tie(o.first, o.next, o.look, o.start);
  }
};

}  // namespace

Dsst twoway_to_sst(const TwoWayTransducer& T, std::size_t max_states) {
  const int nq = T.num_states();
  const int look0 = T.lookbehind ? T.lookbehind->initial : 0;
  Dsst S;
  S.input = T.input;
  S.output = T.output;
  S.add_register("out");
  for (int q = 0; q < nq; ++q) S.add_register("out_" + T.state_name(q));
  S.set_out(0);

  auto name_of = [&](const Crossing& c) {
    std::string s = T.state_name(c.first) + "/";
    for (int q = 0; q < nq; ++q) s += (q ? "," : "") + (c.next[static_cast<std::size_t>(q)] < 0 ? std::string("_") : T.state_name(c.next[static_cast<std::size_t>(q)]));
    if (T.lookbehind) s += "/" + (c.look < 0 ? std::string("_") : T.lookbehind->names[static_cast<std::size_t>(c.look)]);
    return c.start ? s + "/init" : s;
  };

  Crossing init;
  init.look = look0;
  init.next.assign(static_cast<std::size_t>(nq), -1);
  for (int q = 0; q < nq; ++q)
    if (const TwoWayMove* m = T.move(q, look0, kEndmarker)) init.next[static_cast<std::size_t>(q)] = m->to;
  const TwoWayMove* m0 = T.move(T.initial(), look0, kEndmarker);
  init.first = m0 ? m0->to : -1;

  std::map<Crossing, int> index;
  std::deque<Crossing> todo;
  auto intern = [&](const Crossing& c) {
    auto it = index.find(c);
    if (it != index.end()) return it->second;
    if (index.size() == max_states) throw std::length_error("crossing construction exceeds the state bound");
    int id = S.add_state(name_of(c));
    index.emplace(c, id);
    todo.push_back(c);
    return id;
  };
  S.set_initial(intern(init));
  if (init.first < 0) return S;

  while (!todo.empty()) {
    Crossing c = todo.front();
    todo.pop_front();
    int from = index.at(c);
    // Current value of out_p (or of out, p = -1).
    auto value = [&](int p) -> RegWord {
      if (!c.start) return {reg_sym(p + 1)};
      RegWord w;
      if (const TwoWayMove* m = T.move(p < 0 ? T.initial() : p, look0, kEndmarker)) append_letters(w, m->out);
      return w;
    };
    for (Letter a = 0; a < static_cast<Letter>(T.input.size()); ++a) {
      if (c.look < 0) continue;
      // Run from (q, i+1) until it first reaches i+2.
      auto sigma = [&](int q, RegWord& w) {
        for (int count = 0; count <= nq; ++count) {
          const TwoWayMove* m = T.move(q, c.look, a);
          if (!m) return -1;
          append_letters(w, m->out);
          if (m->dir == Dir::Right) return m->to;
          int p = m->to;
          int back = c.next[static_cast<std::size_t>(p)];
          if (back < 0) return -1;
          append(w, value(p));
          q = back;
        }
        return -1;
      };
      RegWord wf;
      int first = sigma(c.first, wf);
      if (first < 0) continue;
      Crossing d;
      d.first = first;
      d.start = false;
      d.look = T.lookbehind ? T.lookbehind->step(c.look, a) : 0;
      d.next.assign(static_cast<std::size_t>(nq), -1);
      Substitution up = Substitution::empty(S.num_registers());
      up.assign[0] = {reg_sym(0)};
      if (c.start) append(up.assign[0], value(-1));
      append(up.assign[0], wf);
      for (int q = 0; q < nq; ++q) {
        RegWord w;
        int to = sigma(q, w);
        d.next[static_cast<std::size_t>(q)] = to;
        if (to >= 0) up.assign[static_cast<std::size_t>(q + 1)] = w;
      }
      int id = intern(d);
      S.set_edge(from, a, id, std::move(up));
    }
  }
  return S;
}

// ---------------------------------------------------------------------------
// Copyless streaming to two-way: recursive substitution with caller recovery.

TwoWayTransducer sst_to_twoway(const Dsst& S) {
  if (!check_copyless(S)) throw std::invalid_argument("sst_to_twoway needs a copyless dSST");
  TwoWayTransducer T;
  T.input = S.input;
  T.output = S.output;
  const int nr = static_cast<int>(S.num_registers());
  const int out = S.out();
  int init = T.add_state("init");
  int main = T.add_state("main");
  std::vector<int> enter(static_cast<std::size_t>(nr), -1), ret(static_cast<std::size_t>(nr), -1);
  for (int r = 0; r < nr; ++r)
    if (r != out) {
      enter[static_cast<std::size_t>(r)] = T.add_state("enter:" + S.register_name(r));
      ret[static_cast<std::size_t>(r)] = T.add_state("return:" + S.register_name(r));
    }
  T.set_initial(init);
  Lookbehind L;
  L.initial = S.initial();
  for (int q = 0; q < S.num_states(); ++q) {
    L.names.push_back(S.state_name(q));
    std::vector<int> row;
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a) {
      const SstEdge* e = S.edge(q, a);
      row.push_back(e ? e->to : -1);
    }
    L.delta.push_back(row);
  }
  T.lookbehind = L;

  T.set_move(init, L.initial, kEndmarker, {main, Dir::Right, {}});
  for (int r = 0; r < nr; ++r)
    if (r != out) T.set_move(enter[static_cast<std::size_t>(r)], L.initial, kEndmarker, {ret[static_cast<std::size_t>(r)], Dir::Right, {}});

  for (int q = 0; q < S.num_states(); ++q)
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a) {
      const SstEdge* e = S.edge(q, a);
      if (!e) continue;
      // Output the letters of update(r) from index j up to the next register.
      auto resume = [&](int r, std::size_t j) {
        const RegWord& w = e->update.assign[static_cast<std::size_t>(r)];
        TwoWayMove m;
        for (; j < w.size(); ++j) {
          if (!w[j].is_reg) {
            m.out.push_back(w[j].id);
            continue;
          }
          m.to = enter[static_cast<std::size_t>(w[j].id)];
          m.dir = Dir::Left;
          return m;
        }
        m.to = r == out ? main : ret[static_cast<std::size_t>(r)];
        m.dir = Dir::Right;
        return m;
      };
      T.set_move(main, q, a, resume(out, 1));
      for (int s = 0; s < nr; ++s) {
        if (s == out) continue;
        T.set_move(enter[static_cast<std::size_t>(s)], q, a, resume(s, 0));
        // The caller is the unique register whose update mentions s.
        for (int r = 0; r < nr; ++r) {
          const RegWord& w = e->update.assign[static_cast<std::size_t>(r)];
          auto it = std::find(w.begin(), w.end(), reg_sym(s));
          if (it != w.end()) T.set_move(ret[static_cast<std::size_t>(s)], q, a, resume(r, static_cast<std::size_t>(it - w.begin()) + 1));
        }
      }
    }
  return T;
}

// ---------------------------------------------------------------------------
// Decomposition forest.

namespace {

using Skel = std::vector<std::vector<int>>;

// g(r) = sum_s |sigma(s)|_r h(s)
std::vector<int> pull(const Skel& sk, const std::vector<int>& h) {
  std::vector<int> g(sk.size(), 0);
  for (std::size_t s = 0; s < sk.size(); ++s)
    for (int r : sk[s]) g[static_cast<std::size_t>(r)] += h[s];
  return g;
}

void for_each_label(std::size_t n, int K, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> h(n, 0);
  while (true) {
    f(h);
    std::size_t k = 0;
    while (k < n && h[k] == K) h[k++] = 0;
    if (k == n) return;
    ++h[k];
  }
}

bool nonnegative(const std::vector<int>& g) {
  return std::all_of(g.begin(), g.end(), [](int v) { return v >= 0; });
}

std::vector<int> minus(std::vector<int> g, const std::vector<int>& u) {
  for (std::size_t r = 0; r < g.size(); ++r) g[r] -= u[r];
  return g;
}

}  // namespace

Decomposition::Decomposition(std::size_t registers, int K) : n_(registers), K_(K), L_(1) {
  for (std::size_t r = 0; r < n_; ++r) L_ *= static_cast<std::size_t>(K + 1);
  for_each_label(n_, K_, [&](const std::vector<int>& g) {
    Node nd;
    nd.label = g;
    nd.copies.assign(n_, {});
    roots_.push_back(std::move(nd));
  });
}

RegWord Decomposition::step(const Substitution& lambda, const RegWord& alpha, bool auto_merge) {
  const std::size_t m = height();
  Skel sk(n_);
  std::vector<std::vector<RegWord>> blocks(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    blocks[r].emplace_back();
    for (const Sym& x : lambda.assign[r]) {
      if (x.is_reg) {
        sk[r].push_back(x.id);
        blocks[r].emplace_back();
      } else {
        blocks[r].back().push_back(x);
      }
    }
  }

  std::vector<std::vector<int>> used(m + 1, std::vector<int>(n_, 0));
  for (const Sym& x : alpha)
    if (x.is_reg) ++used[m][static_cast<std::size_t>(x.id)];
  for (std::size_t l = m; l-- > 0;) used[l] = pull(skel_[l], used[l + 1]);

  // Branch whose labels stay nonnegative.
  std::vector<Node*> path;
  std::function<bool(Node&, std::size_t)> find = [&](Node& nd, std::size_t d) {
    if (!nonnegative(minus(nd.label, used[d]))) return false;
    path.push_back(&nd);
    if (d == m) return true;
    for (Node& c : nd.children)
      if (find(c, d + 1)) return true;
    path.pop_back();
    return false;
  };
  bool found = false;
  for (Node& r : roots_)
    if ((found = find(r, 0))) break;
  if (!found) throw std::logic_error("no branch of the decomposition covers the update");

  std::function<void(std::size_t, int, RegWord&)> expand = [&](std::size_t d, int r, RegWord& out) {
    if (d == 0) return;
    auto& pool = path[d]->copies[static_cast<std::size_t>(r)];
    std::vector<RegWord> copy = std::move(pool.front());
    pool.erase(pool.begin());
    const auto& refs = skel_[d - 1][static_cast<std::size_t>(r)];
    for (std::size_t k = 0; k < copy.size(); ++k) {
      append(out, copy[k]);
      if (k < refs.size()) expand(d - 1, refs[k], out);
    }
  };
  RegWord added;
  for (const Sym& x : alpha) {
    if (x.is_reg)
      expand(m, x.id, added);
    else
      added.push_back(x);
  }

  // Consume on every other node, then relabel.
  std::function<void(Node&, std::size_t)> consume = [&](Node& nd, std::size_t d) {
    bool on_path = path[d] == &nd;
    nd.label = minus(nd.label, used[d]);
    if (!on_path && nonnegative(nd.label) && d > 0)
      for (std::size_t r = 0; r < n_; ++r) nd.copies[r].erase(nd.copies[r].begin(), nd.copies[r].begin() + used[d][r]);
    for (Node& c : nd.children) consume(c, d + 1);
  };
  for (Node& r : roots_) consume(r, 0);

  std::function<void(std::vector<Node>&, std::size_t)> grow = [&](std::vector<Node>& level, std::size_t d) {
    level.erase(std::remove_if(level.begin(), level.end(), [](const Node& nd) { return !nonnegative(nd.label); }), level.end());
    for (Node& nd : level) {
      if (d < m) {
        grow(nd.children, d + 1);
        continue;
      }
      for_each_label(n_, K_, [&](const std::vector<int>& h) {
        if (pull(sk, h) != nd.label) return;
        Node c;
        c.label = h;
        c.copies.resize(n_);
        for (std::size_t r = 0; r < n_; ++r) c.copies[r].assign(static_cast<std::size_t>(h[r]), blocks[r]);
        nd.children.push_back(std::move(c));
      });
    }
  };
  grow(roots_, 0);
  skel_.push_back(sk);

  std::function<void(std::vector<Node>&, std::size_t)> trim = [&](std::vector<Node>& level, std::size_t d) {
    for (Node& nd : level) trim(nd.children, d + 1);
    if (d <= m)
      level.erase(std::remove_if(level.begin(), level.end(), [](const Node& nd) { return nd.children.empty(); }), level.end());
  };
  trim(roots_, 0);
  if (roots_.empty()) throw std::logic_error("decomposition forest became empty");

  if (auto_merge && height() > L_) {
    std::size_t l = 1;
    while (l < height() && !can_merge(l)) ++l;
    if (l == height()) throw std::logic_error("no level can be merged");
    merge(l);
  }
  return added;
}

bool Decomposition::can_merge(std::size_t l) const {
  if (l < 1 || l >= height()) return false;
  std::function<bool(const Node&, std::size_t)> ok = [&](const Node& nd, std::size_t d) {
    if (d == l) return nd.children.size() == 1;
    return std::all_of(nd.children.begin(), nd.children.end(), [&](const Node& c) { return ok(c, d + 1); });
  };
  return std::all_of(roots_.begin(), roots_.end(), [&](const Node& r) { return ok(r, 0); });
}

void Decomposition::merge(std::size_t l) {
  if (!can_merge(l)) throw std::invalid_argument("level " + std::to_string(l) + " cannot be merged");
  const Skel& lower = skel_[l - 1];  // sigma_l
  const Skel& upper = skel_[l];      // sigma_{l+1}
  Skel composed(n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (int t : upper[r]) composed[r].insert(composed[r].end(), lower[static_cast<std::size_t>(t)].begin(), lower[static_cast<std::size_t>(t)].end());

  std::function<void(Node&, std::size_t)> go = [&](Node& nd, std::size_t d) {
    if (d + 1 < l) {
      for (Node& c : nd.children) go(c, d + 1);
      return;
    }
    for (Node& mid : nd.children) {
      Node child = std::move(mid.children.front());
      Node merged;
      merged.label = child.label;
      merged.copies.resize(n_);
      for (std::size_t r = 0; r < n_; ++r)
        for (auto& beta : child.copies[r]) {
          std::vector<RegWord> out;
          RegWord cur = beta[0];
          for (std::size_t k = 0; k < upper[r].size(); ++k) {
            auto& pool = mid.copies[static_cast<std::size_t>(upper[r][k])];
            std::vector<RegWord> gamma = std::move(pool.front());
            pool.erase(pool.begin());
            append(cur, gamma[0]);
            for (std::size_t j = 1; j < gamma.size(); ++j) {
              out.push_back(std::move(cur));
              cur = std::move(gamma[j]);
            }
            append(cur, beta[k + 1]);
          }
          out.push_back(std::move(cur));
          merged.copies[r].push_back(std::move(out));
        }
      merged.children = std::move(child.children);
      mid = std::move(merged);
    }
  };
  for (Node& r : roots_) go(r, 0);
  skel_[l - 1] = composed;
  skel_.erase(skel_.begin() + static_cast<long>(l));
}

void Decomposition::check() const {
  const std::size_t m = height();
  std::function<void(const std::vector<Node>&, std::size_t, const std::vector<int>*)> go =
      [&](const std::vector<Node>& level, std::size_t d, const std::vector<int>* parent) {
        for (std::size_t i = 0; i < level.size(); ++i) {
          const Node& nd = level[i];
          for (std::size_t j = 0; j < i; ++j)
            if (level[j].label == nd.label) throw std::logic_error("siblings share a label");
          if (nd.children.empty() && d != m) throw std::logic_error("leaf above the last level");
          for (int v : nd.label)
            if (v < 0 || v > K_) throw std::logic_error("label out of range");
          if (parent && pull(skel_[d - 1], nd.label) != *parent) throw std::logic_error("parent equation fails");
          for (std::size_t r = 0; r < n_; ++r) {
            std::size_t want = d == 0 ? 0 : static_cast<std::size_t>(nd.label[r]);
            if (nd.copies[r].size() != want) throw std::logic_error("copy count differs from the label");
            for (const auto& c : nd.copies[r])
              if (c.size() != skel_[d - 1][r].size() + 1) throw std::logic_error("copy has the wrong number of blocks");
          }
          go(nd.children, d + 1, &nd.label);
        }
      };
  go(roots_, 0, nullptr);
}

std::map<int, RegWord> Decomposition::canonicalize(int first_id) {
  std::map<int, RegWord> contents;
  int id = first_id;
  std::function<void(std::vector<Node>&)> go = [&](std::vector<Node>& level) {
    std::sort(level.begin(), level.end(), [](const Node& a, const Node& b) { return a.label < b.label; });
    for (Node& nd : level) {
      for (auto& pool : nd.copies)
        for (auto& copy : pool)
          for (auto& block : copy) {
            contents[id] = std::move(block);
            block = {reg_sym(id++)};
          }
      go(nd.children);
    }
  };
  go(roots_);
  return contents;
}

std::string Decomposition::key() const {
  std::ostringstream s;
  for (const auto& sk : skel_) {
    s << '[';
    for (const auto& refs : sk) {
      for (int r : refs) s << r << ' ';
      s << ';';
    }
    s << ']';
  }
  std::function<void(const std::vector<Node>&)> go = [&](const std::vector<Node>& level) {
    s << '(';
    for (const Node& nd : level) {
      for (int v : nd.label) s << v << ',';
      go(nd.children);
    }
    s << ')';
  };
  go(roots_);
  return s.str();
}

Dsst kbounded_to_copyless(const Dsst& S, int K, std::size_t max_states) {
  if (K < 1 || !check_bounded(S, K)) throw std::invalid_argument("kbounded_to_copyless needs a K-bounded dSST");
  const int out = S.out();
  std::vector<int> local(S.num_registers(), -1);
  std::size_t n = 0;
  for (std::size_t r = 0; r < S.num_registers(); ++r)
    if (static_cast<int>(r) != out) local[r] = static_cast<int>(n++);
  auto localize = [&](const RegWord& w) {
    RegWord v;
    for (const Sym& x : w) v.push_back(x.is_reg ? reg_sym(local[static_cast<std::size_t>(x.id)]) : x);
    return v;
  };

  struct Edge {
    int from;
    Letter a;
    int to;
    RegWord out_add;
    std::map<int, RegWord> contents;
  };
  std::vector<Edge> edges;
  std::vector<std::pair<int, Decomposition>> states;
  std::map<std::string, int> index;
  int max_id = 0;
  auto intern = [&](int q, Decomposition d) {
    std::string k = std::to_string(q) + "|" + d.key();
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    if (states.size() == max_states) throw std::length_error("copyless construction exceeds the state bound");
    int id = static_cast<int>(states.size());
    index.emplace(k, id);
    states.emplace_back(q, std::move(d));
    return id;
  };
  Decomposition d0(n, K);
  d0.canonicalize(1);
  int start = intern(S.initial(), d0);
  for (std::size_t i = 0; i < states.size(); ++i) {
    int q = states[i].first;
    for (Letter a = 0; a < static_cast<Letter>(S.input.size()); ++a) {
      const SstEdge* e = S.edge(q, a);
      if (!e) continue;
      Substitution lam;
      for (std::size_t r = 0; r < S.num_registers(); ++r)
        if (static_cast<int>(r) != out) lam.assign.push_back(localize(e->update.assign[r]));
      const RegWord& o = e->update.assign[static_cast<std::size_t>(out)];
      RegWord alpha = localize(RegWord(o.begin() + 1, o.end()));
      Decomposition d = states[i].second;
      RegWord added = d.step(lam, alpha);
      auto contents = d.canonicalize(1);
      if (!contents.empty()) max_id = std::max(max_id, contents.rbegin()->first);
      int to = intern(e->to, std::move(d));
      edges.push_back({static_cast<int>(i), a, to, std::move(added), std::move(contents)});
    }
  }

  Dsst T;
  T.input = S.input;
  T.output = S.output;
  T.add_register("out");
  for (int r = 1; r <= max_id; ++r) T.add_register("x" + std::to_string(r));
  T.set_out(0);
  for (std::size_t i = 0; i < states.size(); ++i) T.add_state(S.state_name(states[i].first) + "#" + std::to_string(i));
  T.set_initial(start);
  for (auto& e : edges) {
    Substitution up = Substitution::empty(T.num_registers());
    up.assign[0] = {reg_sym(0)};
    append(up.assign[0], e.out_add);
    for (auto& [id, w] : e.contents) up.assign[static_cast<std::size_t>(id)] = std::move(w);
    T.set_edge(e.from, e.a, e.to, std::move(up));
  }
  return T;
}

// ---------------------------------------------------------------------------
// Restricted composition.

ComposedEvaluator::ComposedEvaluator(const Nft& N, const Dsst& S) : N_(N), S_(S) {
  if (N.output.names() != S.input.names()) throw std::invalid_argument("output of N differs from the input of S");
  for (int q : N.initial_set()) runs_.push_back({q, S.initial(), std::vector<Word>(S.num_registers())});
  if (runs_.size() > 1) throw AmbiguityError("several initial states");
}

Word ComposedEvaluator::feed(Letter a) {
  std::vector<Run> next;
  for (const Run& run : runs_)
    for (int t : N_.out_of(run.n_state, a)) {
      const Transition& tr = N_.transition(t);
      Run r = run;
      r.n_state = tr.to;
      bool alive = true;
      for (Letter b : tr.out) {
        const SstEdge* e = S_.edge(r.s_state, b);
        if (!e) {
          alive = false;
          break;
        }
        r.regs = rfw::apply(e->update, r.regs);
        r.s_state = e->to;
      }
      if (!alive) continue;
      for (const Run& o : next)
        if (o.n_state == r.n_state) throw AmbiguityError("two runs reach state " + N_.state_name(r.n_state));
      next.push_back(std::move(r));
    }
  if (next.empty()) throw std::runtime_error("no run survives");
  runs_ = std::move(next);
  std::size_t before = out_.size();
  emit();
  return Word(out_.begin() + static_cast<long>(before), out_.end());
}

void ComposedEvaluator::emit() {
  std::vector<Word> outs;
  for (const Run& r : runs_) outs.push_back(r.regs[static_cast<std::size_t>(S_.out())]);
  Word common = lcp(outs);
  if (common.size() > out_.size()) out_ = common;
}

}  // namespace rfw
