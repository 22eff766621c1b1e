#include "rfw/nft.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "rfw/graph.hpp"

namespace rfw {

const std::vector<int> Nft::empty_;

StateSet make_set(std::vector<int> states) {
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  return states;
}

bool subset_of(const StateSet& a, const StateSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

bool contains(const StateSet& s, int q) { return std::binary_search(s.begin(), s.end(), q); }

int Nft::add_state(const std::string& name, bool initial, bool final) {
  if (state_index(name) >= 0) throw std::invalid_argument("duplicate state '" + name + "'");
  names_.push_back(name);
  initial_.push_back(initial);
  final_.push_back(final);
  by_state_.emplace_back();
  by_letter_.emplace_back();
  return num_states() - 1;
}

void Nft::add_transition(int from, Letter a, int to, Word out) {
  if (from < 0 || from >= num_states() || to < 0 || to >= num_states())
    throw std::invalid_argument("transition references unknown state");
  if (a < 0 || static_cast<std::size_t>(a) >= input.size()) throw std::invalid_argument("transition letter out of alphabet");
  for (Letter b : out)
    if (b < 0 || static_cast<std::size_t>(b) >= output.size()) throw std::invalid_argument("output letter out of alphabet");
  int id = static_cast<int>(trans_.size());
  trans_.push_back({from, a, to, std::move(out)});
  by_state_[static_cast<std::size_t>(from)].push_back(id);
  auto& row = by_letter_[static_cast<std::size_t>(from)];
  if (row.size() <= static_cast<std::size_t>(a)) row.resize(static_cast<std::size_t>(a) + 1);
  row[static_cast<std::size_t>(a)].push_back(id);
}

int Nft::state_index(const std::string& name) const {
  for (int q = 0; q < num_states(); ++q)
    if (names_[static_cast<std::size_t>(q)] == name) return q;
  return -1;
}

const std::vector<int>& Nft::out_of(int q, Letter a) const {
  const auto& row = by_letter_.at(static_cast<std::size_t>(q));
  if (a < 0 || static_cast<std::size_t>(a) >= row.size()) return empty_;
  return row[static_cast<std::size_t>(a)];
}

StateSet Nft::initial_set() const {
  StateSet s;
  for (int q = 0; q < num_states(); ++q)
    if (is_initial(q)) s.push_back(q);
  return s;
}

StateSet Nft::final_set() const {
  StateSet s;
  for (int q = 0; q < num_states(); ++q)
    if (is_final(q)) s.push_back(q);
  return s;
}

StateSet Nft::all_states() const {
  StateSet s;
  for (int q = 0; q < num_states(); ++q) s.push_back(q);
  return s;
}

std::string Nft::set_name(const StateSet& s) const {
  std::string r = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) r += ',';
    r += state_name(s[i]);
  }
  return r + "}";
}

std::size_t Nft::max_output_length() const {
  std::size_t m = 0;
  for (const auto& t : trans_) m = std::max(m, t.out.size());
  return m;
}

namespace {

std::vector<std::vector<int>> state_graph(const Nft& T) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(T.num_states()));
  for (const auto& t : T.transitions()) adj[static_cast<std::size_t>(t.from)].push_back(t.to);
  return adj;
}

// Copy of T restricted to `keep`, preserving state and transition order.
Nft restrict_to(const Nft& T, const std::vector<bool>& keep) {
  Nft R;
  R.input = T.input;
  R.output = T.output;
  std::vector<int> map(static_cast<std::size_t>(T.num_states()), -1);
  for (int q = 0; q < T.num_states(); ++q)
    if (keep[static_cast<std::size_t>(q)]) map[static_cast<std::size_t>(q)] = R.add_state(T.state_name(q), T.is_initial(q), T.is_final(q));
  for (const auto& t : T.transitions()) {
    int a = map[static_cast<std::size_t>(t.from)], b = map[static_cast<std::size_t>(t.to)];
    if (a >= 0 && b >= 0) R.add_transition(a, t.letter, b, t.out);
  }
  return R;
}

std::string fresh_name(const Nft& T, std::string name) {
  while (T.state_index(name) >= 0) name += "'";
  return name;
}

}  // namespace

Nft trim(const Nft& T) {
  auto adj = state_graph(T);
  auto acc = reachable(adj, T.initial_set());
  auto scc = strongly_connected(adj);
  std::vector<bool> good(adj.size(), false);
  for (int q = 0; q < T.num_states(); ++q)
    good[static_cast<std::size_t>(q)] = T.is_final(q) && scc.nontrivial[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(q)])];
  auto coacc = coreachable(adj, good);
  std::vector<bool> keep(adj.size());
  for (std::size_t q = 0; q < adj.size(); ++q) keep[q] = acc[q] && coacc[q];
  return restrict_to(T, keep);
}

bool is_clean(const Nft& T) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(T.num_states()));
  for (const auto& t : T.transitions())
    if (t.out.empty()) adj[static_cast<std::size_t>(t.from)].push_back(t.to);
  auto scc = strongly_connected(adj);
  for (int q = 0; q < T.num_states(); ++q)
    if (T.is_final(q) && scc.nontrivial[static_cast<std::size_t>(scc.comp[static_cast<std::size_t>(q)])]) return false;
  return true;
}

Nft clean(const Nft& T) {
  if (is_clean(T)) return trim(T);
  // Layer 1 waits for a final state, layer 0 waits for nonempty output;
  // only layer-1 copies of final states are final.
  Nft R;
  R.input = T.input;
  R.output = T.output;
  int n = T.num_states();
  std::vector<int> l0(static_cast<std::size_t>(n)), l1(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    l0[static_cast<std::size_t>(q)] = R.add_state(T.state_name(q) + "#0");
    l1[static_cast<std::size_t>(q)] = R.add_state(T.state_name(q) + "#1", T.is_initial(q), T.is_final(q));
  }
  for (const auto& t : T.transitions()) {
    auto f = static_cast<std::size_t>(t.from), g = static_cast<std::size_t>(t.to);
    R.add_transition(l1[f], t.letter, T.is_final(t.from) ? l0[g] : l1[g], t.out);
    R.add_transition(l0[f], t.letter, t.out.empty() ? l0[g] : l1[g], t.out);
  }
  return trim(R);
}

bool is_unambiguous(const Nft& T) {
  // Nodes (p, q, d) where d records that the two runs already differ.
  int n = T.num_states();
  auto id = [n](int p, int q, int d) { return (p * n + q) * 2 + d; };
  std::size_t N = static_cast<std::size_t>(n * n * 2);
  std::vector<std::vector<int>> adj(N);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int t1 : T.out_of(p))
        for (int t2 : T.out_of(q, T.transition(t1).letter))
          for (int d = 0; d < 2; ++d) {
            int d2 = (d || t1 != t2) ? 1 : 0;
            adj[static_cast<std::size_t>(id(p, q, d))].push_back(id(T.transition(t1).to, T.transition(t2).to, d2));
          }
  std::vector<int> src;
  for (int p : T.initial_set())
    for (int q : T.initial_set()) src.push_back(id(p, q, p != q ? 1 : 0));
  auto reach = reachable(adj, src);
  // Restrict to reachable diverged nodes; d never returns to 0.
  std::vector<std::vector<int>> sub(N);
  for (std::size_t v = 0; v < N; ++v)
    if (reach[v] && v % 2 == 1)
      for (int w : adj[v]) sub[v].push_back(w);
  auto scc = strongly_connected(sub);
  std::vector<char> left(static_cast<std::size_t>(scc.count), 0), right(static_cast<std::size_t>(scc.count), 0);
  for (std::size_t v = 0; v < N; ++v) {
    if (!reach[v] || v % 2 == 0) continue;
    int pq = static_cast<int>(v / 2);
    int c = scc.comp[v];
    if (!scc.nontrivial[static_cast<std::size_t>(c)]) continue;
    if (T.is_final(pq / n)) left[static_cast<std::size_t>(c)] = 1;
    if (T.is_final(pq % n)) right[static_cast<std::size_t>(c)] = 1;
  }
  for (std::size_t v = 0; v < N; ++v) {
    if (!reach[v] || v % 2 == 0) continue;
    int c = scc.comp[v];
    if (left[static_cast<std::size_t>(c)] && right[static_cast<std::size_t>(c)]) return false;
  }
  return true;
}

int OracleRun::state_at(std::size_t i) const {
  if (i < stem.size()) return stem[i];
  return cycle[(i - stem.size()) % cycle.size()];
}

namespace {

// Unrolled graph of runs over x: node (q, k) with k a position in prefix·period.
struct RunGraph {
  int L = 0, n = 0;
  std::vector<std::vector<std::pair<int, int>>> edges;  // (transition, target node)
  std::vector<bool> acc;

  int next_pos(int k, const UPWord& x) const {
    int p = static_cast<int>(x.prefix.size());
    return k + 1 == L ? p : k + 1;
  }
};

RunGraph run_graph(const Nft& T, const UPWord& x) {
  RunGraph G;
  G.n = T.num_states();
  G.L = static_cast<int>(x.prefix.size() + x.period.size());
  std::size_t N = static_cast<std::size_t>(G.n * G.L);
  G.edges.resize(N);
  std::vector<std::vector<int>> adj(N);
  for (int q = 0; q < G.n; ++q)
    for (int k = 0; k < G.L; ++k) {
      Letter a = at(x, static_cast<std::size_t>(k));
      int k2 = G.next_pos(k, x);
      auto v = static_cast<std::size_t>(q * G.L + k);
      for (int t : T.out_of(q, a)) {
        int w = T.transition(t).to * G.L + k2;
        G.edges[v].push_back({t, w});
        adj[v].push_back(w);
      }
    }
  auto scc = strongly_connected(adj);
  std::vector<char> has_final(static_cast<std::size_t>(scc.count), 0);
  for (std::size_t v = 0; v < N; ++v)
    if (T.is_final(static_cast<int>(v) / G.L)) has_final[static_cast<std::size_t>(scc.comp[v])] = 1;
  std::vector<bool> target(N, false);
  for (std::size_t v = 0; v < N; ++v) {
    auto c = static_cast<std::size_t>(scc.comp[v]);
    target[v] = scc.nontrivial[c] && has_final[c];
  }
  G.acc = coreachable(adj, target);
  return G;
}

}  // namespace

std::optional<OracleRun> oracle_run(const Nft& T, const UPWord& x) {
  if (x.period.empty()) throw std::invalid_argument("empty period");
  RunGraph G = run_graph(T, x);
  int start = -1;
  for (int q : T.initial_set()) {
    int v = q * G.L;
    if (!G.acc[static_cast<std::size_t>(v)]) continue;
    if (start >= 0) throw AmbiguityError("two accepting runs from distinct initial states");
    start = v;
  }
  if (start < 0) return std::nullopt;
  std::map<int, std::size_t> seen;
  std::vector<int> nodes, trans;
  int v = start;
  while (!seen.count(v)) {
    seen[v] = nodes.size();
    nodes.push_back(v);
    int chosen = -1, next = -1;
    for (auto [t, w] : G.edges[static_cast<std::size_t>(v)]) {
      if (!G.acc[static_cast<std::size_t>(w)]) continue;
      if (chosen >= 0) throw AmbiguityError("two accepting runs diverge at state " + T.state_name(v / G.L));
      chosen = t;
      next = w;
    }
    trans.push_back(chosen);
    v = next;
  }
  std::size_t loop = seen[v];
  OracleRun r;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int q = nodes[i] / G.L;
    if (i < loop) {
      r.stem.push_back(q);
      r.stem_transitions.push_back(trans[i]);
    } else {
      r.cycle.push_back(q);
      r.cycle_transitions.push_back(trans[i]);
    }
  }
  return r;
}

std::optional<UPWord> oracle_eval(const Nft& T, const UPWord& x) {
  auto r = oracle_run(T, x);
  if (!r) return std::nullopt;
  Word stem, cyc;
  for (int t : r->stem_transitions) stem = concat(stem, T.transition(t).out);
  for (int t : r->cycle_transitions) cyc = concat(cyc, T.transition(t).out);
  if (cyc.empty()) return std::nullopt;
  return canonicalize(stem, cyc);
}

StateSet push(const Nft& T, const StateSet& S, const Word& u) {
  StateSet cur = S;
  for (Letter a : u) {
    std::vector<int> next;
    for (int q : cur)
      for (int t : T.out_of(q, a)) next.push_back(T.transition(t).to);
    cur = make_set(std::move(next));
  }
  return cur;
}

namespace {

// BFS over states from `from`; returns parent transitions (-1 for roots, -2 unseen).
std::vector<int> bfs_tree(const Nft& T, int from) {
  std::vector<int> parent(static_cast<std::size_t>(T.num_states()), -2);
  std::deque<int> work{from};
  parent[static_cast<std::size_t>(from)] = -1;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    for (int t : T.out_of(q)) {
      int r = T.transition(t).to;
      if (parent[static_cast<std::size_t>(r)] == -2) {
        parent[static_cast<std::size_t>(r)] = t;
        work.push_back(r);
      }
    }
  }
  return parent;
}

std::vector<int> tree_path(const Nft& T, const std::vector<int>& parent, int to) {
  std::vector<int> path;
  while (parent[static_cast<std::size_t>(to)] >= 0) {
    int t = parent[static_cast<std::size_t>(to)];
    path.push_back(t);
    to = T.transition(t).from;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Shortest cycle f -> f whose output is nonempty.
std::optional<std::vector<int>> productive_cycle(const Nft& T, int f) {
  int n = T.num_states();
  std::vector<int> parent(static_cast<std::size_t>(2 * n), -2);
  std::deque<int> work{f * 2};
  parent[static_cast<std::size_t>(f * 2)] = -1;
  int goal = f * 2 + 1;
  bool found = false;
  while (!work.empty() && !found) {
    int v = work.front();
    work.pop_front();
    for (int t : T.out_of(v / 2)) {
      const auto& tr = T.transition(t);
      int w = tr.to * 2 + ((v % 2) || !tr.out.empty() ? 1 : 0);
      if (parent[static_cast<std::size_t>(w)] != -2) continue;
      parent[static_cast<std::size_t>(w)] = t * 2 + (v % 2);
      if (w == goal) {
        found = true;
        break;
      }
      work.push_back(w);
    }
  }
  if (!found) return std::nullopt;
  std::vector<int> path;
  int v = goal;
  while (parent[static_cast<std::size_t>(v)] >= 0) {
    int t = parent[static_cast<std::size_t>(v)] / 2;
    path.push_back(t);
    v = T.transition(t).from * 2 + parent[static_cast<std::size_t>(v)] % 2;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

Word output_of(const Nft& T, const std::vector<int>& path) {
  Word w;
  for (int t : path) w = concat(w, T.transition(t).out);
  return w;
}

}  // namespace

std::optional<UPWord> accepting_lasso_output(const Nft& T, int q) {
  auto parent = bfs_tree(T, q);
  std::vector<int> order;
  for (int f = 0; f < T.num_states(); ++f)
    if (parent[static_cast<std::size_t>(f)] != -2 && T.is_final(f)) order.push_back(f);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tree_path(T, parent, a).size() < tree_path(T, parent, b).size();
  });
  for (int f : order) {
    auto cyc = productive_cycle(T, f);
    if (!cyc) continue;
    return canonicalize(output_of(T, tree_path(T, parent, f)), output_of(T, *cyc));
  }
  return std::nullopt;
}

std::vector<ConstantState> constant_states(const Nft& T) {
  int n = T.num_states();
  std::size_t N = static_cast<std::size_t>(n * n);
  // Product edges as (t1, t2) pairs over the same letter.
  std::vector<std::vector<std::pair<int, int>>> edges(N);
  std::vector<std::vector<int>> adj(N), eps(N);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int t1 : T.out_of(p))
        for (int t2 : T.out_of(q, T.transition(t1).letter)) {
          auto v = static_cast<std::size_t>(p * n + q);
          int w = T.transition(t1).to * n + T.transition(t2).to;
          edges[v].push_back({t1, t2});
          adj[v].push_back(w);
        }
  // BFS from I×I for shortest stems.
  std::vector<std::pair<int, int>> parent(N, {-2, -2});
  std::deque<int> work;
  for (int p : T.initial_set())
    for (int q : T.initial_set()) {
      auto v = static_cast<std::size_t>(p * n + q);
      if (parent[v].first == -2) {
        parent[v] = {-1, -1};
        work.push_back(static_cast<int>(v));
      }
    }
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    for (auto [t1, t2] : edges[static_cast<std::size_t>(v)]) {
      auto w = static_cast<std::size_t>(T.transition(t1).to * n + T.transition(t2).to);
      if (parent[w].first == -2) {
        parent[w] = {t1, t2};
        work.push_back(static_cast<int>(w));
      }
    }
  }
  for (std::size_t v = 0; v < N; ++v) {
    if (parent[v].first == -2) continue;
    for (std::size_t i = 0; i < edges[v].size(); ++i)
      if (T.transition(edges[v][i].second).out.empty()) eps[v].push_back(adj[v][i]);
  }
  auto scc = strongly_connected(eps);

  std::vector<ConstantState> result;
  for (std::size_t v = 0; v < N; ++v) {
    int f = static_cast<int>(v) / n, q = static_cast<int>(v) % n;
    if (parent[v].first == -2 || !T.is_final(f) || T.is_final(q)) continue;
    if (!scc.nontrivial[static_cast<std::size_t>(scc.comp[v])]) continue;
    ConstantState c;
    c.state = q;
    c.partner = f;
    // Stem: follow BFS parents back to I×I.
    std::vector<std::pair<int, int>> stem;
    for (std::size_t w = v; parent[w].first >= 0;) {
      stem.push_back(parent[w]);
      w = static_cast<std::size_t>(T.transition(parent[w].first).from * n + T.transition(parent[w].second).from);
    }
    std::reverse(stem.begin(), stem.end());
    for (auto [t1, t2] : stem) {
      c.u.push_back(T.transition(t1).letter);
      c.alpha1 = concat(c.alpha1, T.transition(t1).out);
      c.alpha2 = concat(c.alpha2, T.transition(t2).out);
    }
    // Loop: shortest ε-cycle through v inside its SCC.
    std::vector<std::pair<int, int>> lp(N, {-2, -2});
    std::deque<int> q2;
    bool found = false;
    for (std::size_t i = 0; i < edges[v].size() && !found; ++i) {
      auto [t1, t2] = edges[v][i];
      auto w = static_cast<std::size_t>(adj[v][i]);
      if (!T.transition(t2).out.empty() || scc.comp[w] != scc.comp[v] || lp[w].first != -2) continue;
      lp[w] = {t1, t2};
      if (w == v) found = true;
      q2.push_back(static_cast<int>(w));
    }
    while (!q2.empty() && !found) {
      auto x = static_cast<std::size_t>(q2.front());
      q2.pop_front();
      for (std::size_t i = 0; i < edges[x].size(); ++i) {
        auto [t1, t2] = edges[x][i];
        auto w = static_cast<std::size_t>(adj[x][i]);
        if (!T.transition(t2).out.empty() || scc.comp[w] != scc.comp[v] || lp[w].first != -2) continue;
        lp[w] = {t1, t2};
        if (w == v) {
          found = true;
          break;
        }
        q2.push_back(static_cast<int>(w));
      }
    }
    std::vector<std::pair<int, int>> loop;
    std::size_t w = v;
    do {
      loop.push_back(lp[w]);
      w = static_cast<std::size_t>(T.transition(lp[w].first).from * n + T.transition(lp[w].second).from);
    } while (w != v);
    std::reverse(loop.begin(), loop.end());
    for (auto [t1, t2] : loop) {
      c.u_loop.push_back(T.transition(t1).letter);
      c.loop1 = concat(c.loop1, T.transition(t1).out);
    }
    if (c.loop1.empty()) throw std::invalid_argument("make_productive requires a clean transducer");
    try {
      c.beta = strip_prefix(canonicalize(c.alpha1, c.loop1), c.alpha2);
    } catch (const NotPrefix&) {
      throw NotContinuous("constant state " + T.state_name(q) + " has no consistent output");
    }
    // Every accepting continuation from q must produce beta.
    auto lasso = accepting_lasso_output(T, q);
    if (!lasso || !up_equal(*lasso, c.beta))
      throw NotContinuous("constant state " + T.state_name(q) + " has no consistent output");
    auto same = std::find_if(result.begin(), result.end(), [q](const ConstantState& o) { return o.state == q; });
    if (same != result.end()) {
      if (!up_equal(same->beta, c.beta)) throw NotContinuous("constant state " + T.state_name(q) + " has two outputs");
      continue;
    }
    result.push_back(std::move(c));
  }
  return result;
}

bool is_productive(const Nft& T) { return constant_states(T).empty(); }

Nft make_productive(const Nft& T) {
  Nft cur = trim(T);
  int cap = 2 * T.num_states() + 4;
  for (int round = 0; round < cap; ++round) {
    auto cs = constant_states(cur);
    if (cs.empty()) return cur;
    const ConstantState& c = cs.front();
    int q = c.state;
    Nft R;
    R.input = cur.input;
    R.output = cur.output;
    for (int p = 0; p < cur.num_states(); ++p) R.add_state(cur.state_name(p), cur.is_initial(p), cur.is_final(p));
    auto parent = bfs_tree(cur, q);
    std::vector<int> copy(static_cast<std::size_t>(cur.num_states()), -1);
    for (int p = 0; p < cur.num_states(); ++p)
      if (parent[static_cast<std::size_t>(p)] != -2)
        copy[static_cast<std::size_t>(p)] = R.add_state(fresh_name(R, cur.state_name(p) + "@" + cur.state_name(q)), false, cur.is_final(p));
    for (const auto& t : cur.transitions()) {
      if (t.from == q) {
        R.add_transition(q, t.letter, copy[static_cast<std::size_t>(t.to)], c.beta.prefix);
      } else {
        R.add_transition(t.from, t.letter, t.to, t.out);
      }
      if (copy[static_cast<std::size_t>(t.from)] >= 0)
        R.add_transition(copy[static_cast<std::size_t>(t.from)], t.letter, copy[static_cast<std::size_t>(t.to)], c.beta.period);
    }
    cur = trim(R);
  }
  throw std::runtime_error("make_productive did not converge");
}

}  // namespace rfw
