#include "rfw/analysis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "rfw/graph.hpp"

namespace rfw {

namespace {

// Synchronous product of |C| copies of T (one component per tuple position).
struct TupleEdge {
  int to;
  Letter a;
  std::vector<int> trans;
};

struct TupleGraph {
  std::vector<std::vector<int>> nodes;
  std::map<std::vector<int>, int> index;
  std::vector<std::vector<TupleEdge>> edges;
  std::vector<std::pair<int, int>> parent;  // (node, edge) or (-1,-1) for sources

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v)
      for (const auto& e : edges[v]) adj[v].push_back(e.to);
    return adj;
  }
};

constexpr std::size_t kTupleCap = 400000;

TupleGraph explore(const Nft& T, const std::vector<std::vector<int>>& sources) {
  TupleGraph G;
  std::deque<int> work;
  auto add = [&](const std::vector<int>& t, std::pair<int, int> par) {
    auto it = G.index.find(t);
    if (it != G.index.end()) return it->second;
    if (G.nodes.size() >= kTupleCap) throw std::runtime_error("tuple product too large");
    int id = static_cast<int>(G.nodes.size());
    G.nodes.push_back(t);
    G.index.emplace(t, id);
    G.edges.emplace_back();
    G.parent.push_back(par);
    work.push_back(id);
    return id;
  };
  for (const auto& s : sources) add(s, {-1, -1});
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    std::vector<int> tuple = G.nodes[static_cast<std::size_t>(v)];
    std::size_t k = tuple.size();
    for (Letter a = 0; a < static_cast<Letter>(T.input.size()); ++a) {
      std::vector<const std::vector<int>*> choices(k);
      bool dead = false;
      for (std::size_t j = 0; j < k; ++j) {
        choices[j] = &T.out_of(tuple[j], a);
        if (choices[j]->empty()) dead = true;
      }
      if (dead) continue;
      std::vector<std::size_t> pos(k, 0);
      while (true) {
        std::vector<int> trans(k), next(k);
        for (std::size_t j = 0; j < k; ++j) {
          trans[j] = (*choices[j])[pos[j]];
          next[j] = T.transition(trans[j]).to;
        }
        int edge_index = static_cast<int>(G.edges[static_cast<std::size_t>(v)].size());
        int w = add(next, {v, edge_index});
        G.edges[static_cast<std::size_t>(v)].push_back({w, a, trans});
        std::size_t j = 0;
        while (j < k && ++pos[j] == choices[j]->size()) pos[j++] = 0;
        if (j == k) break;
      }
    }
  }
  return G;
}

using EdgeRef = std::pair<int, int>;  // (node, edge index)

std::vector<EdgeRef> path_from_source(const TupleGraph& G, int v) {
  std::vector<EdgeRef> path;
  while (G.parent[static_cast<std::size_t>(v)].first >= 0) {
    path.push_back(G.parent[static_cast<std::size_t>(v)]);
    v = G.parent[static_cast<std::size_t>(v)].first;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Shortest path from `from` to `to` (nonempty when from == to) using nodes accepted by `allowed`.
std::optional<std::vector<EdgeRef>> shortest_path(const TupleGraph& G, int from, int to, const std::function<bool(int)>& allowed) {
  std::vector<EdgeRef> parent(G.nodes.size(), {-2, -2});
  std::deque<int> work;
  auto relax = [&](int v) {
    for (std::size_t i = 0; i < G.edges[static_cast<std::size_t>(v)].size(); ++i) {
      int w = G.edges[static_cast<std::size_t>(v)][i].to;
      if (!allowed(w) || parent[static_cast<std::size_t>(w)].first != -2) continue;
      parent[static_cast<std::size_t>(w)] = {v, static_cast<int>(i)};
      if (w == to) return true;
      work.push_back(w);
    }
    return false;
  };
  bool found = false;
  if (from == to) {
    found = relax(from);
  } else {
    parent[static_cast<std::size_t>(from)] = {-1, -1};
    work.push_back(from);
  }
  while (!found && !work.empty()) {
    int v = work.front();
    work.pop_front();
    found = relax(v);
  }
  if (!found) return std::nullopt;
  std::vector<EdgeRef> path;
  int v = to;
  do {
    auto p = parent[static_cast<std::size_t>(v)];
    path.push_back(p);
    v = p.first;
  } while (v != from);
  std::reverse(path.begin(), path.end());
  return path;
}

const TupleEdge& edge_of(const TupleGraph& G, EdgeRef e) {
  return G.edges[static_cast<std::size_t>(e.first)][static_cast<std::size_t>(e.second)];
}

Word letters_of(const TupleGraph& G, const std::vector<EdgeRef>& path) {
  Word w;
  for (auto e : path) w.push_back(edge_of(G, e).a);
  return w;
}

Word output_of(const Nft& T, const TupleGraph& G, const std::vector<EdgeRef>& path, std::size_t component) {
  Word w;
  for (auto e : path) w = concat(w, T.transition(edge_of(G, e).trans[component]).out);
  return w;
}

long weight_of(const Nft& T, const TupleGraph& G, const std::vector<EdgeRef>& path, std::size_t a, std::size_t b) {
  long s = 0;
  for (auto e : path) {
    const auto& te = edge_of(G, e);
    s += static_cast<long>(T.transition(te.trans[a]).out.size()) - static_cast<long>(T.transition(te.trans[b]).out.size());
  }
  return s;
}

}  // namespace

std::optional<CompatWitness> is_compatible(const Nft& T, const StateSet& C) {
  if (C.empty()) return std::nullopt;
  TupleGraph G = explore(T, {C});
  auto scc = strongly_connected(G.adjacency());
  for (std::size_t v = 0; v < G.nodes.size(); ++v) {
    int comp = scc.comp[v];
    if (!scc.nontrivial[static_cast<std::size_t>(comp)]) continue;
    const auto& t = G.nodes[v];
    if (std::none_of(t.begin(), t.end(), [&](int q) { return T.is_final(q); })) continue;
    int root = static_cast<int>(v);
    auto stem = path_from_source(G, root);
    auto loop = shortest_path(G, root, root, [&](int w) { return scc.comp[static_cast<std::size_t>(w)] == comp; });
    CompatWitness w;
    w.C = C;
    w.d = t;
    w.u = letters_of(G, stem);
    w.u_loop = letters_of(G, *loop);
    for (std::size_t k = 0; k < C.size(); ++k) {
      w.alpha.push_back(output_of(T, G, stem, k));
      w.alpha_loop.push_back(output_of(T, G, *loop, k));
    }
    return w;
  }
  return std::nullopt;
}

std::optional<StepAnalysis> analyze_step(const Nft& T, const StateSet& C, const Word& u, const StateSet& D) {
  int n = T.num_states();
  std::vector<int> count(static_cast<std::size_t>(n), 0), pre(static_cast<std::size_t>(n), -1);
  std::vector<Word> val(static_cast<std::size_t>(n));
  for (int q : C) {
    count[static_cast<std::size_t>(q)] = 1;
    pre[static_cast<std::size_t>(q)] = q;
  }
  for (Letter a : u) {
    std::vector<int> c2(static_cast<std::size_t>(n), 0), p2(static_cast<std::size_t>(n), -1);
    std::vector<Word> v2(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
      int cq = count[static_cast<std::size_t>(q)];
      if (cq == 0) continue;
      for (int t : T.out_of(q, a)) {
        auto r = static_cast<std::size_t>(T.transition(t).to);
        c2[r] = std::min(2, c2[r] + cq);
        if (c2[r] == 1) {
          p2[r] = pre[static_cast<std::size_t>(q)];
          v2[r] = concat(val[static_cast<std::size_t>(q)], T.transition(t).out);
        }
      }
    }
    count = std::move(c2);
    pre = std::move(p2);
    val = std::move(v2);
  }
  StepAnalysis s;
  s.source = C;
  s.target = D;
  s.word = u;
  std::set<int> image;
  for (int q : D) {
    if (count[static_cast<std::size_t>(q)] != 1) return std::nullopt;
    s.pre[q] = pre[static_cast<std::size_t>(q)];
    s.val[q] = val[static_cast<std::size_t>(q)];
    image.insert(pre[static_cast<std::size_t>(q)]);
  }
  s.step = image.size() == C.size();
  s.initial = subset_of(C, T.initial_set());
  return s;
}

AdvanceProfile advance_profile(const std::map<int, Word>& val) {
  AdvanceProfile p;
  std::vector<Word> vals;
  for (const auto& [q, w] : val) vals.push_back(w);
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j)
      if (!is_prefix(vals[i], vals[j]) && !is_prefix(vals[j], vals[i]))
        throw ContinuityViolated("productions of a step are not mutual prefixes");
  p.common = lcp(vals);
  for (const auto& [q, w] : val) {
    p.advance[q] = drop(w, p.common.size());
    if (p.advance[q].size() > p.max_advance.size()) p.max_advance = p.advance[q];
  }
  return p;
}

AdvanceProfile advance_profile(const StepAnalysis& s) { return advance_profile(s.val); }

std::map<int, UPWord> end_words(const Nft& T, const CompatWitness& w) {
  std::map<int, UPWord> ends;
  for (std::size_t k = 0; k < w.C.size(); ++k) {
    if (!w.alpha_loop[k].empty()) {
      ends[w.C[k]] = canonicalize(w.alpha[k], w.alpha_loop[k]);
      continue;
    }
    auto beta = accepting_lasso_output(T, w.d[k]);
    if (!beta) throw std::invalid_argument("state " + T.state_name(w.d[k]) + " has no accepting continuation");
    ends[w.C[k]] = concat(w.alpha[k], *beta);
  }
  return ends;
}

std::optional<SeparabilityWitness> is_separable(const Nft& T, const StateSet& C) {
  if (C.size() < 2 || !is_compatible(T, C)) return std::nullopt;
  StateSet I = T.initial_set();
  std::vector<std::vector<int>> sources;
  std::vector<std::size_t> pos(C.size(), 0);
  if (I.empty()) return std::nullopt;
  while (true) {
    std::vector<int> t(C.size());
    for (std::size_t j = 0; j < C.size(); ++j) t[j] = I[pos[j]];
    sources.push_back(t);
    std::size_t j = 0;
    while (j < C.size() && ++pos[j] == I.size()) pos[j++] = 0;
    if (j == C.size()) break;
  }
  TupleGraph G = explore(T, sources);
  auto target_it = G.index.find(C);
  if (target_it == G.index.end()) return std::nullopt;
  int target = target_it->second;
  auto adj = G.adjacency();
  std::vector<bool> goal(adj.size(), false);
  goal[static_cast<std::size_t>(target)] = true;
  auto co = coreachable(adj, goal);
  std::vector<std::vector<int>> sub(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v)
    if (co[v])
      for (int w : adj[v])
        if (co[static_cast<std::size_t>(w)]) sub[v].push_back(w);
  auto scc = strongly_connected(sub);
  std::vector<bool> seen_comp(static_cast<std::size_t>(scc.count), false);
  for (std::size_t r = 0; r < adj.size(); ++r) {
    if (!co[r]) continue;
    int comp = scc.comp[r];
    if (!scc.nontrivial[static_cast<std::size_t>(comp)] || seen_comp[static_cast<std::size_t>(comp)]) continue;
    seen_comp[static_cast<std::size_t>(comp)] = true;
    auto in_comp = [&](int w) { return co[static_cast<std::size_t>(w)] && scc.comp[static_cast<std::size_t>(w)] == comp; };
    // BFS tree of the component rooted at r.
    std::vector<EdgeRef> tree(adj.size(), {-2, -2});
    std::vector<int> order{static_cast<int>(r)};
    tree[r] = {-1, -1};
    for (std::size_t h = 0; h < order.size(); ++h) {
      int v = order[h];
      for (std::size_t i = 0; i < G.edges[static_cast<std::size_t>(v)].size(); ++i) {
        int w = G.edges[static_cast<std::size_t>(v)][i].to;
        if (!in_comp(w) || tree[static_cast<std::size_t>(w)].first != -2) continue;
        tree[static_cast<std::size_t>(w)] = {v, static_cast<int>(i)};
        order.push_back(w);
      }
    }
    auto tree_path = [&](int v) {
      std::vector<EdgeRef> p;
      while (tree[static_cast<std::size_t>(v)].first >= 0) {
        p.push_back(tree[static_cast<std::size_t>(v)]);
        v = tree[static_cast<std::size_t>(v)].first;
      }
      std::reverse(p.begin(), p.end());
      return p;
    };
    for (std::size_t a = 0; a < C.size(); ++a)
      for (std::size_t b = a + 1; b < C.size(); ++b) {
        for (int v : order) {
          long pv = weight_of(T, G, tree_path(v), a, b);
          for (std::size_t i = 0; i < G.edges[static_cast<std::size_t>(v)].size(); ++i) {
            int w = G.edges[static_cast<std::size_t>(v)][i].to;
            if (!in_comp(w)) continue;
            EdgeRef e{v, static_cast<int>(i)};
            long pw = weight_of(T, G, tree_path(w), a, b);
            if (pv + weight_of(T, G, {e}, a, b) == pw) continue;
            auto back = w == static_cast<int>(r) ? std::vector<EdgeRef>{}
                                                 : *shortest_path(G, w, static_cast<int>(r), in_comp);
            std::vector<EdgeRef> c1 = tree_path(v);
            c1.push_back(e);
            c1.insert(c1.end(), back.begin(), back.end());
            std::vector<EdgeRef> c2 = tree_path(w);
            c2.insert(c2.end(), back.begin(), back.end());
            std::vector<EdgeRef> loop = weight_of(T, G, c1, a, b) != 0 ? c1 : c2;
            auto stem = path_from_source(G, static_cast<int>(r));
            std::vector<EdgeRef> tail;
            if (static_cast<int>(r) != target) tail = *shortest_path(G, static_cast<int>(r), target, [&](int x) { return co[static_cast<std::size_t>(x)]; });
            int src = static_cast<int>(r);
            while (G.parent[static_cast<std::size_t>(src)].first >= 0) src = G.parent[static_cast<std::size_t>(src)].first;
            SeparabilityWitness sw;
            sw.C = C;
            sw.i = G.nodes[static_cast<std::size_t>(src)];
            sw.ell = G.nodes[r];
            sw.u = letters_of(G, stem);
            sw.u_loop = letters_of(G, loop);
            sw.u_tail = letters_of(G, tail);
            for (std::size_t k = 0; k < C.size(); ++k) {
              sw.alpha.push_back(output_of(T, G, stem, k));
              sw.alpha_loop.push_back(output_of(T, G, loop, k));
              sw.alpha_tail.push_back(output_of(T, G, tail, k));
            }
            sw.p = a;
            sw.q = b;
            return sw;
          }
        }
      }
  }
  return std::nullopt;
}

AnalysisContext::AnalysisContext(Nft T, ThetaPolicy policy) : T_(std::move(T)), policy_(policy) {}

const std::optional<CompatWitness>& AnalysisContext::compat(const StateSet& C) {
  auto it = compat_.find(C);
  if (it == compat_.end()) it = compat_.emplace(C, rfw::is_compatible(T_, C)).first;
  return it->second;
}

bool AnalysisContext::precedes(const StateSet& a, const StateSet& b) const {
  auto names = [this](const StateSet& s) {
    std::vector<std::string> n;
    for (int q : s) n.push_back(T_.state_name(q));
    std::sort(n.begin(), n.end());
    return n;
  };
  auto na = names(a), nb = names(b);
  return std::lexicographical_compare(na.begin(), na.end(), nb.begin(), nb.end());
}

const std::vector<StateSet>& AnalysisContext::comp_subsets(const StateSet& S) {
  auto it = subsets_.find(S);
  if (it != subsets_.end()) return it->second;
  if (S.size() > 20) throw std::runtime_error("state set too large for subset enumeration");
  std::vector<StateSet> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << S.size()); ++mask) {
    StateSet C;
    for (std::size_t j = 0; j < S.size(); ++j)
      if (mask & (std::size_t{1} << j)) C.push_back(S[j]);
    if (is_compatible(C)) out.push_back(C);
  }
  std::sort(out.begin(), out.end(), [this](const StateSet& a, const StateSet& b) { return precedes(a, b); });
  return subsets_.emplace(S, std::move(out)).first->second;
}

const std::optional<SeparabilityWitness>& AnalysisContext::separable(const StateSet& C) {
  auto it = separable_.find(C);
  if (it == separable_.end()) {
    std::optional<SeparabilityWitness> w;
    if (C.size() >= 2 && is_compatible(C)) w = rfw::is_separable(T_, C);
    it = separable_.emplace(C, std::move(w)).first;
  }
  return it->second;
}

const std::map<int, UPWord>& AnalysisContext::ends(const StateSet& C) {
  auto it = ends_.find(C);
  if (it != ends_.end()) return it->second;
  const auto& w = compat(C);
  if (!w) throw std::invalid_argument("ends of a non-compatible set " + T_.set_name(C));
  return ends_.emplace(C, end_words(T_, *w)).first->second;
}

std::size_t AnalysisContext::omega() const {
  std::size_t M = std::max<std::size_t>(10, T_.max_output_length());
  std::size_t n = static_cast<std::size_t>(T_.num_states());
  std::size_t r = M;
  for (std::size_t i = 0; i < n; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / std::max<std::size_t>(n, 1)) return std::numeric_limits<std::size_t>::max();
    r *= n;
  }
  return r;
}

std::size_t AnalysisContext::theta_length() {
  if (theta_) return *theta_;
  std::size_t L = 1;
  for (const auto& C : comp_subsets(T_.all_states())) {
    const auto& sw = separable(C);
    if (!sw) continue;
    for (const auto& w : sw->alpha_loop)
      if (!w.empty()) L = std::lcm(L, w.size());
    for (const auto& [q, e] : ends(C)) L = std::lcm(L, e.period.size());
  }
  if (policy_ == ThetaPolicy::PaperCapped) {
    std::size_t om = omega();
    constexpr std::size_t cap = std::size_t{1} << 22;
    if (om > cap / 4) throw std::runtime_error("paper-capped period length exceeds the supported size");
    std::size_t need = 4 * om;
    L = ((need + L - 1) / L) * L;
  }
  theta_ = L;
  return L;
}

LoopingFuture AnalysisContext::looping_future(const StateSet& C, const AdvanceProfile& profile) {
  if (!is_separable(C)) throw std::invalid_argument("looping future of a non-separable set " + T_.set_name(C));
  const auto& e = ends(C);
  int r = -1;
  for (const auto& [q, adv] : profile.advance)
    if (adv.empty()) {
      r = q;
      break;
    }
  if (r < 0) throw std::invalid_argument("advance profile without an empty advance");
  UPWord W = e.at(r);
  for (const auto& [q, adv] : profile.advance)
    if (!up_equal(concat(adv, e.at(q)), W)) throw ContinuityViolated("end words disagree in " + T_.set_name(C));
  std::size_t theta = theta_length();
  if (theta % W.period.size() != 0) throw std::logic_error("period length does not divide the looping period");
  LoopingFuture f;
  f.tau = W.prefix;
  f.theta = take(strip_prefix(W, f.tau), theta);
  f.future = W;
  return f;
}

namespace {

struct Config {
  int node;  // p1 * n + p2
  int side;  // 0 equal, 1 left ahead, 2 right ahead, 3 diverged
  Word residual;
  int parent;
  int t1, t2;
  std::size_t depth;
};

}  // namespace

ContinuityResult is_continuous(const Nft& T, std::size_t bound) {
  int n = T.num_states();
  if (bound == 0) bound = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  std::size_t N = static_cast<std::size_t>(n * n);
  std::vector<std::vector<std::pair<int, int>>> pedges(N);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int t1 : T.out_of(p))
        for (int t2 : T.out_of(q, T.transition(t1).letter)) pedges[static_cast<std::size_t>(p * n + q)].push_back({t1, t2});
  auto target = [&](std::pair<int, int> e) { return T.transition(e.first).to * n + T.transition(e.second).to; };

  // Simple cycles through each product node, shortest first.
  std::map<int, std::vector<std::vector<std::pair<int, int>>>> cycles;
  auto cycles_at = [&](int start) -> const std::vector<std::vector<std::pair<int, int>>>& {
    auto it = cycles.find(start);
    if (it != cycles.end()) return it->second;
    std::vector<std::vector<std::pair<int, int>>> found;
    std::vector<std::pair<int, int>> path;
    std::vector<bool> on(N, false);
    const std::size_t max_cycles = 20000;
    std::function<void(int)> dfs = [&](int v) {
      if (found.size() >= max_cycles || path.size() >= bound) return;
      for (auto e : pedges[static_cast<std::size_t>(v)]) {
        int w = target(e);
        path.push_back(e);
        if (w == start) {
          found.push_back(path);
        } else if (!on[static_cast<std::size_t>(w)]) {
          on[static_cast<std::size_t>(w)] = true;
          dfs(w);
          on[static_cast<std::size_t>(w)] = false;
        }
        path.pop_back();
      }
    };
    on[static_cast<std::size_t>(start)] = true;
    dfs(start);
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    return cycles.emplace(start, std::move(found)).first->second;
  };

  std::vector<Config> configs;
  std::set<std::tuple<int, int, Word>> seen;
  std::deque<int> work;
  auto push = [&](Config c) {
    Word key = c.side == 3 ? Word{} : c.residual;
    if (!seen.insert({c.node, c.side, key}).second) return;
    configs.push_back(std::move(c));
    work.push_back(static_cast<int>(configs.size()) - 1);
  };
  for (int q1 : T.initial_set())
    for (int q2 : T.initial_set()) push({q1 * n + q2, 0, {}, -1, -1, -1, 0});

  const std::size_t max_configs = 200000;
  while (!work.empty()) {
    int ci = work.front();
    work.pop_front();
    Config c = configs[static_cast<std::size_t>(ci)];
    int p1 = c.node / n, p2 = c.node % n;
    if (T.is_final(p1)) {
      // Rebuild the stem for this configuration.
      std::vector<std::pair<int, int>> stem;
      for (int k = ci; configs[static_cast<std::size_t>(k)].parent >= 0; k = configs[static_cast<std::size_t>(k)].parent)
        stem.push_back({configs[static_cast<std::size_t>(k)].t1, configs[static_cast<std::size_t>(k)].t2});
      std::reverse(stem.begin(), stem.end());
      Word u, a1, a2;
      for (auto [t1, t2] : stem) {
        u.push_back(T.transition(t1).letter);
        a1 = concat(a1, T.transition(t1).out);
        a2 = concat(a2, T.transition(t2).out);
      }
      int root = ci;
      while (configs[static_cast<std::size_t>(root)].parent >= 0) root = configs[static_cast<std::size_t>(root)].parent;
      for (const auto& cyc : cycles_at(c.node)) {
        Word v, l1, l2;
        for (auto [t1, t2] : cyc) {
          v.push_back(T.transition(t1).letter);
          l1 = concat(l1, T.transition(t1).out);
          l2 = concat(l2, T.transition(t2).out);
        }
        if (l1.empty()) continue;
        UPWord o1 = canonicalize(a1, l1);
        UPWord o2;
        if (!l2.empty()) {
          o2 = canonicalize(a2, l2);
        } else {
          auto beta = accepting_lasso_output(T, p2);
          if (!beta) continue;
          o2 = concat(a2, *beta);
        }
        if (up_equal(o1, o2)) continue;
        ContinuityWitness w;
        w.u = u;
        w.u_loop = v;
        w.q1 = configs[static_cast<std::size_t>(root)].node / n;
        w.q2 = configs[static_cast<std::size_t>(root)].node % n;
        w.p1 = p1;
        w.p2 = p2;
        w.alpha1 = a1;
        w.alpha2 = a2;
        w.loop1 = l1;
        w.loop2 = l2;
        w.out1 = o1;
        w.out2 = o2;
        return {false, w};
      }
    }
    if (c.depth >= bound || configs.size() >= max_configs) continue;
    for (auto e : pedges[static_cast<std::size_t>(c.node)]) {
      Config d{target(e), 3, {}, ci, e.first, e.second, c.depth + 1};
      if (c.side != 3) {
        Word L = concat(c.side == 1 ? c.residual : Word{}, T.transition(e.first).out);
        Word R = concat(c.side == 2 ? c.residual : Word{}, T.transition(e.second).out);
        if (is_prefix(L, R)) {
          d.residual = drop(R, L.size());
          d.side = d.residual.empty() ? 0 : 2;
        } else if (is_prefix(R, L)) {
          d.residual = drop(L, R.size());
          d.side = 1;
        }
      }
      push(std::move(d));
    }
  }
  return {true, std::nullopt};
}

}  // namespace rfw
