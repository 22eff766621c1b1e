#include "rfw/graph.hpp"

#include <algorithm>
#include <utility>

namespace rfw {

SccResult strongly_connected(const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  SccResult r;
  r.comp.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0;
  for (int s = 0; s < n; ++s) {
    if (index[static_cast<std::size_t>(s)] >= 0) continue;
    call.push_back({s, 0});
    while (!call.empty()) {
      auto& [v, i] = call.back();
      auto vs = static_cast<std::size_t>(v);
      if (i == 0 && index[vs] < 0) {
        index[vs] = low[vs] = counter++;
        stack.push_back(v);
        on_stack[vs] = true;
      }
      if (i < adj[vs].size()) {
        int w = adj[vs][i++];
        auto ws = static_cast<std::size_t>(w);
        if (index[ws] < 0) {
          call.push_back({w, 0});
        } else if (on_stack[ws]) {
          low[vs] = std::min(low[vs], index[ws]);
        }
        continue;
      }
      if (low[vs] == index[vs]) {
        int id = r.count++;
        int size = 0;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          r.comp[static_cast<std::size_t>(w)] = id;
          ++size;
          if (w == v) break;
        }
        bool cyc = size > 1 || std::find(adj[vs].begin(), adj[vs].end(), v) != adj[vs].end();
        r.nontrivial.push_back(cyc);
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) {
        auto p = static_cast<std::size_t>(call.back().first);
        low[p] = std::min(low[p], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  return r;
}

std::vector<bool> coreachable(const std::vector<std::vector<int>>& adj, const std::vector<bool>& targets) {
  std::size_t n = adj.size();
  std::vector<std::vector<int>> rev(n);
  for (std::size_t v = 0; v < n; ++v)
    for (int w : adj[v]) rev[static_cast<std::size_t>(w)].push_back(static_cast<int>(v));
  std::vector<int> src;
  for (std::size_t v = 0; v < n; ++v)
    if (targets[v]) src.push_back(static_cast<int>(v));
  return reachable(rev, src);
}

std::vector<bool> reachable(const std::vector<std::vector<int>>& adj, const std::vector<int>& sources) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> work;
  for (int s : sources) {
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = true;
      work.push_back(s);
    }
  }
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        work.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace rfw
