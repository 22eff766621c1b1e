#pragma once

#include <vector>

namespace rfw {

struct SccResult {
  std::vector<int> comp;         // component id per node
  std::vector<bool> nontrivial;  // per component: has a cycle
  int count = 0;
};

/// Tarjan's algorithm (iterative) over adjacency lists.
SccResult strongly_connected(const std::vector<std::vector<int>>& adj);

/// Nodes from which some node in `targets` is reachable (targets included).
std::vector<bool> coreachable(const std::vector<std::vector<int>>& adj, const std::vector<bool>& targets);

/// Nodes reachable from `sources` (sources included).
std::vector<bool> reachable(const std::vector<std::vector<int>>& adj, const std::vector<int>& sources);

}  // namespace rfw
