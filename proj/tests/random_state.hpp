#pragma once

// Random separable-mode states that satisfy the production equation by
// construction: nb and out_π start at zero and only resize_last and θ-powers
// prepended to last change them.

#include <random>

#include "rfw/determinize.hpp"

namespace rfw::testing {

inline Word random_theta_prefix(std::mt19937& rng, const Word& theta, std::size_t max_len) {
  return take(canonicalize(Word{}, theta), rng() % (max_len + 1));
}

/// Fills det's state for C, then runs `rounds` resizes with θ-powers added to last in between.
inline void random_separable_state(std::mt19937& rng, Determinizer& det, const StateSet& C, const Word& theta, int rounds) {
  DeterminizerState& s = det.mutable_state();
  s = DeterminizerState{};
  s.separable = true;
  s.J = s.C = C;
  s.theta = theta;
  for (int q : C) s.pre[q] = q;
  for (const TreePath& p : tree_of(det.context(), C)) {
    for (int q : p.back()) s.nb[p][q] = 0;
    if (p.size() > 1) s.regs[p] = {};
  }
  std::vector<int> lagging;
  if (rng() % 2)
    for (int q : C)
      if (rng() % 3 == 0) lagging.push_back(q);
  if (lagging.size() == C.size()) lagging.pop_back();
  std::size_t Th = theta.size();
  if (!lagging.empty()) {
    s.max_lag = take(canonicalize(Word{}, theta), 1 + rng() % (2 * Th));
  }
  for (int q : C) {
    bool lag = std::find(lagging.begin(), lagging.end(), q) != lagging.end();
    if (lag) {
      s.lag[q] = q == lagging.front() ? Word{} : take(UPWord{s.max_lag, {}}, rng() % s.max_lag.size());
      s.last[q] = {};
    } else {
      s.lag[q] = s.max_lag;
      Word rot = random_theta_prefix(rng, theta, Th - 1);
      s.last[q] = concat(power(theta, rng() % 7), rot);
    }
  }
  s.out = take(canonicalize(Word{}, theta), rng() % 5);
  for (int r = 0; r < rounds; ++r) {
    det.resize_last();
    for (int q : C)
      if (!s.lagging(q)) s.last[q] = concat(power(theta, rng() % 6), s.last[q]);
  }
}

}  // namespace rfw::testing
