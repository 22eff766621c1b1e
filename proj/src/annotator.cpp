#include "rfw/annotator.hpp"

#include <algorithm>

namespace rfw {

std::size_t default_max_lookahead(const Nft& T) {
  const std::size_t cap = 100000;
  std::size_t n = static_cast<std::size_t>(T.num_states());
  std::size_t r = 10;
  for (std::size_t i = 0; i < n && r < cap; ++i) r *= std::max<std::size_t>(n, 1);
  return std::min(r, cap);
}

std::optional<CoverResult> cover(AnalysisContext& ctx, const StateSet& S, const Word& lookahead) {
  const Nft& T = ctx.nft();
  const auto& cands = ctx.comp_subsets(S);
  std::vector<StateSet> cur(cands.begin(), cands.end());
  StateSet whole = S;
  for (std::size_t j = 0;; ++j) {
    for (std::size_t k = 0; k < cands.size(); ++k)
      if (cur[k] == whole) return CoverResult{j, cands[k]};
    if (j == lookahead.size()) return std::nullopt;
    Word a{lookahead[j]};
    whole = push(T, whole, a);
    for (auto& c : cur) c = push(T, c, a);
  }
}

Annotator::Annotator(AnalysisContext& ctx, std::size_t max_lookahead)
    : ctx_(ctx),
      max_lookahead_(max_lookahead ? max_lookahead : default_max_lookahead(ctx.nft())),
      frontier_(ctx.nft().initial_set()) {}

std::vector<StateSet> Annotator::start() { return drain(); }

std::vector<StateSet> Annotator::feed(Letter a) {
  buffer_.push_back(a);
  ++consumed_;
  return drain();
}

std::vector<StateSet> Annotator::drain() {
  std::vector<StateSet> out;
  while (true) {
    if (last_) {
      if (buffer_.empty()) break;
      frontier_ = push(ctx_.nft(), *last_, Word{buffer_.front()});
      buffer_.pop_front();
      last_.reset();
    }
    Word w(buffer_.begin(), buffer_.end());
    auto c = cover(ctx_, frontier_, w);
    if (!c) {
      if (buffer_.size() >= max_lookahead_) throw Diverged(released_, frontier_, buffer_.size());
      break;
    }
    last_ = c->C;
    out.push_back(c->C);
    ++released_;
  }
  return out;
}

std::vector<StateSet> annotate(AnalysisContext& ctx, const UPWord& x, std::size_t n, std::size_t max_lookahead) {
  Annotator A(ctx, max_lookahead);
  std::vector<StateSet> sets = A.start();
  for (std::size_t i = 0; sets.size() < n + 1; ++i) {
    auto more = A.feed(at(x, i));
    sets.insert(sets.end(), more.begin(), more.end());
  }
  sets.resize(n + 1);
  return sets;
}

}  // namespace rfw
