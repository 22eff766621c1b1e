#pragma once

#include <deque>
#include <optional>

#include "rfw/analysis.hpp"

namespace rfw {

/// The lookahead ran out before the cover stabilized.
struct Diverged : std::runtime_error {
  Diverged(std::size_t position, StateSet frontier, std::size_t buffered)
      : std::runtime_error("annotator diverged at position " + std::to_string(position)),
        position(position), frontier(std::move(frontier)), buffered(buffered) {}
  std::size_t position;
  StateSet frontier;
  std::size_t buffered;
};

std::size_t default_max_lookahead(const Nft& T);

struct CoverResult {
  std::size_t time;  // j - i
  StateSet C;
};

/// Cover of S against a finite lookahead; nullopt when the lookahead is too short.
std::optional<CoverResult> cover(AnalysisContext& ctx, const StateSet& S, const Word& lookahead);

/// Streams C0 x[1] C1 x[2] ... . Sets are released once their cover is fixed.
class Annotator {
public:
  explicit Annotator(AnalysisContext& ctx, std::size_t max_lookahead = 0);

  /// Sets released after reading `a` (C0 may come out before any letter via start()).
  std::vector<StateSet> feed(Letter a);
  std::vector<StateSet> start();

  std::size_t released() const { return released_; }
  std::size_t consumed() const { return consumed_; }
  std::size_t max_lookahead() const { return max_lookahead_; }

private:
  std::vector<StateSet> drain();

  AnalysisContext& ctx_;
  std::size_t max_lookahead_;
  StateSet frontier_;            // S_i, cover pending
  std::optional<StateSet> last_; // released C_i awaiting x[i+1]
  std::deque<Letter> buffer_;    // x[i+1..]
  std::size_t released_ = 0, consumed_ = 0;
};

/// C0..Cn on an ultimately periodic input.
std::vector<StateSet> annotate(AnalysisContext& ctx, const UPWord& x, std::size_t n, std::size_t max_lookahead = 0);

}  // namespace rfw
