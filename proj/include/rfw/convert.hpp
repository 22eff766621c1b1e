#pragma once

#include <map>
#include <string>
#include <vector>

#include "rfw/nft.hpp"
#include "rfw/sst.hpp"
#include "rfw/twoway.hpp"

namespace rfw {

/// Crossing-sequence dSST: state (first, next, lookbehind), registers out and out_q.
Dsst twoway_to_sst(const TwoWayTransducer& T, std::size_t max_states = 200000);

/// Two-way simulation of a copyless dSST with a lookbehind tracking its control state.
TwoWayTransducer sst_to_twoway(const Dsst& S);

/// Decomposition forest of a K-bounded substitution sequence over R' = registers minus out.
/// Each node of depth l >= 1 holds label(r) copies of sigma_l(r); a copy is one register
/// word per letter block of sigma_l(r). Roots hold no copies.
class Decomposition {
public:
  struct Node {
    std::vector<int> label;
    std::vector<std::vector<std::vector<RegWord>>> copies;  // [r][copy][block]
    std::vector<Node> children;
  };

  Decomposition(std::size_t registers, int K);

  std::size_t height() const { return skel_.size(); }
  std::size_t bound() const { return L_; }
  const std::vector<Node>& roots() const { return roots_; }
  /// Registers of sigma_l(r) in order, 1 <= l <= height.
  const std::vector<int>& skeleton(std::size_t l, int r) const { return skel_.at(l - 1).at(static_cast<std::size_t>(r)); }

  /// Applies lambda (over R') with lambda(out) = out alpha; returns the value added to out.
  /// Merges levels when the height exceeds the bound and auto_merge is set.
  RegWord step(const Substitution& lambda, const RegWord& alpha, bool auto_merge = true);
  /// True when every node of depth l has exactly one child.
  bool can_merge(std::size_t l) const;
  void merge(std::size_t l);
  /// Checks equal leaf depths, distinct sibling labels, the parent equation and copy counts.
  void check() const;

  /// Sorts siblings, renames every block register to first_id, first_id+1, ... in order and
  /// returns the previous contents by new id.
  std::map<int, RegWord> canonicalize(int first_id);
  /// Structure, labels and skeletons, without register contents.
  std::string key() const;

private:
  std::size_t n_;
  int K_;
  std::size_t L_;
  std::vector<std::vector<std::vector<int>>> skel_;  // [level-1][r]
  std::vector<Node> roots_;
};

/// Equivalent copyless dSST of a K-bounded dSST.
Dsst kbounded_to_copyless(const Dsst& S, int K, std::size_t max_states = 20000);

/// Streaming evaluator of S o N for a restricted 1-nT N, every run of N counting as valid
/// while it lasts. Each live run of N carries its own copy of S; the common prefix of
/// their out registers is emitted.
class ComposedEvaluator {
public:
  ComposedEvaluator(const Nft& N, const Dsst& S);
  /// Returns the newly emitted output. Throws std::runtime_error when every run has died
  /// and AmbiguityError when two runs reach the same state of N.
  Word feed(Letter a);
  const Word& output() const { return out_; }
  std::size_t live_runs() const { return runs_.size(); }

private:
  struct Run {
    int n_state;
    int s_state;
    std::vector<Word> regs;
  };
  void emit();
  const Nft& N_;
  const Dsst& S_;
  std::vector<Run> runs_;
  Word out_;
};

}  // namespace rfw
