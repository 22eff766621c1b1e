#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "rfw/nft.hpp"

namespace rfw {

struct ContinuityViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Witness of compatibility: q -u|alpha-> d(q) -u_loop|alpha_loop-> d(q)
/// for every q in C (vectors indexed like C), with some d(q) final.
struct CompatWitness {
  StateSet C;
  std::vector<int> d;
  Word u, u_loop;
  std::vector<Word> alpha, alpha_loop;
};

std::optional<CompatWitness> is_compatible(const Nft& T, const StateSet& C);

/// Pre-step C,u,D: every q in D has a unique u-run from C.
struct StepAnalysis {
  StateSet source, target;
  Word word;
  std::map<int, int> pre;
  std::map<int, Word> val;
  bool step = false;     // pre is onto source
  bool initial = false;  // source is a subset of I
};

std::optional<StepAnalysis> analyze_step(const Nft& T, const StateSet& C, const Word& u, const StateSet& D);

struct AdvanceProfile {
  Word common;
  std::map<int, Word> advance;
  Word max_advance;
};

/// Throws ContinuityViolated when the productions are not mutual prefixes.
AdvanceProfile advance_profile(const StepAnalysis& s);
AdvanceProfile advance_profile(const std::map<int, Word>& val);

std::map<int, UPWord> end_words(const Nft& T, const CompatWitness& w);

/// Runs i(q) -u-> l(q) -u_loop-> l(q) -u_tail-> q for q in C, with two
/// loop outputs of different lengths (components p and q).
struct SeparabilityWitness {
  StateSet C;
  std::vector<int> i, ell;
  Word u, u_loop, u_tail;
  std::vector<Word> alpha, alpha_loop, alpha_tail;
  std::size_t p = 0, q = 0;  // indices into C
};

std::optional<SeparabilityWitness> is_separable(const Nft& T, const StateSet& C);

struct LoopingFuture {
  Word tau, theta;
  UPWord future;  // tau theta^ω
};

enum class ThetaPolicy { Lcm, PaperCapped };

/// Memoizes compatibility, separability, ends and the period length Θ for one transducer.
class AnalysisContext {
public:
  explicit AnalysisContext(Nft T, ThetaPolicy policy = ThetaPolicy::Lcm);

  const Nft& nft() const { return T_; }
  ThetaPolicy policy() const { return policy_; }

  const std::optional<CompatWitness>& compat(const StateSet& C);
  bool is_compatible(const StateSet& C) { return compat(C).has_value(); }
  /// Compatible subsets of S, sorted by the fixed order on state sets.
  const std::vector<StateSet>& comp_subsets(const StateSet& S);
  const std::optional<SeparabilityWitness>& separable(const StateSet& C);
  bool is_separable(const StateSet& C) { return separable(C).has_value(); }
  const std::map<int, UPWord>& ends(const StateSet& C);

  std::size_t omega() const;  // M |Q|^|Q|, saturated
  std::size_t theta_length();
  LoopingFuture looping_future(const StateSet& C, const AdvanceProfile& profile);

  /// Strict total order on state sets: lexicographic on sorted name lists.
  bool precedes(const StateSet& a, const StateSet& b) const;

private:
  Nft T_;
  ThetaPolicy policy_;
  std::map<StateSet, std::optional<CompatWitness>> compat_;
  std::map<StateSet, std::vector<StateSet>> subsets_;
  std::map<StateSet, std::optional<SeparabilityWitness>> separable_;
  std::map<StateSet, std::map<int, UPWord>> ends_;
  std::optional<std::size_t> theta_;
};

struct ContinuityWitness {
  Word u, u_loop;
  int q1 = -1, q2 = -1, p1 = -1, p2 = -1;
  Word alpha1, alpha2, loop1, loop2;
  UPWord out1, out2;
};

struct ContinuityResult {
  bool continuous = true;
  std::optional<ContinuityWitness> witness;
};

/// Checks the loop condition on product paths and cycles of length at most
/// `bound` (default |Q|^2).
ContinuityResult is_continuous(const Nft& T, std::size_t bound = 0);

}  // namespace rfw
