#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfw/words.hpp"

namespace rfw {

using StateSet = std::vector<int>;  // sorted, duplicate free

StateSet make_set(std::vector<int> states);
bool subset_of(const StateSet& a, const StateSet& b);
bool contains(const StateSet& s, int q);

struct Transition {
  int from = 0;
  Letter letter = 0;
  int to = 0;
  Word out;
};

/// One-way nondeterministic Büchi transducer.
class Nft {
public:
  Alphabet input;
  Alphabet output;

  int add_state(const std::string& name, bool initial = false, bool final = false);
  void add_transition(int from, Letter a, int to, Word out);

  int num_states() const { return static_cast<int>(names_.size()); }
  const std::string& state_name(int q) const { return names_.at(static_cast<std::size_t>(q)); }
  int state_index(const std::string& name) const;
  bool is_initial(int q) const { return initial_.at(static_cast<std::size_t>(q)); }
  bool is_final(int q) const { return final_.at(static_cast<std::size_t>(q)); }
  void set_initial(int q, bool v) { initial_.at(static_cast<std::size_t>(q)) = v; }
  void set_final(int q, bool v) { final_.at(static_cast<std::size_t>(q)) = v; }
  StateSet initial_set() const;
  StateSet final_set() const;
  StateSet all_states() const;

  const std::vector<Transition>& transitions() const { return trans_; }
  const Transition& transition(int t) const { return trans_.at(static_cast<std::size_t>(t)); }
  const std::vector<int>& out_of(int q) const { return by_state_.at(static_cast<std::size_t>(q)); }
  const std::vector<int>& out_of(int q, Letter a) const;

  std::string set_name(const StateSet& s) const;
  std::size_t max_output_length() const;

private:
  std::vector<std::string> names_;
  std::vector<bool> initial_, final_;
  std::vector<Transition> trans_;
  std::vector<std::vector<int>> by_state_;
  std::vector<std::vector<std::vector<int>>> by_letter_;
  static const std::vector<int> empty_;
};

struct AmbiguityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotContinuous : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Restriction of T to states that are accessible and co-accessible
/// (able to reach a cycle through a final state).
Nft trim(const Nft& T);

/// No cycle through a final state produces ε.
bool is_clean(const Nft& T);
Nft clean(const Nft& T);

bool is_unambiguous(const Nft& T);

/// Unique accepting run of T over an ultimately periodic input.
struct OracleRun {
  std::vector<int> stem;   // states at positions 0 .. stem.size()-1
  std::vector<int> cycle;  // states at the following positions, repeated
  std::vector<int> stem_transitions;
  std::vector<int> cycle_transitions;
  int state_at(std::size_t i) const;
};

std::optional<OracleRun> oracle_run(const Nft& T, const UPWord& x);
std::optional<UPWord> oracle_eval(const Nft& T, const UPWord& x);

StateSet push(const Nft& T, const StateSet& S, const Word& u);

/// Output of some accepting lasso starting in q, if any.
std::optional<UPWord> accepting_lasso_output(const Nft& T, int q);

struct ConstantState {
  int state = -1;
  int partner = -1;  // final state running alongside
  Word u, u_loop;
  Word alpha1, alpha2, loop1;
  UPWord beta;
};

std::vector<ConstantState> constant_states(const Nft& T);
bool is_productive(const Nft& T);
Nft make_productive(const Nft& T);

}  // namespace rfw
