#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfw/words.hpp"

namespace rfw {

/// Output letter or register occurrence.
struct Sym {
  bool is_reg = false;
  int id = 0;
  bool operator==(const Sym& o) const { return is_reg == o.is_reg && id == o.id; }
  bool operator<(const Sym& o) const { return is_reg != o.is_reg ? is_reg < o.is_reg : id < o.id; }
};

using RegWord = std::vector<Sym>;

inline Sym letter_sym(Letter a) { return {false, a}; }
inline Sym reg_sym(int r) { return {true, r}; }

/// Register assignment r -> (B + R)*, indexed by register.
struct Substitution {
  std::vector<RegWord> assign;

  static Substitution identity(std::size_t registers);
  static Substitution empty(std::size_t registers);
  bool operator==(const Substitution& o) const { return assign == o.assign; }
};

/// (s1 o s2)(r) = s1(s2(r)).
Substitution compose(const Substitution& s1, const Substitution& s2);
RegWord apply(const Substitution& s, const RegWord& w);
/// Register contents after the update, given contents before.
std::vector<Word> apply(const Substitution& s, const std::vector<Word>& regs);

/// Entry [r][s] = min(cap, |sigma(s)|_r).
struct CountingMatrix {
  std::size_t n = 0;
  int cap = 2;
  std::vector<int> cell;

  int at(std::size_t r, std::size_t s) const { return cell[r * n + s]; }
  bool operator<(const CountingMatrix& o) const { return cell < o.cell; }
  bool operator==(const CountingMatrix& o) const { return cell == o.cell; }
  int max_entry() const;
  int max_row_sum() const;
};

CountingMatrix counting_matrix(const Substitution& s, int cap);
/// Matrix of s1 o s2.
CountingMatrix multiply(const CountingMatrix& m1, const CountingMatrix& m2);

bool is_copyless(const Substitution& s);
bool is_k_bounded(const Substitution& s, int K);

struct SstEdge {
  int to = -1;
  Substitution update;
};

/// Deterministic streaming string transducer.
class Dsst {
public:
  Alphabet input, output;

  int add_state(const std::string& name);
  int add_register(const std::string& name);
  void set_initial(int q) { initial_ = q; }
  void set_out(int r) { out_ = r; }
  /// Validates the out-register discipline.
  void set_edge(int q, Letter a, int to, Substitution update);

  int num_states() const { return static_cast<int>(states_.size()); }
  std::size_t num_registers() const { return registers_.size(); }
  int initial() const { return initial_; }
  int out() const { return out_; }
  const std::string& state_name(int q) const { return states_.at(static_cast<std::size_t>(q)); }
  const std::string& register_name(int r) const { return registers_.at(static_cast<std::size_t>(r)); }
  int state_index(const std::string& name) const;
  int register_index(const std::string& name) const;
  const SstEdge* edge(int q, Letter a) const;

  std::string render(const RegWord& w) const;
  RegWord parse(const std::string& s) const;

private:
  std::vector<std::string> states_, registers_;
  int initial_ = 0, out_ = 0;
  std::vector<std::vector<std::optional<SstEdge>>> edges_;
};

struct SstRun {
  bool blocked = false;
  std::size_t position = 0;  // letters consumed
  int state = -1;
  std::vector<Word> registers;
  Word out() const;
  int out_index = 0;
};

SstRun eval(const Dsst& S, const Word& prefix);

/// Limit of out on x, exact when the output is ultimately periodic.
/// nullopt when blocked or out stops growing; throws when no period is found.
std::optional<UPWord> eval_limit(const Dsst& S, const UPWord& x);

/// Every composition along reachable paths is K-bounded (K = 0 means copyless).
bool check_bounded(const Dsst& S, int K);
inline bool check_copyless(const Dsst& S) { return check_bounded(S, 0); }

/// Deterministic Büchi automaton with accepting states.
struct Dba {
  std::size_t letters = 0;
  int initial = 0;
  std::vector<std::vector<int>> delta;  // -1 when undefined
  std::vector<bool> accepting;
  std::vector<std::string> names;

  bool accepts(const UPWord& x) const;
};

Dba domain_automaton(const Dsst& S);
Dba universal_dba(std::size_t letters);
Dba empty_dba(std::size_t letters);
Dsst restrict_domain(const Dsst& S, const Dba& D);

}  // namespace rfw
