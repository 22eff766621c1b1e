#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rfw/words.hpp"

namespace rfw {

/// Letter index of the left endmarker.
inline constexpr Letter kEndmarker = -1;

enum class Dir { Left, Right };

struct TwoWayMove {
  int to = -1;
  Dir dir = Dir::Right;
  Word out;
};

/// DFA read over the prefix strictly before the head. delta entries may be -1.
struct Lookbehind {
  int initial = 0;
  std::vector<std::vector<int>> delta;
  std::vector<std::string> names;

  int step(int d, Letter a) const { return d < 0 ? -1 : delta[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)]; }
};

/// Deterministic two-way transducer over ⊢x.
class TwoWayTransducer {
public:
  Alphabet input, output;
  std::optional<Lookbehind> lookbehind;

  int add_state(const std::string& name);
  int state_index(const std::string& name) const;
  const std::string& state_name(int q) const { return states_.at(static_cast<std::size_t>(q)); }
  int num_states() const { return static_cast<int>(states_.size()); }
  int initial() const { return initial_; }
  void set_initial(int q) { initial_ = q; }
  std::size_t look_states() const { return lookbehind ? lookbehind->delta.size() : 1; }

  /// `look` is the lookbehind state (0 without lookbehind); a may be kEndmarker, which must move right.
  void set_move(int q, int look, Letter a, TwoWayMove m);
  const TwoWayMove* move(int q, int look, Letter a) const;
  const std::map<std::tuple<int, int, Letter>, TwoWayMove>& moves() const { return moves_; }
  /// True when some transition moves left.
  bool moves_left() const;

private:
  std::vector<std::string> states_;
  int initial_ = 0;
  std::map<std::tuple<int, int, Letter>, TwoWayMove> moves_;
};

struct TwoWayResult {
  enum class Status { Defined, Undefined, Inconclusive };
  Status status = Status::Inconclusive;
  Word out;
  std::size_t steps = 0;
  std::string reason;
};

/// First n output letters of T on x. Undefined on a blocked run or a run confined
/// to a finite window (a loop); Inconclusive when the step budget runs out.
TwoWayResult eval_2dt(const TwoWayTransducer& T, const UPWord& x, std::size_t n, std::size_t step_budget = 5'000'000);

TwoWayTransducer twoway_from_json(const std::string& text);
std::string twoway_to_json(const TwoWayTransducer& T);
TwoWayTransducer load_twoway(const std::string& path);

}  // namespace rfw
