#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfw/analysis.hpp"
#include "rfw/annotator.hpp"
#include "rfw/sst.hpp"

namespace rfw {

/// Strictly decreasing chain C1 ⊋ C2 ⊋ ... of compatible sets, C1 the current set.
using TreePath = std::vector<StateSet>;

/// All chains of tree(C), parents before children.
std::vector<TreePath> tree_of(AnalysisContext& ctx, const StateSet& C);

struct InvariantViolation : std::runtime_error {
  InvariantViolation(std::string id, const std::string& what) : std::runtime_error("invariant " + id + ": " + what), id(std::move(id)) {}
  std::string id;
};

struct DeterminizerState {
  bool separable = false;
  StateSet J, C;
  std::map<int, int> pre;
  std::map<int, Word> lag;
  Word max_lag;
  Word out;
  // Separable mode only.
  Word theta;
  std::map<TreePath, std::map<int, int>> nb;  // every path of tree(C), root included
  std::map<TreePath, Word> regs;              // out_π for non-root paths
  std::map<int, Word> last;

  bool lagging(int q) const;
  /// Right-hand side of the production equation for a path ending in {q}.
  Word production(const TreePath& path) const;
};

/// One letter of the annotated stream as applied to the register store.
struct TraceStep {
  std::size_t index = 0;  // letters consumed after this step
  bool separable = false;
  StateSet C;
  Word emitted;
  std::string kind;  // init, nonsep, aligned, close, nonclose
  std::map<int, RegWord> update;  // register id -> expression over ids before the step
  std::string json;
};

/// Streaming interpreter of the determinized machine over the annotated stream.
class Determinizer {
public:
  explicit Determinizer(AnalysisContext& ctx);

  /// Returns the emitted output.
  Word init(const StateSet& C0);
  Word step(Letter a, const StateSet& next);

  Word step_nonsep(Letter a, const StateSet& next);
  Word step_sep_aligned(Letter a, const StateSet& next);
  /// Reduces C to the preimage of `next` in C; `kind` is set to close or nonclose.
  Word preprocess(Letter a, const StateSet& next, std::string& kind);
  void resize_last();

  const DeterminizerState& state() const { return s_; }
  DeterminizerState& mutable_state() { return s_; }
  AnalysisContext& context() { return ctx_; }

  void set_trace(bool on) { trace_on_ = on; }
  const std::vector<TraceStep>& trace() const { return trace_; }
  /// Register names by id; id 0 is out.
  const std::vector<TreePath>& register_names() const { return reg_names_; }

private:
  // Register store: symbolic contents during a step, over the ids live at its start.
  const std::vector<TreePath>& tree(const StateSet& C);
  void begin();
  Word commit(const std::string& kind);
  int reg_id(const TreePath& p);
  RegWord& sym(const TreePath& p);  // empty path = out
  bool reg_empty(const TreePath& p) const;
  void append_word(const TreePath& p, const Word& w);
  void enter_separable(const std::map<int, Word>& alpha);
  void leave_separable(const std::map<int, Word>& alpha);
  void down(const TreePath& path);
  Word power_theta(std::size_t n) const;

  AnalysisContext& ctx_;
  DeterminizerState s_;
  int depth_ = 0;
  std::size_t letters_ = 0;
  std::map<TreePath, RegWord> sym_;
  std::map<int, Word> start_store_;
  std::size_t start_out_len_ = 0;
  std::map<TreePath, int> reg_ids_;
  std::vector<TreePath> reg_names_;
  std::map<StateSet, std::vector<TreePath>> trees_;
  bool trace_on_ = false;
  std::vector<TraceStep> trace_;
};

/// Direct checks of invariants 1-4 against oracle values.
class InvariantChecker {
public:
  explicit InvariantChecker(AnalysisContext& ctx);
  void start(const StateSet& C0);
  void advance(Letter a, const StateSet& next);
  /// Throws InvariantViolation.
  void check(const DeterminizerState& s);

private:
  AnalysisContext& ctx_;
  Word prefix_;
  std::vector<StateSet> sets_;                 // C_0 .. C_i
  std::vector<std::map<int, int>> back_;       // back_[j]: C_j -> C_{j-1}
  std::vector<std::map<int, Word>> vals_;      // vals_[j]: production of the run into q ∈ C_j
  std::vector<std::map<int, int>> origin_;     // origin_[j]: initial state of the run into q
  std::map<StateSet, std::size_t> witness_;
  std::vector<Word> futures_;
};

struct PipelineOptions {
  bool check_invariants = false;
  bool trace = false;
  std::size_t max_lookahead = 0;
  ThetaPolicy theta = ThetaPolicy::Lcm;
};

struct PipelineResult {
  Word out;
  std::vector<std::size_t> out_lengths;  // after init and after each letter
  std::vector<StateSet> annotation;
  std::vector<TraceStep> trace;
  std::vector<TreePath> register_names;
  std::size_t theta_length = 0;
};

struct NotContinuousError : std::runtime_error {
  NotContinuousError(const std::string& what, ContinuityWitness w) : std::runtime_error(what), witness(std::move(w)) {}
  ContinuityWitness witness;
};

/// Normalizes T and checks its preconditions; throws NotContinuousError or std::invalid_argument.
Nft prepare_transducer(const Nft& T);

/// Annotator feeding the determinizer, one letter at a time.
class Pipeline {
public:
  explicit Pipeline(const Nft& T, const PipelineOptions& opt = {});
  /// Hands a letter to the annotator.
  void push(Letter a);
  /// Performs one determinizer step (or the initialization) when its set is known.
  bool advance();
  /// Determinizer steps taken, initialization excluded.
  std::size_t steps() const { return pushed_ - letters_.size(); }
  bool started() const { return started_; }
  const Word& out() const { return det_.state().out; }
  const std::vector<std::size_t>& out_lengths() const { return out_lengths_; }
  const std::vector<StateSet>& annotation() const { return annotation_; }
  const Determinizer& determinizer() const { return det_; }
  std::size_t theta_length() { return ctx_->theta_length(); }

private:
  std::unique_ptr<AnalysisContext> ctx_;
  Annotator ann_;
  Determinizer det_;
  std::optional<InvariantChecker> checker_;
  std::deque<StateSet> ready_;
  std::deque<Letter> letters_;
  std::size_t pushed_ = 0;
  bool started_ = false;
  std::vector<std::size_t> out_lengths_;
  std::vector<StateSet> annotation_;
};

/// Runs annotator and determinizer for `letters` letters of x.
PipelineResult run_pipeline(const Nft& T, const UPWord& x, std::size_t letters, const PipelineOptions& opt = {});

/// Largest entry of the counting-matrix product over every window of the trace.
int max_window_count(const std::vector<TraceStep>& trace, std::size_t registers);

}  // namespace rfw
