#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robust_oco/experts.hpp"
#include "robust_oco/learners.hpp"
#include "robust_oco/stream.hpp"

namespace robust_oco {

enum class LearnerKind { kOgd, kLearn, kTopK, kUncertainTopK, kLearnExperts };

std::string to_string(LearnerKind kind);
LearnerKind learner_from_string(const std::string& name);

enum class StepMode { kFixed, kTheoretical };

/// Settings of the expert pool. Zero for a_max or beta selects the default.
struct ExpertSpec {
  double a_max = 0.0;
  double epsilon = 1.0;
  double C = 1.0;
  double beta = 0.0;
};

struct RunConfig {
  std::size_t T = 1000;
  LearnerKind learner = LearnerKind::kLearn;
  ExpertSpec experts;
  RoundLoss loss;
  LearnParams params;
  GeneratorKind generator = GeneratorKind::kRidgeModel;
  std::size_t dim = 100;
  std::size_t k = 0;
  CorruptionOperator op = CorruptionOperator::kUniformResponse;
  StepMode step_mode = StepMode::kFixed;
  double alpha = 0.0;  ///< fixed step size; 0 selects 1/sqrt(T)
  std::vector<std::uint64_t> seeds{1};
  double radius = kUnbounded;
  /// Gradient-growth constants. When unset they are derived from the family and the
  /// largest |x| of the stream.
  std::optional<double> G;
  std::optional<double> L;

  /// Throws ConfigError / InputError on invalid combinations.
  void validate() const;
  /// Budget of the Top-k filter implied by the learner kind and k.
  std::size_t filter_budget() const;
};

/// Shared interface of every online learner driven by the harness.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;
  /// Action theta_t played this round.
  virtual Vector action() const = 0;
  /// Observes the emitted side information and moves to theta_{t+1}.
  virtual void update(const SideInfo& s) = 0;
};

std::unique_ptr<OnlineLearner> make_learner(const RunConfig& config, double alpha);

struct RoundRecord {
  std::size_t t = 0;
  bool is_outlier = false;
  Vector theta;                ///< action played
  double f_emitted = 0.0;      ///< f_t(s_t, theta_t)
  Vector comparator_clean;     ///< theta_t*, minimizer for the clean side information
  Vector comparator_emitted;   ///< omega_t*, minimizer for the emitted side information
  double f_at_comparator = 0.0;  ///< f_t(s_t, theta_t*)
  double g_emitted = 0.0;      ///< g_t(s_t, theta_t)
  double x_norm = 0.0;
};

struct RegretCurve {
  std::vector<double> series;  ///< cumulative clean dynamic regret after each round
  double path_length = 0.0;    ///< V_T
  double delta_s = 0.0;        ///< max over corrupted rounds of |omega_t* - theta_t*|
  double comparator_scale = 0.0;  ///< max_t |theta_t*|

  double final_regret() const { return series.empty() ? 0.0 : series.back(); }
};

/// Streaming reduction of round records into a RegretCurve plus B and max |x|.
class RegretAccumulator {
 public:
  void add(const RoundRecord& r);
  const RegretCurve& curve() const { return curve_; }
  double max_clean_loss() const { return max_clean_loss_; }
  double max_x_norm() const { return max_x_norm_; }

 private:
  RegretCurve curve_;
  std::optional<Vector> prev_comparator_;
  double total_ = 0.0;
  double max_clean_loss_ = 0.0;
  double max_x_norm_ = 0.0;
};

/// Everything a cell needs from one episode without retaining per-round vectors.
struct EpisodeSummary {
  std::uint64_t seed = 0;
  RegretCurve curve;
  double alpha = 0.0;
  double max_clean_loss = 0.0;  ///< B measured over clean rounds
  double max_x_norm = 0.0;
  double G = 0.0;
  double L = 0.0;
  Vector final_theta;
  Vector theta_star;
};

using RecordSink = std::function<void(const RoundRecord&)>;

/// Runs T rounds of the configured learner against the seeded stream and hands every
/// record to `sink`. Failures are rethrown with the round index attached.
EpisodeSummary run_episode(const RunConfig& config, std::uint64_t seed, const RecordSink& sink);

std::vector<RoundRecord> run_episode(const RunConfig& config, std::uint64_t seed);

/// Comparator-only pass over the seeded stream: V_T and max |x|, used before a
/// theoretical-step-size run.
struct StreamPrepass {
  double path_length = 0.0;
  double max_x_norm = 0.0;
};
StreamPrepass comparator_prepass(const RunConfig& config, std::uint64_t seed);

/// Step size the episode will use (fixed, default 1/sqrt(T), or theoretical).
double resolve_step_size(const RunConfig& config, const StreamPrepass& prepass);

RegretCurve clean_dynamic_regret(const std::vector<RoundRecord>& records);
double path_length(const std::vector<RoundRecord>& records);
double delta_S(const std::vector<RoundRecord>& records);

struct AggregateSeries {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Pointwise mean and standard error (sample std / sqrt(R)).
AggregateSeries aggregate_runs(const std::vector<std::vector<double>>& curves);
AggregateSeries aggregate_runs(const std::vector<RegretCurve>& curves);

struct BoundReport {
  bool holds = false;
  double measured = 0.0;
  double bound = 0.0;
};

/// Right-hand side of the bounded-domain clean-regret bound
///   xi (psi sqrt((4D^2 + 6 D V_T) T) + k (G phi + L kappa) + k (G + L phi) delta_S)
/// compared against the measured final regret. Throws UsageError unless the run used the
/// theoretical step size in a finite ball.
BoundReport check_regret_bound(const RegretCurve& curve, const ProblemConstants& constants,
                               const RunConfig& config);

/// Constants for the bound check of a finished episode (m = lambda, B measured).
ProblemConstants episode_constants(const RunConfig& config, const EpisodeSummary& summary);

/// All seeds of one (learner, k) cell, executed on a bounded worker pool. Results are
/// ordered as config.seeds.
struct CellResult {
  std::vector<EpisodeSummary> episodes;
  AggregateSeries aggregate;
};
CellResult run_cell(const RunConfig& config, std::size_t max_workers = 0);

}  // namespace robust_oco
