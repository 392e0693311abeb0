#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "robust_oco/loss.hpp"

namespace robust_oco {

/// Radius value denoting an unbounded domain.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Euclidean projection onto {|theta| <= radius}. Throws InputError for radius <= 0.
Vector project_ball(const Vector& theta, double radius);

struct LearnerState {
  Vector theta;
  double radius = kUnbounded;
  double step_size = 1.0;
};

/// Projected online gradient step on f.
LearnerState ogd_step(LearnerState state, const SideInfo& s, const RoundLoss& loss);

/// Projected gradient step on the transformed loss g (gradient eta(f) * grad f).
LearnerState learn_step(LearnerState state, const SideInfo& s, const RoundLoss& loss,
                        const LearnParams& params);

/// The k largest gradient norms seen on filtered rounds. A budget of 0 disables filtering.
class TopKBuffer {
 public:
  explicit TopKBuffer(std::size_t budget = 0) : budget_(budget) {}

  std::size_t budget() const { return budget_; }
  std::size_t size() const { return norms_.size(); }
  bool full() const { return norms_.size() >= budget_; }
  double min() const;
  /// Stored norms in ascending order.
  std::vector<double> sorted() const;

  void insert(double norm);
  /// Replaces the current minimum with `norm` when `norm` exceeds it.
  void replace_min(double norm);

 private:
  std::size_t budget_;
  std::vector<double> norms_;  // min-heap
};

struct TopKStepResult {
  LearnerState state;
  bool filtered = false;
};

/// Top-k gradient filter in front of OGD.
///
/// While the buffer holds fewer than k norms, each round is filtered and its norm stored.
/// Afterwards a round with norm n < 2 min(buffer) gets the OGD update and leaves the
/// buffer untouched; any other round is filtered and n replaces the buffer minimum.
TopKStepResult topk_filter_step(LearnerState state, TopKBuffer& buffer, const SideInfo& s,
                                const RoundLoss& loss);

/// Budget handed to the Uncertain Top-k baseline: floor(0.75 k).
std::size_t uncertain_topk_budget(std::size_t k);

/// sqrt((4D^2 + 6 D V_T) / (psi^2 T)).
double theoretical_stepsize(double D, double V_T, double psi, std::size_t T);

}  // namespace robust_oco
