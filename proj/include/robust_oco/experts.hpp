#pragma once

#include <cstddef>
#include <vector>

#include "robust_oco/learners.hpp"

namespace robust_oco {

/// One (step size, radius) pair of the expert grid.
struct ExpertParams {
  double alpha = 0.0;
  double radius = 0.0;
};

/// Product grid of step sizes and radii.
///
///   step sizes: min(2^i, A_max) / sqrt(T),   i = 1..ceil(log2 A_max)
///   radii:      min(eps 2^j, eps 2^T) / T,   j = 1..T
///
/// Both lists are deduplicated after capping. Radii past the double range evaluate to
/// +inf and collapse into one unbounded entry.
struct ExpertGrid {
  double a_max = 2.0;
  double epsilon = 1.0;
  std::size_t T = 1;
  std::vector<double> step_sizes;
  std::vector<double> radii;
  std::vector<ExpertParams> entries;

  std::size_t size() const { return entries.size(); }
};

ExpertGrid build_grid(double a_max, double epsilon, std::size_t T);

/// Default grid cap max(C sqrt(T), 2).
double default_a_max(double C, std::size_t T);

/// sqrt(8 ln N / (T nu^2)).
double beta_default(std::size_t N, std::size_t T, double nu);

struct ExpertPool {
  ExpertGrid grid;
  std::vector<LearnerState> states;
  std::vector<double> log_weights;
  double beta = 1.0;
};

/// Pool with every expert at theta = 0 and unit weights.
ExpertPool make_pool(ExpertGrid grid, std::size_t dim, double beta);

/// Weighted average of expert actions with log-sum-exp normalization.
Vector aggregate_action(const ExpertPool& pool);

/// Normalized weights exp(log w - logsumexp(log w)).
std::vector<double> normalized_weights(const ExpertPool& pool);

/// Per-round diagnostics of a pool update.
struct PoolStepInfo {
  double eta_min = 0.0;
  std::vector<double> losses;  ///< f(s, theta^tau) before the update
};

/// Advances every expert with its own LEARN step and decays log-weights by
/// beta * min_tau eta(f^tau) * f^tau, using the pre-update losses.
PoolStepInfo pool_step(ExpertPool& pool, const SideInfo& s, const RoundLoss& loss,
                       const LearnParams& params);

}  // namespace robust_oco
