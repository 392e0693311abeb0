#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "robust_oco/loss.hpp"
#include "robust_oco/stream.hpp"

namespace robust_oco {

/// Outcome of one inequality check over many samples.
///
/// The slack of a sample is (rhs - lhs) / max(1, |lhs|, |rhs|): absolute below magnitude 1,
/// relative above. worst_slack is the smallest slack seen (NaN counts as -inf); a sample is a
/// violation when its slack is below -kCheckTolerance.
struct CheckReport {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_slack = 0.0;

  bool passed() const { return violations == 0; }
};

inline constexpr double kCheckTolerance = 1e-9;

/// Records one `lhs <= rhs` sample into the report.
void record_inequality(CheckReport& report, double lhs, double rhs);

/// Random instances drawn by the checks. Features are rescaled so that |x| <= x_norm_max;
/// query points sit at distance 10^u from the minimizer with u uniform on
/// [log10 min_distance, log10 max_distance].
struct SampleSpace {
  std::size_t max_dim = 5;
  double x_norm_max = 10.0;
  double min_distance = 1e-6;
  double max_distance = 1e6;
};

/// Gradient of the transformed loss, swappable so a faulty implementation can be checked.
using TransformGradient =
    std::function<Vector(const LearnParams&, const RoundLoss&, const SideInfo&, const Vector&)>;

/// g(theta) - g(w*) <= <grad g(theta), (theta - w*) / eta(f(theta))>, with w* = minimizer_f.
CheckReport check_invexity(const LearnParams& params, const RoundLoss& loss,
                           const SampleSpace& space, std::size_t samples, Rng& rng,
                           const TransformGradient& gradient = grad_g);

/// exp(-c x^s) x^r <= x^-s <= c^(-s/r) on every grid point; points below c^(1/r) are rejected.
/// The first inequality is compared in log space so that tiny magnitudes are still resolved.
CheckReport check_exp_trumps_poly(double c, double r, double s, const std::vector<double>& grid);

/// Log-spaced grid of n points from c^(1/r) up to c^(1/r) * span.
std::vector<double> exp_poly_grid(double c, double r, std::size_t n, double span = 1e6);

/// eta(f(theta)) |grad f(theta)| <= psi for strongly convex losses with m = lambda.
CheckReport check_eta_grad_bound(const LearnParams& params, const ProblemConstants& constants,
                                 const RoundLoss& loss, const SampleSpace& space,
                                 std::size_t samples, Rng& rng);

/// eta(f) f <= nu for f on a log grid spanning [0, 1e12].
CheckReport check_eta_f_bound(const LearnParams& params, std::size_t samples);

/// eta |theta - w*| <= phi and eta |theta - w*|^2 <= kappa.
CheckReport check_eta_dist_bounds(const LearnParams& params, const ProblemConstants& constants,
                                  const RoundLoss& loss, const SampleSpace& space,
                                  std::size_t samples, Rng& rng);

/// Central differences of eval_g against grad_g, relative error <= 1e-5 measured against
/// max(1, |grad g|). Step h = 1e-6 (1 + |theta|). Hinge points within 1e-3 of the kink are
/// skipped and not counted.
CheckReport check_grad_fd(const LearnParams& params, const RoundLoss& loss,
                          const SampleSpace& space, std::size_t samples, Rng& rng);

/// Euclidean law of cosines on random triples, and the first-order update inequality
///   |theta' - theta*|^2 <= |theta - theta*|^2 + alpha^2 |grad g|^2
///                          - 2 alpha eta <-grad g, (theta* - theta) / eta>
/// for projected LEARN steps with theta* the constrained minimizer.
CheckReport check_euclidean_assumptions(const LearnParams& params, const RoundLoss& loss,
                                        const SampleSpace& space, std::size_t samples, Rng& rng);

struct SuiteOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
};

/// Every check over the reference (a, b, lambda) configurations of both loss families.
std::vector<CheckReport> run_oracle_suite(const SuiteOptions& options);

}  // namespace robust_oco
