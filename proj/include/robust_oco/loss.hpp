#pragma once

#include <Eigen/Core>

#include <string>

#include "robust_oco/errors.hpp"

namespace robust_oco {

using Vector = Eigen::VectorXd;

/// One round's observation: features x and a response (regression) or a label in {-1, +1}.
struct SideInfo {
  Vector x;
  double y = 0.0;
};

enum class LossFamily { kRidge, kHingeSvm };

std::string to_string(LossFamily family);

/// Per-round loss with an L2 regularizer of weight lambda, hence lambda-strongly convex.
///   Ridge:    (lambda/2)|theta|^2 + (y - <x, theta>)^2
///   HingeSvm: (lambda/2)|theta|^2 + max(0, 1 - y <x, theta>)
struct RoundLoss {
  LossFamily family = LossFamily::kRidge;
  double lambda = 1e-4;
};

/// Constants (a, b) of the log-exponential transform g = -a log(exp(-f/a) + b).
struct LearnParams {
  double a = 1.0;
  double b = 1.0;

  /// Throws InputError unless a > 0 and b > 0.
  void validate() const;
};

/// Environment constants and the quantities derived from them.
///
/// G and L bound the gradient growth |grad f(theta)| <= G + L |theta - w*|, m is the
/// strong-convexity modulus and B bounds the clean-round loss of the learner.
struct ProblemConstants {
  double G = 0.0;
  double L = 0.0;
  double m = 1.0;
  double B = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  double kappa = 0.0;
  double nu = 0.0;
  double xi = 0.0;
};

double eval_f(const RoundLoss& loss, const SideInfo& s, const Vector& theta);

/// Gradient of f. For the hinge family this is a subgradient; at margin exactly 1 the
/// zero-hinge branch (lambda * theta) is returned.
Vector grad_f(const RoundLoss& loss, const SideInfo& s, const Vector& theta);

/// Unconstrained argmin of f(s, .). Both families have it in closed form along x:
///   Ridge:    2y x / (lambda + 2|x|^2)
///   HingeSvm: min(1/lambda, 1/|x|^2) y x
Vector minimizer_f(const RoundLoss& loss, const SideInfo& s);

/// Gate exp(-f/a) / (b + exp(-f/a)), evaluated as 1 / (1 + b exp(f/a)). Saturates to
/// exactly 0 once exp(f/a) overflows.
double eta(const LearnParams& params, double f_val);

/// g = -a log(exp(-f/a) + b), evaluated as -a log(b) - a log1p(exp(-f/a) / b).
double transform_value(const LearnParams& params, double f_val);

double eval_g(const LearnParams& params, const RoundLoss& loss, const SideInfo& s,
              const Vector& theta);

/// grad g = eta(f) * grad f.
Vector grad_g(const LearnParams& params, const RoundLoss& loss, const SideInfo& s,
              const Vector& theta);

ProblemConstants derive_constants(const LearnParams& params, double G, double L, double m,
                                  double B);

/// Gradient-growth constants (G, L) valid for every side information with |x| <= x_norm_max.
///
/// Ridge: grad f(theta) = (lambda I + 2 x x^T)(theta - w*), so G = 0, L = lambda + 2 X^2.
/// Hinge: grad f(theta) - lambda (theta - w*) = lambda w* - y x 1[active], whose norm is at
/// most 2X, so G = 2X, L = lambda.
struct GradientGrowth {
  double G = 0.0;
  double L = 0.0;
};
GradientGrowth gradient_growth(const RoundLoss& loss, double x_norm_max);

enum class ReferenceLoss { kTukey, kWelsch };

/// Tukey biweight and Welsch losses of a residual r with scale c, for comparison plots.
double eval_reference_loss(ReferenceLoss kind, double r, double c);

}  // namespace robust_oco
