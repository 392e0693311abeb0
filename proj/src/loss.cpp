#include "robust_oco/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robust_oco {

namespace {

void check_dims(const SideInfo& s, const Vector& theta) {
  if (s.x.size() != theta.size()) {
    throw InputError("dimension mismatch: x has " + std::to_string(s.x.size()) +
                     " entries, theta has " + std::to_string(theta.size()));
  }
}

// 1 - y <x, theta>
double hinge_slack(const SideInfo& s, const Vector& theta) { return 1.0 - s.y * s.x.dot(theta); }

}  // namespace

std::string to_string(LossFamily family) {
  switch (family) {
    case LossFamily::kRidge:
      return "ridge";
    case LossFamily::kHingeSvm:
      return "svm";
  }
  return "unknown";
}

void LearnParams::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InputError("learn params require a > 0 and b > 0");
  }
}

double eval_f(const RoundLoss& loss, const SideInfo& s, const Vector& theta) {
  check_dims(s, theta);
  const double reg = 0.5 * loss.lambda * theta.squaredNorm();
  switch (loss.family) {
    case LossFamily::kRidge: {
      const double r = s.y - s.x.dot(theta);
      return reg + r * r;
    }
    case LossFamily::kHingeSvm:
      return reg + std::max(0.0, hinge_slack(s, theta));
  }
  return reg;
}

Vector grad_f(const RoundLoss& loss, const SideInfo& s, const Vector& theta) {
  check_dims(s, theta);
  Vector g = loss.lambda * theta;
  switch (loss.family) {
    case LossFamily::kRidge:
      g -= 2.0 * (s.y - s.x.dot(theta)) * s.x;
      break;
    case LossFamily::kHingeSvm:
      if (hinge_slack(s, theta) > 0.0) g -= s.y * s.x;
      break;
  }
  return g;
}

Vector minimizer_f(const RoundLoss& loss, const SideInfo& s) {
  const double xx = s.x.squaredNorm();
  if (loss.lambda == 0.0 && xx == 0.0) {
    throw InputError("minimizer undefined for lambda = 0 and x = 0");
  }
  switch (loss.family) {
    case LossFamily::kRidge:
      return (2.0 * s.y / (loss.lambda + 2.0 * xx)) * s.x;
    case LossFamily::kHingeSvm: {
      if (xx == 0.0) return Vector::Zero(s.x.size());
      const double scale = loss.lambda > 0.0 ? std::min(1.0 / loss.lambda, 1.0 / xx) : 1.0 / xx;
      return (scale * s.y) * s.x;
    }
  }
  return Vector::Zero(s.x.size());
}

double eta(const LearnParams& params, double f_val) {
  if (f_val < 0.0) throw InputError("eta requires a nonnegative loss value");
  const double e = std::exp(f_val / params.a);
  if (!std::isfinite(e)) return 0.0;
  return 1.0 / (1.0 + params.b * e);
}

double transform_value(const LearnParams& params, double f_val) {
  return -params.a * std::log(params.b) -
         params.a * std::log1p(std::exp(-f_val / params.a) / params.b);
}

double eval_g(const LearnParams& params, const RoundLoss& loss, const SideInfo& s,
              const Vector& theta) {
  return transform_value(params, eval_f(loss, s, theta));
}

Vector grad_g(const LearnParams& params, const RoundLoss& loss, const SideInfo& s,
              const Vector& theta) {
  return eta(params, eval_f(loss, s, theta)) * grad_f(loss, s, theta);
}

ProblemConstants derive_constants(const LearnParams& params, double G, double L, double m,
                                  double B) {
  params.validate();
  if (!(m > 0.0)) throw InputError("strong convexity modulus m must be positive");
  const double a = params.a;
  const double b = params.b;

  ProblemConstants c;
  c.G = G;
  c.L = L;
  c.m = m;
  c.B = B;
  c.psi = G + std::max(m * L / (2.0 * a * b), 4.0 * a * a * L / (m * m * b));
  c.phi = std::max(m / (2.0 * a), 4.0 * a * a / (m * m)) / b;
  c.kappa = std::max(m / (2.0 * a), 2.0 * a / m) / b;
  c.nu = std::max(a, 1.0 / a) / b;
  c.xi = 1.0 + b * std::exp(B / a);
  return c;
}

GradientGrowth gradient_growth(const RoundLoss& loss, double x_norm_max) {
  switch (loss.family) {
    case LossFamily::kRidge:
      return {0.0, loss.lambda + 2.0 * x_norm_max * x_norm_max};
    case LossFamily::kHingeSvm:
      return {2.0 * x_norm_max, loss.lambda};
  }
  return {};
}

double eval_reference_loss(ReferenceLoss kind, double r, double c) {
  if (!(c > 0.0)) throw InputError("reference loss scale c must be positive");
  const double u = r / c;
  switch (kind) {
    case ReferenceLoss::kTukey: {
      if (std::abs(r) > c) return c * c / 6.0;
      const double w = 1.0 - u * u;
      return c * c / 6.0 * (1.0 - w * w * w);
    }
    case ReferenceLoss::kWelsch:
      return 1.0 - std::exp(-0.5 * u * u);
  }
  return 0.0;
}

}  // namespace robust_oco
