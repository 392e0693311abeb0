#include "robust_oco/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "robust_oco/learners.hpp"

namespace robust_oco {

void record_inequality(CheckReport& report, double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  double slack = (rhs - lhs) / scale;
  if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
  if (report.samples == 0 || slack < report.worst_slack) report.worst_slack = slack;
  ++report.samples;
  if (!(slack >= -kCheckTolerance)) ++report.violations;
}

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
  return std::pow(10.0, u(rng));
}

Vector random_direction(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(dim));
  do {
    for (auto& e : v) e = n(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

struct Instance {
  SideInfo s;
  Vector minimizer;
  Vector theta;
};

SideInfo random_side_info(const RoundLoss& loss, const SampleSpace& space, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dim_dist(1, std::max<std::size_t>(1, space.max_dim));
  const std::size_t dim = dim_dist(rng);
  SideInfo s;
  s.x = random_direction(rng, dim) * space.x_norm_max * log_uniform(rng, 1e-3, 1.0);
  if (loss.family == LossFamily::kRidge) {
    std::normal_distribution<double> n(0.0, 1.0);
    s.y = n(rng) * log_uniform(rng, 1e-2, 1e2);
  } else {
    std::bernoulli_distribution coin(0.5);
    s.y = coin(rng) ? 1.0 : -1.0;
  }
  return s;
}

Instance random_instance(const RoundLoss& loss, const SampleSpace& space, Rng& rng) {
  Instance inst;
  inst.s = random_side_info(loss, space, rng);
  inst.minimizer = minimizer_f(loss, inst.s);
  const double dist = log_uniform(rng, space.min_distance, space.max_distance);
  inst.theta = inst.minimizer + dist * random_direction(rng, inst.s.x.size());
  return inst;
}

std::string label(const std::string& check, const LearnParams& p, const RoundLoss& loss) {
  return fmt::format("{}[{},a={:g},b={:g},lambda={:g}]", check, to_string(loss.family), p.a, p.b,
                     loss.lambda);
}

}  // namespace

CheckReport check_invexity(const LearnParams& params, const RoundLoss& loss,
                           const SampleSpace& space, std::size_t samples, Rng& rng,
                           const TransformGradient& gradient) {
  CheckReport report{label("invexity", params, loss)};
  for (std::size_t i = 0; i < samples; ++i) {
    const Instance inst = random_instance(loss, space, rng);
    const double f = eval_f(loss, inst.s, inst.theta);
    const double gate = eta(params, f);
    const double lhs = eval_g(params, loss, inst.s, inst.theta) -
                       eval_g(params, loss, inst.s, inst.minimizer);
    double rhs = 0.0;
    const Vector g = gradient(params, loss, inst.s, inst.theta);
    if (gate >= std::numeric_limits<double>::min()) {
      // zeta(w*, theta) = (w* - theta) / eta
      rhs = -g.dot(inst.minimizer - inst.theta) / gate;
    } else {
      // eta is subnormal or zero: use the equivalent form <grad f, theta - w*>
      rhs = grad_f(loss, inst.s, inst.theta).dot(inst.theta - inst.minimizer);
    }
    record_inequality(report, lhs, rhs);
  }
  return report;
}

std::vector<double> exp_poly_grid(double c, double r, std::size_t n, double span) {
  const double x0 = std::pow(c, 1.0 / r);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    grid[i] = x0 * std::pow(span, u);
  }
  grid.front() = x0;
  return grid;
}

CheckReport check_exp_trumps_poly(double c, double r, double s, const std::vector<double>& grid) {
  if (!(c > 0.0) || !(r > 0.0) || !(s > 0.0)) throw InputError("c, r, s must be positive");
  const double threshold = std::pow(c, 1.0 / r);
  CheckReport report{fmt::format("exp_trumps_poly[c={:g},r={:g},s={:g}]", c, r, s)};
  for (double x : grid) {
    if (x < threshold) {
      throw InputError(fmt::format("grid point {:g} is below c^(1/r) = {:g}", x, threshold));
    }
    const double log_x = std::log(x);
    const double log_lhs = -c * std::pow(x, s) + r * log_x;  // log(exp(-c x^s) x^r)
    const double log_mid = -s * log_x;                        // log(x^-s)
    const double log_rhs = -(s / r) * std::log(c);            // log(c^(-s/r))
    CheckReport left{}, right{};
    record_inequality(left, log_lhs, log_mid);
    record_inequality(right, log_mid, log_rhs);
    const double slack = std::min(left.worst_slack, right.worst_slack);
    if (report.samples == 0 || slack < report.worst_slack) report.worst_slack = slack;
    ++report.samples;
    if (left.violations + right.violations > 0) ++report.violations;
  }
  return report;
}

CheckReport check_eta_grad_bound(const LearnParams& params, const ProblemConstants& constants,
                                 const RoundLoss& loss, const SampleSpace& space,
                                 std::size_t samples, Rng& rng) {
  CheckReport report{label("eta_grad_bound", params, loss)};
  for (std::size_t i = 0; i < samples; ++i) {
    const Instance inst = random_instance(loss, space, rng);
    const double f = eval_f(loss, inst.s, inst.theta);
    const double lhs = eta(params, f) * grad_f(loss, inst.s, inst.theta).norm();
    record_inequality(report, lhs, constants.psi);
  }
  return report;
}

CheckReport check_eta_f_bound(const LearnParams& params, std::size_t samples) {
  const double nu = derive_constants(params, 0.0, 0.0, 1.0, 0.0).nu;
  CheckReport report{fmt::format("eta_f_bound[a={:g},b={:g}]", params.a, params.b)};
  std::vector<double> points{0.0, params.a, 1.0 / params.a};
  const std::size_t n = samples > points.size() ? samples - points.size() : 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 1.0;
    points.push_back(std::pow(10.0, -12.0 + 24.0 * u));
  }
  for (double f : points) record_inequality(report, eta(params, f) * f, nu);
  return report;
}

CheckReport check_eta_dist_bounds(const LearnParams& params, const ProblemConstants& constants,
                                  const RoundLoss& loss, const SampleSpace& space,
                                  std::size_t samples, Rng& rng) {
  CheckReport report{label("eta_dist_bounds", params, loss)};
  for (std::size_t i = 0; i < samples; ++i) {
    const Instance inst = random_instance(loss, space, rng);
    const double gate = eta(params, eval_f(loss, inst.s, inst.theta));
    const double dist = (inst.theta - inst.minimizer).norm();
    CheckReport first{}, second{};
    record_inequality(first, gate * dist, constants.phi);
    record_inequality(second, gate * dist * dist, constants.kappa);
    const double slack = std::min(first.worst_slack, second.worst_slack);
    if (report.samples == 0 || slack < report.worst_slack) report.worst_slack = slack;
    ++report.samples;
    if (first.violations + second.violations > 0) ++report.violations;
  }
  return report;
}

CheckReport check_grad_fd(const LearnParams& params, const RoundLoss& loss,
                          const SampleSpace& space, std::size_t samples, Rng& rng) {
  constexpr double kRelTol = 1e-5;
  constexpr double kKinkExclusion = 1e-3;
  CheckReport report{label("grad_fd", params, loss)};
  std::size_t drawn = 0;
  while (report.samples < samples) {
    // every draw excluded near the kink is replaced, so `samples` points are compared
    if (++drawn > 100 * samples + 100) break;
    const Instance inst = random_instance(loss, space, rng);
    if (loss.family == LossFamily::kHingeSvm &&
        std::abs(1.0 - inst.s.y * inst.s.x.dot(inst.theta)) < kKinkExclusion) {
      continue;
    }
    const Vector analytic = grad_g(params, loss, inst.s, inst.theta);
    const double h = 1e-6 * (1.0 + inst.theta.norm());
    Vector numeric(analytic.size());
    for (Eigen::Index j = 0; j < analytic.size(); ++j) {
      Vector plus = inst.theta;
      Vector minus = inst.theta;
      plus[j] += h;
      minus[j] -= h;
      numeric[j] = (eval_g(params, loss, inst.s, plus) - eval_g(params, loss, inst.s, minus)) /
                   (2.0 * h);
    }
    const double err = (numeric - analytic).norm() / std::max(1.0, analytic.norm());
    const double slack = kRelTol - err;
    if (report.samples == 0 || slack < report.worst_slack) report.worst_slack = slack;
    ++report.samples;
    if (slack < 0.0) ++report.violations;
  }
  return report;
}

CheckReport check_euclidean_assumptions(const LearnParams& params, const RoundLoss& loss,
                                        const SampleSpace& space, std::size_t samples, Rng& rng) {
  CheckReport report{label("euclidean_assumptions", params, loss)};
  std::uniform_int_distribution<std::size_t> dim_dist(1, std::max<std::size_t>(1, space.max_dim));

  // generalized law of cosines with gamma_1 = gamma_2 = 1
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t dim = dim_dist(rng);
    const Vector v1 = random_direction(rng, dim) * log_uniform(rng, 1e-3, 1e3);
    const Vector v2 = random_direction(rng, dim) * log_uniform(rng, 1e-3, 1e3);
    const Vector v3 = random_direction(rng, dim) * log_uniform(rng, 1e-3, 1e3);
    const double d23 = (v2 - v3).norm();
    const double d31 = (v3 - v1).norm();
    record_inequality(report, (v2 - v1).squaredNorm(), d23 * d23 + d31 * d31 + 2.0 * d23 * d31);
  }

  // first-order update property with gamma_3 = 1, gamma_4 = 1 / eta
  for (std::size_t i = 0; i < samples; ++i) {
    const SideInfo s = random_side_info(loss, space, rng);
    const double radius = log_uniform(rng, 1e-2, 1e3);
    const Vector target = project_ball(minimizer_f(loss, s), radius);
    const Vector theta =
        project_ball(target + log_uniform(rng, space.min_distance, space.max_distance) *
                                  random_direction(rng, s.x.size()),
                     radius);
    const double alpha = log_uniform(rng, 1e-4, 10.0);
    const double gate = eta(params, eval_f(loss, s, theta));
    const Vector g = grad_g(params, loss, s, theta);
    const Vector next = project_ball(theta - alpha * g, radius);
    // 2 alpha eta <-grad g, zeta> with zeta = (target - theta) / eta
    double inner_term = 2.0 * alpha * (-g).dot(target - theta);
    if (gate >= std::numeric_limits<double>::min()) {
      inner_term = 2.0 * alpha * gate * ((-g).dot(target - theta) / gate);
    }
    const double rhs = (theta - target).squaredNorm() + alpha * alpha * g.squaredNorm() - inner_term;
    record_inequality(report, (next - target).squaredNorm(), rhs);
  }
  return report;
}

std::vector<CheckReport> run_oracle_suite(const SuiteOptions& options) {
  struct Setting {
    LearnParams params;
    double lambda;
  };
  const std::vector<Setting> settings{{{10.0, 10.0}, 1e-4}, {{1e4, 10.0}, 1e-4}, {{1.0, 1.0}, 0.5}};
  const SampleSpace far_field{};
  const SampleSpace local{5, 3.0, 1e-6, 10.0};

  std::vector<CheckReport> reports;
  Rng rng = make_substream(options.seed, Substream::kThetaStar);
  const std::size_t n = options.samples;

  for (const auto& setting : settings) {
    for (auto family : {LossFamily::kRidge, LossFamily::kHingeSvm}) {
      const RoundLoss loss{family, setting.lambda};
      const auto growth = gradient_growth(loss, far_field.x_norm_max);
      const auto constants =
          derive_constants(setting.params, growth.G, growth.L, setting.lambda, 0.0);
      reports.push_back(check_invexity(setting.params, loss, far_field, n, rng));
      reports.push_back(check_eta_grad_bound(setting.params, constants, loss, far_field, n, rng));
      reports.push_back(check_eta_dist_bounds(setting.params, constants, loss, far_field, n, rng));
      reports.push_back(check_grad_fd(setting.params, loss, local, n, rng));
      reports.push_back(check_euclidean_assumptions(setting.params, loss, far_field, n, rng));
    }
    reports.push_back(check_eta_f_bound(setting.params, n));
  }

  struct ExpPoly {
    double c, r, s;
  };
  for (const auto& e : std::vector<ExpPoly>{{1, 1, 1}, {1, 1, 2}, {2, 1, 1}, {1, 2, 2}}) {
    reports.push_back(check_exp_trumps_poly(e.c, e.r, e.s, exp_poly_grid(e.c, e.r, n)));
  }
  return reports;
}

}  // namespace robust_oco
