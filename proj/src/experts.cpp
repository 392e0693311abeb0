#include "robust_oco/experts.hpp"

#include <algorithm>
#include <cmath>

namespace robust_oco {

namespace {

void dedup(std::vector<double>& values) {
  values.erase(std::unique(values.begin(), values.end()), values.end());
}

}  // namespace

ExpertGrid build_grid(double a_max, double epsilon, std::size_t T) {
  if (!(a_max >= 2.0)) throw InputError("expert grid requires A_max >= 2");
  if (!(epsilon > 0.0)) throw InputError("expert grid requires epsilon > 0");
  if (T == 0) throw InputError("expert grid requires T >= 1");

  ExpertGrid grid;
  grid.a_max = a_max;
  grid.epsilon = epsilon;
  grid.T = T;

  const double sqrt_t = std::sqrt(static_cast<double>(T));
  const auto n_steps = static_cast<int>(std::ceil(std::log2(a_max)));
  for (int i = 1; i <= n_steps; ++i) {
    grid.step_sizes.push_back(std::min(std::ldexp(1.0, i), a_max) / sqrt_t);
  }
  dedup(grid.step_sizes);

  const double t = static_cast<double>(T);
  const double cap = epsilon * std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(T, 4096))) / t;
  for (std::size_t j = 1; j <= T; ++j) {
    const double d = epsilon * std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(j, 4096))) / t;
    grid.radii.push_back(std::min(d, cap));
    if (std::isinf(grid.radii.back())) break;
  }
  dedup(grid.radii);

  grid.entries.reserve(grid.step_sizes.size() * grid.radii.size());
  for (double alpha : grid.step_sizes) {
    for (double radius : grid.radii) grid.entries.push_back({alpha, radius});
  }
  return grid;
}

double default_a_max(double C, std::size_t T) {
  return std::max(C * std::sqrt(static_cast<double>(T)), 2.0);
}

double beta_default(std::size_t N, std::size_t T, double nu) {
  if (N < 2) throw InputError("beta_default needs at least two experts");
  if (T == 0 || !(nu > 0.0)) throw InputError("beta_default needs T >= 1 and nu > 0");
  return std::sqrt(8.0 * std::log(static_cast<double>(N)) / (static_cast<double>(T) * nu * nu));
}

ExpertPool make_pool(ExpertGrid grid, std::size_t dim, double beta) {
  if (!(beta > 0.0)) throw InputError("expert pool requires beta > 0");
  ExpertPool pool;
  pool.states.reserve(grid.size());
  for (const auto& e : grid.entries) {
    pool.states.push_back({Vector::Zero(static_cast<Eigen::Index>(dim)), e.radius, e.alpha});
  }
  pool.log_weights.assign(grid.size(), 0.0);
  pool.grid = std::move(grid);
  pool.beta = beta;
  return pool;
}

std::vector<double> normalized_weights(const ExpertPool& pool) {
  const auto& lw = pool.log_weights;
  if (lw.empty()) throw InputError("empty expert pool");
  const double max_lw = *std::max_element(lw.begin(), lw.end());
  double sum = 0.0;
  for (double v : lw) sum += std::exp(v - max_lw);
  const double log_z = max_lw + std::log(sum);
  std::vector<double> w(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) w[i] = std::exp(lw[i] - log_z);
  return w;
}

Vector aggregate_action(const ExpertPool& pool) {
  const auto w = normalized_weights(pool);
  Vector theta = Vector::Zero(pool.states.front().theta.size());
  for (std::size_t i = 0; i < w.size(); ++i) theta += w[i] * pool.states[i].theta;
  return theta;
}

PoolStepInfo pool_step(ExpertPool& pool, const SideInfo& s, const RoundLoss& loss,
                       const LearnParams& params) {
  PoolStepInfo info;
  info.losses.resize(pool.states.size());
  info.eta_min = 1.0;
  for (std::size_t i = 0; i < pool.states.size(); ++i) {
    auto& st = pool.states[i];
    const double f = eval_f(loss, s, st.theta);
    info.losses[i] = f;
    const double gate = eta(params, f);
    info.eta_min = std::min(info.eta_min, gate);
    const Vector step = gate * grad_f(loss, s, st.theta);
    st.theta = project_ball(st.theta - st.step_size * step, st.radius);
  }
  for (std::size_t i = 0; i < pool.states.size(); ++i) {
    pool.log_weights[i] -= pool.beta * info.eta_min * info.losses[i];
  }
  return info;
}

}  // namespace robust_oco
