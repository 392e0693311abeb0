#include "robust_oco/learners.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace robust_oco {

Vector project_ball(const Vector& theta, double radius) {
  if (!(radius > 0.0)) throw InputError("projection radius must be positive");
  if (std::isinf(radius)) return theta;
  const double norm = theta.norm();
  if (norm <= radius) return theta;
  return theta * (radius / norm);
}

LearnerState ogd_step(LearnerState state, const SideInfo& s, const RoundLoss& loss) {
  state.theta =
      project_ball(state.theta - state.step_size * grad_f(loss, s, state.theta), state.radius);
  return state;
}

LearnerState learn_step(LearnerState state, const SideInfo& s, const RoundLoss& loss,
                        const LearnParams& params) {
  state.theta = project_ball(state.theta - state.step_size * grad_g(params, loss, s, state.theta),
                             state.radius);
  return state;
}

double TopKBuffer::min() const {
  if (norms_.empty()) throw InputError("empty top-k buffer has no minimum");
  return norms_.front();
}

std::vector<double> TopKBuffer::sorted() const {
  std::vector<double> out = norms_;
  std::sort(out.begin(), out.end());
  return out;
}

void TopKBuffer::insert(double norm) {
  norms_.push_back(norm);
  std::push_heap(norms_.begin(), norms_.end(), std::greater<>{});
}

void TopKBuffer::replace_min(double norm) {
  if (norms_.empty() || norm <= norms_.front()) return;
  std::pop_heap(norms_.begin(), norms_.end(), std::greater<>{});
  norms_.back() = norm;
  std::push_heap(norms_.begin(), norms_.end(), std::greater<>{});
}

TopKStepResult topk_filter_step(LearnerState state, TopKBuffer& buffer, const SideInfo& s,
                                const RoundLoss& loss) {
  if (buffer.budget() == 0) return {ogd_step(std::move(state), s, loss), false};

  const Vector g = grad_f(loss, s, state.theta);
  const double n = g.norm();
  if (!buffer.full()) {
    buffer.insert(n);
    return {std::move(state), true};
  }
  if (n < 2.0 * buffer.min()) {
    state.theta = project_ball(state.theta - state.step_size * g, state.radius);
    return {std::move(state), false};
  }
  buffer.replace_min(n);
  return {std::move(state), true};
}

std::size_t uncertain_topk_budget(std::size_t k) { return (3 * k) / 4; }

double theoretical_stepsize(double D, double V_T, double psi, std::size_t T) {
  if (!(D > 0.0) || !(psi > 0.0) || T == 0) {
    throw InputError("theoretical step size needs D > 0, psi > 0 and T > 0");
  }
  if (V_T < 0.0) throw InputError("path length must be nonnegative");
  return std::sqrt((4.0 * D * D + 6.0 * D * V_T) / (psi * psi * static_cast<double>(T)));
}

}  // namespace robust_oco
