#include <doctest.h>

#include <cmath>
#include <random>

#include "robust_oco/learners.hpp"

using namespace robust_oco;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

const RoundLoss kRidge0{LossFamily::kRidge, 0.0};
const SideInfo kUnitX{vec({1, 0}), 0.0};

std::vector<SideInfo> random_rounds(std::size_t n, std::uint64_t seed, double outlier_rate) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution outlier(outlier_rate);
  std::vector<SideInfo> rounds;
  for (std::size_t i = 0; i < n; ++i) {
    SideInfo s{Vector(3), 0.0};
    for (auto& e : s.x) e = g(rng);
    s.y = s.x.sum() + 0.01 * g(rng);
    if (outlier(rng)) s.y += 50.0;
    rounds.push_back(s);
  }
  return rounds;
}

}  // namespace

TEST_CASE("project_ball") {
  CHECK((project_ball(vec({3, 4}), 5.0) - vec({3, 4})).norm() == 0.0);
  CHECK((project_ball(vec({3, 4}), 1.0) - vec({0.6, 0.8})).norm() == doctest::Approx(0.0));
  CHECK((project_ball(vec({3, 4}), kUnbounded) - vec({3, 4})).norm() == 0.0);
  CHECK_THROWS_AS(project_ball(vec({3, 4}), 0.0), InputError);
}

TEST_CASE("ogd_step worked examples") {
  const LearnerState start{vec({1, 0}), kUnbounded, 0.5};
  CHECK(ogd_step(start, kUnitX, kRidge0).theta.norm() == doctest::Approx(0.0));

  const LearnerState bounded{vec({1, 0}), 0.5, 0.5};
  // the starting point lies outside the ball, the update lands at the origin
  CHECK(ogd_step(bounded, kUnitX, kRidge0).theta.norm() == doctest::Approx(0.0));

  const RoundLoss ridge{LossFamily::kRidge, 2.0};
  const SideInfo s{vec({1, 0}), 2.0};
  const LearnerState at_min{minimizer_f(ridge, s), kUnbounded, 0.3};
  CHECK((ogd_step(at_min, s, ridge).theta - at_min.theta).norm() < 1e-15);
}

TEST_CASE("learn_step worked examples") {
  const LearnerState start{vec({1, 0}), kUnbounded, 0.5};
  const Vector next = learn_step(start, kUnitX, kRidge0, {1, 1}).theta;
  CHECK(next[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(next[1] == 0.0);

  const LearnerState far{vec({1e4, 0}), kUnbounded, 0.5};
  const Vector damped = learn_step(far, kUnitX, kRidge0, {1, 1}).theta;
  CHECK((damped - far.theta).norm() < 1e-12);
}

TEST_CASE("learn_step update is bounded by alpha psi") {
  const RoundLoss loss{LossFamily::kRidge, 0.1};
  const LearnParams params{10, 10};
  const double X = 3.0;
  const auto gl = gradient_growth(loss, X);
  const double psi = derive_constants(params, gl.G, gl.L, loss.lambda, 0.0).psi;
  for (const auto& s : random_rounds(200, 4, 0.3)) {
    SideInfo bounded = s;
    if (bounded.x.norm() > X) bounded.x *= X / bounded.x.norm();
    const LearnerState st{vec({4, -2, 7}), kUnbounded, 0.2};
    const Vector next = learn_step(st, bounded, loss, params).theta;
    CHECK((next - st.theta).norm() <= 0.2 * psi * (1 + 1e-12));
  }
}

TEST_CASE("top-k filter worked examples") {
  SUBCASE("k = 0 is a plain OGD update") {
    TopKBuffer buffer(0);
    const LearnerState st{vec({1, 0}), kUnbounded, 0.5};
    const auto r = topk_filter_step(st, buffer, kUnitX, kRidge0);
    CHECK_FALSE(r.filtered);
    CHECK(r.state.theta == ogd_step(st, kUnitX, kRidge0).theta);
  }
  SUBCASE("norm below twice the minimum updates and keeps the buffer") {
    TopKBuffer buffer(1);
    buffer.insert(5.0);
    const LearnerState st{vec({1.5, 0}), kUnbounded, 0.1};  // gradient (3, 0)
    const auto r = topk_filter_step(st, buffer, kUnitX, kRidge0);
    CHECK_FALSE(r.filtered);
    CHECK(r.state.theta[0] == doctest::Approx(1.2));
    CHECK(buffer.sorted() == std::vector<double>{5.0});
  }
  SUBCASE("norm at least twice the minimum is filtered and replaces it") {
    TopKBuffer buffer(1);
    buffer.insert(5.0);
    const LearnerState st{vec({6, 0}), kUnbounded, 0.1};  // gradient (12, 0)
    const auto r = topk_filter_step(st, buffer, kUnitX, kRidge0);
    CHECK(r.filtered);
    CHECK(r.state.theta == st.theta);
    CHECK(buffer.sorted() == std::vector<double>{12.0});
  }
  SUBCASE("rounds are filtered while the buffer fills") {
    TopKBuffer buffer(2);
    LearnerState st{vec({1.5, 0}), kUnbounded, 0.1};
    const auto first = topk_filter_step(st, buffer, kUnitX, kRidge0);
    CHECK(first.filtered);
    CHECK(buffer.size() == 1);
    const auto second = topk_filter_step(first.state, buffer, kUnitX, kRidge0);
    CHECK(second.filtered);
    CHECK(buffer.full());
    CHECK(buffer.sorted() == std::vector<double>{3.0, 3.0});
  }
}

TEST_CASE("top-k buffer keeps the largest norms") {
  TopKBuffer buffer(3);
  CHECK_THROWS_AS(buffer.min(), InputError);
  for (double n : {4.0, 1.0, 7.0}) buffer.insert(n);
  CHECK(buffer.min() == 1.0);
  buffer.replace_min(0.5);
  CHECK(buffer.sorted() == std::vector<double>{1.0, 4.0, 7.0});
  buffer.replace_min(9.0);
  CHECK(buffer.sorted() == std::vector<double>{4.0, 7.0, 9.0});
}

TEST_CASE("top-k with k = 0 reproduces OGD bit for bit") {
  const RoundLoss loss{LossFamily::kRidge, 1e-3};
  LearnerState ogd{Vector::Zero(3), kUnbounded, 0.05};
  LearnerState topk = ogd;
  TopKBuffer buffer(0);
  for (const auto& s : random_rounds(1000, 9, 0.1)) {
    ogd = ogd_step(ogd, s, loss);
    topk = topk_filter_step(topk, buffer, s, loss).state;
    REQUIRE(ogd.theta == topk.theta);
  }
}

TEST_CASE("iterates stay inside a finite radius") {
  const RoundLoss loss{LossFamily::kRidge, 1e-3};
  const double radius = 0.7;
  LearnerState ogd{Vector::Zero(3), radius, 0.3};
  LearnerState learn = ogd, topk = ogd;
  TopKBuffer buffer(5);
  for (const auto& s : random_rounds(500, 2, 0.2)) {
    ogd = ogd_step(ogd, s, loss);
    learn = learn_step(learn, s, loss, {1, 1});
    topk = topk_filter_step(topk, buffer, s, loss).state;
    CHECK(ogd.theta.norm() <= radius * (1 + 1e-12));
    CHECK(learn.theta.norm() <= radius * (1 + 1e-12));
    CHECK(topk.theta.norm() <= radius * (1 + 1e-12));
  }
}

TEST_CASE("uncertain top-k budget") {
  CHECK(uncertain_topk_budget(0) == 0);
  CHECK(uncertain_topk_budget(1) == 0);
  CHECK(uncertain_topk_budget(4) == 3);
  CHECK(uncertain_topk_budget(464) == 348);
  CHECK(uncertain_topk_budget(2500) == 1875);
}

TEST_CASE("theoretical_stepsize") {
  CHECK(theoretical_stepsize(1.0, 0.0, 2.0, 4) == doctest::Approx(0.5));
  CHECK(theoretical_stepsize(1.0, 1.0, 1.0, 10) == doctest::Approx(1.0));
  CHECK(theoretical_stepsize(3.0, 0.0, 5.0, 49) == doctest::Approx(2.0 * 3.0 / (5.0 * 7.0)));
  CHECK_THROWS_AS(theoretical_stepsize(0.0, 0.0, 1.0, 4), InputError);
  CHECK_THROWS_AS(theoretical_stepsize(1.0, -1.0, 1.0, 4), InputError);
}
