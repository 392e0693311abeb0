#include "robust_oco/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace robust_oco {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kOgd:
      return "ogd";
    case LearnerKind::kLearn:
      return "learn";
    case LearnerKind::kTopK:
      return "topk";
    case LearnerKind::kUncertainTopK:
      return "uncertain_topk";
    case LearnerKind::kLearnExperts:
      return "learn_experts";
  }
  return "unknown";
}

LearnerKind learner_from_string(const std::string& name) {
  for (auto kind : {LearnerKind::kOgd, LearnerKind::kLearn, LearnerKind::kTopK,
                    LearnerKind::kUncertainTopK, LearnerKind::kLearnExperts}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown learner '" + name + "'");
}

void RunConfig::validate() const {
  if (T == 0) throw ConfigError("T must be at least 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (dim == 0) throw ConfigError("dim must be at least 1");
  if (generator == GeneratorKind::kSvmModel && dim != 2) {
    throw ConfigError("the svm generator is two-dimensional");
  }
  if (k > T) throw ConfigError("k cannot exceed T");
  if (!(loss.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  if (alpha < 0.0) throw ConfigError("alpha must be nonnegative");
  params.validate();
  const bool ridge_pair = loss.family == LossFamily::kRidge && generator == GeneratorKind::kRidgeModel;
  const bool svm_pair = loss.family == LossFamily::kHingeSvm && generator == GeneratorKind::kSvmModel;
  if (!ridge_pair && !svm_pair) throw ConfigError("loss family does not match the generator");
  if (k > 0 && default_operator(generator) != op) {
    throw ConfigError("corruption operator " + to_string(op) + " does not fit the " +
                      to_string(generator) + " generator");
  }
  if (step_mode == StepMode::kTheoretical && std::isinf(radius)) {
    throw ConfigError("the theoretical step size needs a finite radius");
  }
}

std::size_t RunConfig::filter_budget() const {
  switch (learner) {
    case LearnerKind::kTopK:
      return k;
    case LearnerKind::kUncertainTopK:
      return uncertain_topk_budget(k);
    default:
      return 0;
  }
}

namespace {

class OgdLearner final : public OnlineLearner {
 public:
  OgdLearner(LearnerState state, RoundLoss loss) : state_(std::move(state)), loss_(loss) {}
  Vector action() const override { return state_.theta; }
  void update(const SideInfo& s) override { state_ = ogd_step(std::move(state_), s, loss_); }

 private:
  LearnerState state_;
  RoundLoss loss_;
};

class LearnLearner final : public OnlineLearner {
 public:
  LearnLearner(LearnerState state, RoundLoss loss, LearnParams params)
      : state_(std::move(state)), loss_(loss), params_(params) {}
  Vector action() const override { return state_.theta; }
  void update(const SideInfo& s) override {
    state_ = learn_step(std::move(state_), s, loss_, params_);
  }

 private:
  LearnerState state_;
  RoundLoss loss_;
  LearnParams params_;
};

class TopKLearner final : public OnlineLearner {
 public:
  TopKLearner(LearnerState state, RoundLoss loss, std::size_t budget)
      : state_(std::move(state)), loss_(loss), buffer_(budget) {}
  Vector action() const override { return state_.theta; }
  void update(const SideInfo& s) override {
    state_ = topk_filter_step(std::move(state_), buffer_, s, loss_).state;
  }

 private:
  LearnerState state_;
  RoundLoss loss_;
  TopKBuffer buffer_;
};

class ExpertLearner final : public OnlineLearner {
 public:
  ExpertLearner(ExpertPool pool, RoundLoss loss, LearnParams params)
      : pool_(std::move(pool)), loss_(loss), params_(params) {}
  Vector action() const override { return aggregate_action(pool_); }
  void update(const SideInfo& s) override { pool_step(pool_, s, loss_, params_); }

 private:
  ExpertPool pool_;
  RoundLoss loss_;
  LearnParams params_;
};

ExpertPool make_config_pool(const RunConfig& config) {
  const auto& spec = config.experts;
  const double a_max = spec.a_max > 0.0 ? spec.a_max : default_a_max(spec.C, config.T);
  ExpertGrid grid = build_grid(a_max, spec.epsilon, config.T);
  double beta = spec.beta;
  if (!(beta > 0.0)) {
    const auto nu = derive_constants(config.params, 0.0, 0.0, config.loss.lambda, 0.0).nu;
    beta = beta_default(grid.size(), config.T, nu);
  }
  return make_pool(std::move(grid), config.dim, beta);
}

Vector comparator(const RoundLoss& loss, const SideInfo& s, double radius) {
  return project_ball(minimizer_f(loss, s), radius);
}

}  // namespace

std::unique_ptr<OnlineLearner> make_learner(const RunConfig& config, double alpha) {
  LearnerState state{Vector::Zero(static_cast<Eigen::Index>(config.dim)), config.radius, alpha};
  switch (config.learner) {
    case LearnerKind::kOgd:
      return std::make_unique<OgdLearner>(std::move(state), config.loss);
    case LearnerKind::kLearn:
      return std::make_unique<LearnLearner>(std::move(state), config.loss, config.params);
    case LearnerKind::kTopK:
    case LearnerKind::kUncertainTopK:
      return std::make_unique<TopKLearner>(std::move(state), config.loss, config.filter_budget());
    case LearnerKind::kLearnExperts:
      return std::make_unique<ExpertLearner>(make_config_pool(config), config.loss, config.params);
  }
  throw ConfigError("unsupported learner");
}

void RegretAccumulator::add(const RoundRecord& r) {
  if (!r.is_outlier) {
    total_ += r.f_emitted - r.f_at_comparator;
    max_clean_loss_ = std::max(max_clean_loss_, r.f_emitted);
  } else {
    curve_.delta_s = std::max(curve_.delta_s, (r.comparator_emitted - r.comparator_clean).norm());
  }
  curve_.series.push_back(total_);
  if (prev_comparator_) curve_.path_length += (*prev_comparator_ - r.comparator_clean).norm();
  prev_comparator_ = r.comparator_clean;
  curve_.comparator_scale = std::max(curve_.comparator_scale, r.comparator_clean.norm());
  max_x_norm_ = std::max(max_x_norm_, r.x_norm);
}

StreamPrepass comparator_prepass(const RunConfig& config, std::uint64_t seed) {
  RoundStream stream(config.generator, config.dim, config.T, config.k, config.op, seed);
  StreamPrepass out;
  std::optional<Vector> prev;
  while (!stream.done()) {
    const Round round = stream.next();
    Vector c = comparator(config.loss, round.clean, config.radius);
    if (prev) out.path_length += (*prev - c).norm();
    prev = std::move(c);
    out.max_x_norm = std::max(out.max_x_norm, round.clean.x.norm());
  }
  return out;
}

namespace {

GradientGrowth resolve_growth(const RunConfig& config, double max_x_norm) {
  const GradientGrowth derived = gradient_growth(config.loss, max_x_norm);
  return {config.G.value_or(derived.G), config.L.value_or(derived.L)};
}

}  // namespace

double resolve_step_size(const RunConfig& config, const StreamPrepass& prepass) {
  if (config.step_mode == StepMode::kFixed) {
    return config.alpha > 0.0 ? config.alpha : 1.0 / std::sqrt(static_cast<double>(config.T));
  }
  const GradientGrowth gl = resolve_growth(config, prepass.max_x_norm);
  const auto constants = derive_constants(config.params, gl.G, gl.L, config.loss.lambda, 0.0);
  return theoretical_stepsize(config.radius, prepass.path_length, constants.psi, config.T);
}

EpisodeSummary run_episode(const RunConfig& config, std::uint64_t seed, const RecordSink& sink) {
  config.validate();
  StreamPrepass prepass;
  if (config.step_mode == StepMode::kTheoretical || !config.G || !config.L) {
    prepass = comparator_prepass(config, seed);
  }

  EpisodeSummary summary;
  summary.seed = seed;
  summary.alpha = resolve_step_size(config, prepass);
  const GradientGrowth gl = resolve_growth(config, prepass.max_x_norm);
  summary.G = gl.G;
  summary.L = gl.L;

  RoundStream stream(config.generator, config.dim, config.T, config.k, config.op, seed);
  summary.theta_star = stream.generator().theta_star;
  auto learner = make_learner(config, summary.alpha);
  RegretAccumulator acc;

  while (!stream.done()) {
    const Round round = stream.next();
    try {
      RoundRecord rec;
      rec.t = round.t;
      rec.is_outlier = round.is_outlier;
      rec.theta = learner->action();
      rec.f_emitted = eval_f(config.loss, round.emitted, rec.theta);
      rec.g_emitted = transform_value(config.params, rec.f_emitted);
      rec.comparator_clean = comparator(config.loss, round.clean, config.radius);
      rec.comparator_emitted = round.is_outlier
                                   ? comparator(config.loss, round.emitted, config.radius)
                                   : rec.comparator_clean;
      rec.f_at_comparator = eval_f(config.loss, round.emitted, rec.comparator_clean);
      rec.x_norm = round.emitted.x.norm();
      learner->update(round.emitted);
      acc.add(rec);
      if (sink) sink(rec);
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(round.t) + ": " + e.what());
    }
  }

  summary.curve = acc.curve();
  summary.max_clean_loss = acc.max_clean_loss();
  summary.max_x_norm = acc.max_x_norm();
  summary.final_theta = learner->action();
  return summary;
}

std::vector<RoundRecord> run_episode(const RunConfig& config, std::uint64_t seed) {
  std::vector<RoundRecord> records;
  records.reserve(config.T);
  run_episode(config, seed, [&](const RoundRecord& r) { records.push_back(r); });
  return records;
}

RegretCurve clean_dynamic_regret(const std::vector<RoundRecord>& records) {
  if (records.empty()) throw InputError("no records");
  RegretAccumulator acc;
  for (const auto& r : records) acc.add(r);
  return acc.curve();
}

double path_length(const std::vector<RoundRecord>& records) {
  if (records.empty()) throw InputError("no records");
  double total = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    total += (records[i - 1].comparator_clean - records[i].comparator_clean).norm();
  }
  return total;
}

double delta_S(const std::vector<RoundRecord>& records) {
  double worst = 0.0;
  for (const auto& r : records) {
    if (r.is_outlier) worst = std::max(worst, (r.comparator_emitted - r.comparator_clean).norm());
  }
  return worst;
}

AggregateSeries aggregate_runs(const std::vector<std::vector<double>>& curves) {
  if (curves.empty()) throw InputError("aggregate_runs needs at least one curve");
  const std::size_t n = curves.front().size();
  for (const auto& c : curves) {
    if (c.size() != n) throw InputError("aggregate_runs: curves differ in length");
  }
  const double R = static_cast<double>(curves.size());
  AggregateSeries out;
  out.mean.assign(n, 0.0);
  out.stderr_.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double sum = 0.0;
    for (const auto& c : curves) sum += c[t];
    const double mean = sum / R;
    out.mean[t] = mean;
    if (curves.size() > 1) {
      double ss = 0.0;
      for (const auto& c : curves) ss += (c[t] - mean) * (c[t] - mean);
      out.stderr_[t] = std::sqrt(ss / (R - 1.0)) / std::sqrt(R);
    }
  }
  return out;
}

AggregateSeries aggregate_runs(const std::vector<RegretCurve>& curves) {
  std::vector<std::vector<double>> series;
  series.reserve(curves.size());
  for (const auto& c : curves) series.push_back(c.series);
  return aggregate_runs(series);
}

ProblemConstants episode_constants(const RunConfig& config, const EpisodeSummary& summary) {
  return derive_constants(config.params, summary.G, summary.L, config.loss.lambda,
                          summary.max_clean_loss);
}

BoundReport check_regret_bound(const RegretCurve& curve, const ProblemConstants& c,
                               const RunConfig& config) {
  if (config.step_mode != StepMode::kTheoretical) {
    throw UsageError("regret bound check requires a run with the theoretical step size");
  }
  if (std::isinf(config.radius)) throw UsageError("regret bound check requires a finite radius");
  const double D = config.radius;
  const double T = static_cast<double>(config.T);
  const double k = static_cast<double>(config.k);
  const double V = curve.path_length;
  BoundReport r;
  r.measured = curve.final_regret();
  r.bound = c.xi * (c.psi * std::sqrt((4.0 * D * D + 6.0 * D * V) * T) +
                    k * (c.G * c.phi + c.L * c.kappa) + k * (c.G + c.L * c.phi) * curve.delta_s);
  r.holds = r.measured <= r.bound;
  return r;
}

CellResult run_cell(const RunConfig& config, std::size_t max_workers) {
  config.validate();
  const std::size_t n = config.seeds.size();
  std::size_t workers = max_workers > 0 ? max_workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, n);

  CellResult result;
  result.episodes.resize(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        result.episodes[i] = run_episode(config, config.seeds[i], nullptr);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RegretCurve> curves;
  for (const auto& e : result.episodes) curves.push_back(e.curve);
  result.aggregate = aggregate_runs(curves);
  return result;
}

}  // namespace robust_oco
