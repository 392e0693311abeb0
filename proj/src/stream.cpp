#include "robust_oco/stream.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace robust_oco {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace

Rng make_substream(std::uint64_t master_seed, Substream which) {
  const std::uint64_t tag = static_cast<std::uint64_t>(which);
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(splitmix64(master_seed ^ splitmix64(tag))),
                    static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

std::string to_string(GeneratorKind kind) {
  return kind == GeneratorKind::kRidgeModel ? "ridge" : "svm";
}

std::string to_string(CorruptionOperator op) {
  return op == CorruptionOperator::kUniformResponse ? "uniform_response" : "label_flip";
}

CleanGenerator make_ridge_generator(std::size_t dim, Rng& theta_rng) {
  if (dim == 0) throw InputError("ridge generator needs dim >= 1");
  CleanGenerator gen;
  gen.kind = GeneratorKind::kRidgeModel;
  gen.dim = dim;
  gen.noise_std = 1e-3;
  gen.feature_std = 1.0;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  gen.theta_star.resize(static_cast<Eigen::Index>(dim));
  for (auto& v : gen.theta_star) v = unif(theta_rng);
  gen.theta_star.normalize();
  return gen;
}

CleanGenerator make_svm_generator(Rng& theta_rng) {
  CleanGenerator gen;
  gen.kind = GeneratorKind::kSvmModel;
  gen.dim = 2;
  gen.feature_std = 10.0;
  gen.mislabel_prob = 0.05;
  gen.margin_band = 0.1;
  std::uniform_real_distribution<double> unif(1.0, 11.0);
  gen.theta_star.resize(2);
  for (auto& v : gen.theta_star) v = unif(theta_rng);
  return gen;
}

CleanRngs make_clean_rngs(std::uint64_t master_seed) {
  return {make_substream(master_seed, Substream::kFeatures),
          make_substream(master_seed, Substream::kNoise),
          make_substream(master_seed, Substream::kMislabel)};
}

SideInfo gen_clean_round(const CleanGenerator& gen, CleanRngs& rngs, std::size_t /*t*/) {
  std::normal_distribution<double> feature(0.0, gen.feature_std);
  SideInfo s;
  s.x.resize(static_cast<Eigen::Index>(gen.dim));
  for (auto& v : s.x) v = feature(rngs.features);
  const double margin = gen.theta_star.dot(s.x);

  switch (gen.kind) {
    case GeneratorKind::kRidgeModel: {
      std::normal_distribution<double> noise(0.0, 1.0);
      s.y = margin + gen.noise_std * noise(rngs.noise);
      break;
    }
    case GeneratorKind::kSvmModel: {
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      const bool flip = coin(rngs.mislabel) < gen.mislabel_prob;
      s.y = sign_of(margin);
      if (flip && std::abs(margin) <= gen.margin_band) s.y = -s.y;
      break;
    }
  }
  return s;
}

CorruptionOperator default_operator(GeneratorKind kind) {
  return kind == GeneratorKind::kRidgeModel ? CorruptionOperator::kUniformResponse
                                            : CorruptionOperator::kLabelFlip;
}

bool CorruptionPlan::is_outlier(std::size_t t) const {
  return std::binary_search(outlier_rounds.begin(), outlier_rounds.end(), t);
}

std::vector<std::size_t> sample_outlier_rounds(std::size_t T, std::size_t k, Rng& rng) {
  if (k > T) throw InputError("cannot corrupt more rounds than T");
  std::vector<std::size_t> all(T);
  std::iota(all.begin(), all.end(), std::size_t{1});
  std::vector<std::size_t> out;
  out.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
  return out;
}

CorruptionPlan make_plan(std::size_t T, std::size_t k, CorruptionOperator op, Rng& rng) {
  CorruptionPlan plan;
  plan.T = T;
  plan.k = k;
  plan.op = op;
  plan.outlier_rounds = sample_outlier_rounds(T, k, rng);
  return plan;
}

SideInfo corrupt(const CorruptionPlan& plan, GeneratorKind kind, const SideInfo& clean, Rng& rng) {
  if (plan.op == CorruptionOperator::kLabelFlip && kind != GeneratorKind::kSvmModel) {
    throw ConfigError("label_flip corruption requires the svm generator");
  }
  if (plan.op == CorruptionOperator::kUniformResponse && kind != GeneratorKind::kRidgeModel) {
    throw ConfigError("uniform_response corruption requires the ridge generator");
  }
  SideInfo out = clean;
  switch (plan.op) {
    case CorruptionOperator::kUniformResponse: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      out.y = unif(rng);
      break;
    }
    case CorruptionOperator::kLabelFlip:
      out.y = -clean.y;
      break;
  }
  return out;
}

RoundStream::RoundStream(GeneratorKind kind, std::size_t dim, std::size_t T, std::size_t k,
                         CorruptionOperator op, std::uint64_t seed)
    : clean_rngs_(make_clean_rngs(seed)),
      corruption_rng_(make_substream(seed, Substream::kCorruption)) {
  auto theta_rng = make_substream(seed, Substream::kThetaStar);
  gen_ = kind == GeneratorKind::kRidgeModel ? make_ridge_generator(dim, theta_rng)
                                            : make_svm_generator(theta_rng);
  auto outlier_rng = make_substream(seed, Substream::kOutlierSet);
  plan_ = make_plan(T, k, op, outlier_rng);
  if (k > 0) {
    // validate operator/kind pairing up front instead of at the first outlier round
    SideInfo probe{Vector::Zero(static_cast<Eigen::Index>(gen_.dim)), 1.0};
    Rng scratch(0);
    corrupt(plan_, kind, probe, scratch);
  }
}

Round RoundStream::next() {
  if (done()) throw InputError("round stream exhausted");
  Round r;
  r.t = next_t_++;
  r.clean = gen_clean_round(gen_, clean_rngs_, r.t);
  r.is_outlier = plan_.is_outlier(r.t);
  r.emitted = r.is_outlier ? corrupt(plan_, gen_.kind, r.clean, corruption_rng_) : r.clean;
  return r;
}

std::string dump_record(const Round& round) {
  nlohmann::json j;
  j["t"] = round.t;
  j["is_outlier"] = round.is_outlier;
  j["x"] = std::vector<double>(round.clean.x.begin(), round.clean.x.end());
  j["y_clean"] = round.clean.y;
  j["y_emitted"] = round.emitted.y;
  return j.dump();
}

}  // namespace robust_oco
