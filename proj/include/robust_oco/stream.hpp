#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "robust_oco/loss.hpp"

namespace robust_oco {

using Rng = std::mt19937_64;

/// Independent substreams of one master seed. Each source of randomness draws from its own
/// engine so that changing the corruption never perturbs the clean data.
enum class Substream : std::uint64_t {
  kThetaStar = 1,
  kFeatures = 2,
  kNoise = 3,
  kMislabel = 4,
  kOutlierSet = 5,
  kCorruption = 6,
  kSubsample = 7,
};

Rng make_substream(std::uint64_t master_seed, Substream which);

enum class GeneratorKind { kRidgeModel, kSvmModel };

std::string to_string(GeneratorKind kind);

struct CleanGenerator {
  GeneratorKind kind = GeneratorKind::kRidgeModel;
  Vector theta_star;
  std::size_t dim = 0;
  double noise_std = 0.0;      // ridge
  double mislabel_prob = 0.0;  // svm
  double margin_band = 0.0;    // svm
  double feature_std = 1.0;
};

/// theta* uniform on [-1, 1]^dim, normalized to unit norm; x ~ N(0, 1); noise variance 1e-6.
CleanGenerator make_ridge_generator(std::size_t dim, Rng& theta_rng);

/// theta* uniform on [1, 11]^2; x ~ N(0, 100); labels flipped w.p. 0.05 inside |<theta*, x>| <= 0.1.
CleanGenerator make_svm_generator(Rng& theta_rng);

/// Engines consumed by gen_clean_round, one per source of randomness.
struct CleanRngs {
  Rng features;
  Rng noise;
  Rng mislabel;
};

CleanRngs make_clean_rngs(std::uint64_t master_seed);

/// Draws round t. Every call consumes the same number of variates from each engine,
/// whatever branch is taken.
SideInfo gen_clean_round(const CleanGenerator& gen, CleanRngs& rngs, std::size_t t);

enum class CorruptionOperator { kUniformResponse, kLabelFlip };

std::string to_string(CorruptionOperator op);

/// Operator used by the reference experiments for a generator kind.
CorruptionOperator default_operator(GeneratorKind kind);

struct CorruptionPlan {
  std::size_t T = 0;
  std::size_t k = 0;
  std::vector<std::size_t> outlier_rounds;  ///< sorted, 1-based
  CorruptionOperator op = CorruptionOperator::kUniformResponse;

  bool is_outlier(std::size_t t) const;
};

/// k distinct indices from 1..T, uniformly without replacement, sorted.
std::vector<std::size_t> sample_outlier_rounds(std::size_t T, std::size_t k, Rng& rng);

CorruptionPlan make_plan(std::size_t T, std::size_t k, CorruptionOperator op, Rng& rng);

/// Applies the plan's operator to a clean round. x is never modified.
/// Throws ConfigError when the operator does not fit the generator kind.
SideInfo corrupt(const CorruptionPlan& plan, GeneratorKind kind, const SideInfo& clean, Rng& rng);

/// One emitted round together with its clean counterpart.
struct Round {
  std::size_t t = 0;
  bool is_outlier = false;
  SideInfo clean;
  SideInfo emitted;
};

/// Seed-deterministic sequence of rounds: clean draws plus oblivious corruption.
class RoundStream {
 public:
  RoundStream(GeneratorKind kind, std::size_t dim, std::size_t T, std::size_t k,
              CorruptionOperator op, std::uint64_t seed);

  const CleanGenerator& generator() const { return gen_; }
  const CorruptionPlan& plan() const { return plan_; }
  std::size_t T() const { return plan_.T; }
  bool done() const { return next_t_ > plan_.T; }
  Round next();

 private:
  CleanGenerator gen_;
  CorruptionPlan plan_;
  CleanRngs clean_rngs_;
  Rng corruption_rng_;
  std::size_t next_t_ = 1;
};

/// One JSON object per line: t, is_outlier, x, y_clean, y_emitted.
std::string dump_record(const Round& round);

}  // namespace robust_oco
