#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "robust_oco/config.hpp"

namespace robust_oco {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Parsed command line. Effective configuration precedence, lowest first:
/// preset, config file, override flags, ROBUST_OCO_SEED.
struct CliOptions {
  std::optional<std::string> preset;
  std::optional<std::string> config_path;
  std::filesystem::path out_dir = ".";

  std::optional<std::size_t> T;
  std::optional<std::size_t> k;
  std::optional<std::string> seeds;
  std::optional<std::string> learner;
  std::optional<double> alpha;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> lambda;

  double scale = 1.0;
  std::size_t samples = 100000;          ///< verify
  std::optional<std::size_t> subsample;  ///< dump-stream
  std::optional<std::uint64_t> env_seed; ///< value of ROBUST_OCO_SEED, if set
  std::size_t workers = 0;               ///< 0 selects hardware concurrency
};

/// Reads ROBUST_OCO_SEED; throws ConfigError if it is set but not a nonnegative integer.
std::optional<std::uint64_t> seed_from_environment();

/// Preset, file, flags and seed override merged and validated. With ROBUST_OCO_SEED = S
/// and R configured seeds, the seeds become S, S+1, ..., S+R-1.
RunConfig effective_config(const CliOptions& options);

/// Regret CSV: header `t,mean_regret,stderr_regret`, one row per round, LF endings.
void write_regret_csv(const std::filesystem::path& path, const AggregateSeries& series);

/// File name `regret_<learner>_k<k>.csv`.
std::string regret_csv_name(LearnerKind learner, std::size_t k);

/// Measured quantities of one cell, appended under `result.<learner>.k<k>.` in the manifest.
std::string manifest_results(const RunConfig& config, const CellResult& cell);

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_dump_stream(const CliOptions& options, std::ostream& out, std::ostream& err);

/// The bounded-domain regret check run by `verify`: ridge, T=200, radius 5, theoretical
/// step size, seed 1.
std::vector<BoundReport> small_bound_checks(const std::vector<std::size_t>& ks);

}  // namespace robust_oco
