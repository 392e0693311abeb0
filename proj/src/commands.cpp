#include "robust_oco/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "robust_oco/oracle.hpp"

namespace robust_oco {

namespace {

const std::vector<LearnerKind> kSweepLearners{LearnerKind::kOgd, LearnerKind::kLearn,
                                              LearnerKind::kTopK, LearnerKind::kUncertainTopK};

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string cell_prefix(const RunConfig& config) {
  return fmt::format("result.{}.k{}.", to_string(config.learner), config.k);
}

void write_manifest(const std::filesystem::path& path, const std::string& config_text,
                    const std::string& extra, const std::string& results) {
  auto out = open_output(path);
  out << "# effective configuration\n" << config_text;
  if (!extra.empty()) out << extra;
  out << "\n# measured results (ignored when loaded as a config)\n" << results;
}

/// Resolves the effective configuration, reporting failures as usage errors.
std::optional<RunConfig> resolve_or_report(const CliOptions& options, std::ostream& err) {
  try {
    return effective_config(options);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

std::vector<std::size_t> subsample_rounds(std::size_t T, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> all(T);
  std::iota(all.begin(), all.end(), std::size_t{1});
  if (n >= T) return all;
  std::vector<std::size_t> picked;
  picked.reserve(n);
  Rng rng = make_substream(seed, Substream::kSubsample);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), n, rng);
  return picked;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::optional<std::uint64_t> seed_from_environment() {
  const char* raw = std::getenv("ROBUST_OCO_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  const auto seeds = parse_seeds(raw);
  if (seeds.size() != 1) throw ConfigError("ROBUST_OCO_SEED must be a single integer");
  return seeds.front();
}

RunConfig effective_config(const CliOptions& options) {
  RunConfig config;
  if (options.preset) config = preset_config(*options.preset);
  if (options.config_path) config = apply_key_values(config, load_key_values(*options.config_path));
  if (!options.preset && !options.config_path) {
    throw ConfigError("either --preset or --config is required");
  }
  if (options.T) config.T = *options.T;
  if (options.k) config.k = *options.k;
  if (options.seeds) config.seeds = parse_seeds(*options.seeds);
  if (options.learner) config.learner = learner_from_string(*options.learner);
  if (options.alpha) config.alpha = *options.alpha;
  if (options.a) config.params.a = *options.a;
  if (options.b) config.params.b = *options.b;
  if (options.lambda) config.loss.lambda = *options.lambda;
  if (options.scale != 1.0) config.T = scaled_horizon(config.T, options.scale);
  if (options.env_seed) {
    const std::size_t R = config.seeds.size();
    config.seeds.resize(R);
    std::iota(config.seeds.begin(), config.seeds.end(), *options.env_seed);
  }
  config.validate();
  return config;
}

std::string regret_csv_name(LearnerKind learner, std::size_t k) {
  return fmt::format("regret_{}_k{}.csv", to_string(learner), k);
}

void write_regret_csv(const std::filesystem::path& path, const AggregateSeries& series) {
  auto out = open_output(path);
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "t,mean_regret,stderr_regret\n");
  for (std::size_t i = 0; i < series.mean.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{},{:.12g},{:.12g}\n", i + 1, series.mean[i],
                   series.stderr_[i]);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

std::string manifest_results(const RunConfig& config, const CellResult& cell) {
  const std::string p = cell_prefix(config);
  std::vector<double> finals, vt, ds, scale, bmax, alphas;
  for (const auto& e : cell.episodes) {
    finals.push_back(e.curve.final_regret());
    vt.push_back(e.curve.path_length);
    ds.push_back(e.curve.delta_s);
    scale.push_back(e.curve.comparator_scale);
    bmax.push_back(e.max_clean_loss);
    alphas.push_back(e.alpha);
  }
  std::string out;
  auto line = [&](const std::string& key, const std::string& value) {
    out += p + key + " = " + value + "\n";
  };
  line("k", std::to_string(config.k));
  line("filter_budget", std::to_string(config.filter_budget()));
  line("final_regret_mean", fmt::format("{:.12g}", cell.aggregate.mean.back()));
  line("final_regret_stderr", fmt::format("{:.12g}", cell.aggregate.stderr_.back()));
  line("final_regret", fmt::format("{:.12g}", fmt::join(finals, ",")));
  line("path_length", fmt::format("{:.12g}", fmt::join(vt, ",")));
  line("delta_s", fmt::format("{:.12g}", fmt::join(ds, ",")));
  line("comparator_scale", fmt::format("{:.12g}", fmt::join(scale, ",")));
  line("max_clean_loss", fmt::format("{:.12g}", fmt::join(bmax, ",")));
  line("alpha_mean", fmt::format("{:.12g}", mean_of(alphas)));
  return out;
}

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err) {
  const auto config = resolve_or_report(options, err);
  if (!config) return kExitUsage;
  try {
    const CellResult cell = run_cell(*config, options.workers);
    const auto csv = options.out_dir / regret_csv_name(config->learner, config->k);
    write_regret_csv(csv, cell.aggregate);
    write_manifest(options.out_dir / "manifest.txt", to_key_values(*config), "",
                   manifest_results(*config, cell));
    out << fmt::format("{} k={} seeds={} final_mean_regret={:.6g} -> {}\n",
                       to_string(config->learner), config->k, config->seeds.size(),
                       cell.aggregate.mean.back(), csv.string());
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err) {
  auto base = resolve_or_report(options, err);
  if (!base) return kExitUsage;
  try {
    const auto ks = k_grid(base->T);
    std::string results;
    for (const auto learner : kSweepLearners) {
      for (const auto k : ks) {
        RunConfig cell_config = *base;
        cell_config.learner = learner;
        cell_config.k = k;
        const CellResult cell = run_cell(cell_config, options.workers);
        write_regret_csv(options.out_dir / regret_csv_name(learner, k), cell.aggregate);
        results += manifest_results(cell_config, cell);
        out << fmt::format("{} k={} final_mean_regret={:.6g}\n", to_string(learner), k,
                           cell.aggregate.mean.back());
      }
    }
    const std::string extra = fmt::format("sweep.k_values = {}\nsweep.learners = {}\n",
                                          fmt::join(ks, ","), "ogd,learn,topk,uncertain_topk");
    write_manifest(options.out_dir / "manifest.txt", to_key_values(*base), extra, results);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

std::vector<BoundReport> small_bound_checks(const std::vector<std::size_t>& ks) {
  RunConfig config = preset_config("ridge");
  config.T = 200;
  config.radius = 5.0;
  config.step_mode = StepMode::kTheoretical;
  config.learner = LearnerKind::kLearn;
  config.seeds = {1};
  std::vector<BoundReport> reports;
  for (const auto k : ks) {
    config.k = k;
    const EpisodeSummary summary = run_episode(config, 1, [](const RoundRecord&) {});
    reports.push_back(check_regret_bound(summary.curve, episode_constants(config, summary), config));
  }
  return reports;
}

int cmd_verify(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    SuiteOptions suite;
    suite.samples = options.samples;
    if (options.env_seed) suite.seed = *options.env_seed;
    std::vector<std::string> failed;
    for (const auto& r : run_oracle_suite(suite)) {
      out << fmt::format("{} samples={} violations={} worst_slack={:.3e}\n", r.name, r.samples,
                         r.violations, r.worst_slack);
      if (!r.passed()) failed.push_back(r.name);
    }
    const std::vector<std::size_t> ks{0, 14, 34};
    const auto bounds = small_bound_checks(ks);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const std::string name = fmt::format("regret_bound[ridge,T=200,D=5,k={}]", ks[i]);
      out << fmt::format("{} measured={:.6g} bound={:.6g} holds={}\n", name, bounds[i].measured,
                         bounds[i].bound, bounds[i].holds);
      if (!bounds[i].holds) failed.push_back(name);
    }
    if (!failed.empty()) {
      err << fmt::format("failed checks: {}\n", fmt::join(failed, ", "));
      return kExitFailure;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int cmd_dump_stream(const CliOptions& options, std::ostream& out, std::ostream& err) {
  const auto config = resolve_or_report(options, err);
  if (!config) return kExitUsage;
  try {
    const std::uint64_t seed = config->seeds.front();
    const auto keep = subsample_rounds(config->T, options.subsample.value_or(config->T), seed);

    auto stream_out = open_output(options.out_dir / "stream.jsonl");
    RoundStream stream(config->generator, config->dim, config->T, config->k, config->op, seed);
    std::size_t next = 0;
    while (!stream.done() && next < keep.size()) {
      const Round round = stream.next();
      if (round.t != keep[next]) continue;
      stream_out << dump_record(round) << "\n";
      ++next;
    }

    nlohmann::json thetas;
    thetas["seed"] = seed;
    thetas["k"] = config->k;
    for (const auto learner : kSweepLearners) {
      RunConfig c = *config;
      c.learner = learner;
      const EpisodeSummary summary = run_episode(c, seed, [](const RoundRecord&) {});
      thetas["theta_star"] = to_std(summary.theta_star);
      thetas["final_theta"][to_string(learner)] = to_std(summary.final_theta);
    }
    open_output(options.out_dir / "final_theta.json") << thetas.dump(2) << "\n";
    out << fmt::format("wrote {} records and final iterates to {}\n", keep.size(),
                       options.out_dir.string());
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace robust_oco
