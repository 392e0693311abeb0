#include "robust_oco/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace robust_oco {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "unbounded") return kUnbounded;
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, v));
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    const auto n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("{}: expected a nonnegative integer, got '{}'", key, v));
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  return fmt::format("{}", v);
}

LossFamily family_from_string(const std::string& v) {
  if (v == "ridge") return LossFamily::kRidge;
  if (v == "svm") return LossFamily::kHingeSvm;
  throw ConfigError("unknown loss family '" + v + "'");
}

GeneratorKind generator_from_string(const std::string& v) {
  if (v == "ridge") return GeneratorKind::kRidgeModel;
  if (v == "svm") return GeneratorKind::kSvmModel;
  throw ConfigError("unknown generator '" + v + "'");
}

CorruptionOperator operator_from_string(const std::string& v) {
  if (v == "uniform_response") return CorruptionOperator::kUniformResponse;
  if (v == "label_flip") return CorruptionOperator::kLabelFlip;
  throw ConfigError("unknown corruption operator '" + v + "'");
}

StepMode step_mode_from_string(const std::string& v) {
  if (v == "fixed") return StepMode::kFixed;
  if (v == "theoretical") return StepMode::kTheoretical;
  throw ConfigError("unknown step mode '" + v + "'");
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = to_count("seeds", trim(text.substr(0, dots)));
    const auto hi = to_count("seeds", trim(text.substr(dots + 2)));
    if (hi < lo) throw ConfigError("seeds: empty range '" + text + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) seeds.push_back(to_count("seeds", item));
  }
  if (seeds.empty()) throw ConfigError("seeds: no seed given");
  return seeds;
}

std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  bool contiguous = seeds.size() > 2;
  for (std::size_t i = 1; contiguous && i < seeds.size(); ++i) {
    contiguous = seeds[i] == seeds[i - 1] + 1;
  }
  if (contiguous) return fmt::format("{}..{}", seeds.front(), seeds.back());
  return fmt::format("{}", fmt::join(seeds, ","));
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.loss.lambda = 1e-4;
  c.seeds = parse_seeds("1..30");
  c.radius = kUnbounded;
  c.step_mode = StepMode::kFixed;
  c.alpha = 0.0;
  if (name == "ridge") {
    c.T = 100000;
    c.dim = 100;
    c.params = {10.0, 10.0};
    c.loss.family = LossFamily::kRidge;
    c.generator = GeneratorKind::kRidgeModel;
  } else if (name == "svm") {
    c.T = 10000;
    c.dim = 2;
    c.params = {1e4, 10.0};
    c.loss.family = LossFamily::kHingeSvm;
    c.generator = GeneratorKind::kSvmModel;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.op = default_operator(c.generator);
  return c;
}

RunConfig apply_key_values(RunConfig c, const KeyValues& kv) {
  if (const auto it = kv.find("preset"); it != kv.end()) c = preset_config(it->second);
  bool op_given = false;
  for (const auto& [key, v] : kv) {
    if (key == "preset" || starts_with(key, "result.") || starts_with(key, "sweep.")) continue;
    if (key == "run.T") c.T = to_count(key, v);
    else if (key == "run.learner") c.learner = learner_from_string(v);
    else if (key == "run.seeds") c.seeds = parse_seeds(v);
    else if (key == "run.radius") c.radius = to_double(key, v);
    else if (key == "step.mode") c.step_mode = step_mode_from_string(v);
    else if (key == "step.alpha") c.alpha = to_double(key, v);
    else if (key == "loss.family") c.loss.family = family_from_string(v);
    else if (key == "loss.lambda") c.loss.lambda = to_double(key, v);
    else if (key == "learn.a") c.params.a = to_double(key, v);
    else if (key == "learn.b") c.params.b = to_double(key, v);
    else if (key == "generator.kind") c.generator = generator_from_string(v);
    else if (key == "generator.dim") c.dim = to_count(key, v);
    else if (key == "corruption.k") c.k = to_count(key, v);
    else if (key == "corruption.operator") {
      c.op = operator_from_string(v);
      op_given = true;
    }
    else if (key == "experts.a_max") c.experts.a_max = to_double(key, v);
    else if (key == "experts.epsilon") c.experts.epsilon = to_double(key, v);
    else if (key == "experts.C") c.experts.C = to_double(key, v);
    else if (key == "experts.beta") c.experts.beta = to_double(key, v);
    else if (key == "constants.G") c.G = to_double(key, v);
    else if (key == "constants.L") c.L = to_double(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  if (!op_given) c.op = default_operator(c.generator);
  return c;
}

std::string to_key_values(const RunConfig& c) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  line("run.T", std::to_string(c.T));
  line("run.learner", to_string(c.learner));
  line("run.seeds", format_seeds(c.seeds));
  line("run.radius", format_double(c.radius));
  line("step.mode", c.step_mode == StepMode::kFixed ? "fixed" : "theoretical");
  line("step.alpha", format_double(c.alpha));
  line("loss.family", to_string(c.loss.family));
  line("loss.lambda", format_double(c.loss.lambda));
  line("learn.a", format_double(c.params.a));
  line("learn.b", format_double(c.params.b));
  line("generator.kind", to_string(c.generator));
  line("generator.dim", std::to_string(c.dim));
  line("corruption.k", std::to_string(c.k));
  line("corruption.operator", to_string(c.op));
  line("experts.a_max", format_double(c.experts.a_max));
  line("experts.epsilon", format_double(c.experts.epsilon));
  line("experts.C", format_double(c.experts.C));
  line("experts.beta", format_double(c.experts.beta));
  if (c.G) line("constants.G", format_double(*c.G));
  if (c.L) line("constants.L", format_double(*c.L));
  return out;
}

std::size_t isqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::size_t floor_two_thirds_power(std::size_t n) {
  // largest r with r^3 <= n^2
  const unsigned __int128 target = static_cast<unsigned __int128>(n) * n;
  auto cube = [](std::size_t r) {
    return static_cast<unsigned __int128>(r) * r * r;
  };
  auto r = static_cast<std::size_t>(std::cbrt(static_cast<double>(n) * static_cast<double>(n)));
  while (r > 0 && cube(r) > target) --r;
  while (cube(r + 1) <= target) ++r;
  return r;
}

std::vector<std::size_t> k_grid(std::size_t T) {
  return {0, isqrt(T), floor_two_thirds_power(T), T / 4};
}

std::size_t scaled_horizon(std::size_t T, double scale) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scale * static_cast<double>(T))));
}

}  // namespace robust_oco
