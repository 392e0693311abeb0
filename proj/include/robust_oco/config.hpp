#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "robust_oco/harness.hpp"

namespace robust_oco {

/// Flat `key = value` text. Keys are dotted (`learn.a`), `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

/// Reference experiment settings: "ridge" (T=1e5, d=100, a=b=10) or "svm" (T=1e4, d=2,
/// a=1e4, b=10); lambda = 1e-4, seeds 1..30, alpha = 1/sqrt(T), unbounded domain.
RunConfig preset_config(const std::string& name);

/// Applies every recognized key onto `base`. Keys under `result.` and `sweep.` are ignored
/// so a manifest can be fed back as a config. Unknown keys raise ConfigError.
RunConfig apply_key_values(RunConfig base, const KeyValues& kv);

/// Serializes the effective configuration in the format read by apply_key_values.
std::string to_key_values(const RunConfig& config);

/// "1,2,5" or "1..30".
std::vector<std::uint64_t> parse_seeds(const std::string& text);
std::string format_seeds(const std::vector<std::uint64_t>& seeds);

/// floor(sqrt(n)) and floor(n^(2/3)) in exact integer arithmetic.
std::size_t isqrt(std::size_t n);
std::size_t floor_two_thirds_power(std::size_t n);

/// Outlier counts {0, floor(sqrt T), floor(T^(2/3)), floor(T/4)}.
std::vector<std::size_t> k_grid(std::size_t T);

/// max(1, round(scale * T)).
std::size_t scaled_horizon(std::size_t T, double scale);

}  // namespace robust_oco
