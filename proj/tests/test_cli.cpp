#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "robust_oco/commands.hpp"

using namespace robust_oco;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("robust_oco_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

CliOptions small_svm_run(const fs::path& out) {
  CliOptions o;
  o.preset = "svm";
  o.out_dir = out;
  o.T = 150;
  o.k = 12;
  o.seeds = "1,2";
  o.learner = "learn";
  o.workers = 1;
  return o;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(ROBUST_OCO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("key-value parsing") {
  std::istringstream in("# comment\nrun.T = 50   # trailing\n\n  learn.a=3\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.at("run.T") == "50");
  CHECK(kv.at("learn.a") == "3");

  std::istringstream bad("run.T 50\n");
  CHECK_THROWS_AS(parse_key_values(bad), ConfigError);
  CHECK_THROWS_AS(apply_key_values(preset_config("svm"), {{"run.nope", "1"}}), ConfigError);
  CHECK_THROWS_AS(apply_key_values(preset_config("svm"), {{"run.T", "-4"}}), ConfigError);
  CHECK_THROWS_AS(apply_key_values(preset_config("svm"), {{"learn.a", "ten"}}), ConfigError);
}

TEST_CASE("seed lists") {
  CHECK(parse_seeds("1..4") == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(parse_seeds("7, 3,9") == std::vector<std::uint64_t>{7, 3, 9});
  CHECK(format_seeds(parse_seeds("1..30")) == "1..30");
  CHECK(format_seeds({4, 2}) == "4,2");
  CHECK_THROWS_AS(parse_seeds("5..2"), ConfigError);
}

TEST_CASE("presets") {
  const auto ridge = preset_config("ridge");
  CHECK(ridge.T == 100000);
  CHECK(ridge.dim == 100);
  CHECK(ridge.params.a == 10.0);
  CHECK(ridge.params.b == 10.0);
  CHECK(ridge.loss.lambda == 1e-4);
  CHECK(ridge.seeds.size() == 30);
  CHECK(ridge.op == CorruptionOperator::kUniformResponse);

  const auto svm = preset_config("svm");
  CHECK(svm.T == 10000);
  CHECK(svm.dim == 2);
  CHECK(svm.params.a == 1e4);
  CHECK(svm.op == CorruptionOperator::kLabelFlip);
  CHECK_THROWS_AS(preset_config("lasso"), ConfigError);
}

TEST_CASE("k grid uses exact integer roots") {
  CHECK(k_grid(100000) == std::vector<std::size_t>{0, 316, 2154, 25000});
  CHECK(k_grid(10000) == std::vector<std::size_t>{0, 100, 464, 2500});
  CHECK(k_grid(2000)[1] == 44);
  CHECK(k_grid(200) == std::vector<std::size_t>{0, 14, 34, 50});
  CHECK(k_grid(1000)[2] == 100);  // 1000^(2/3) is exactly 100
  CHECK(k_grid(8)[2] == 4);
  CHECK(scaled_horizon(100000, 0.1) == 10000);
  CHECK(scaled_horizon(3, 0.01) == 1);
}

TEST_CASE("overrides take precedence over file values") {
  const fs::path dir = fresh_dir("precedence");
  std::ofstream(dir / "c.txt") << "preset = svm\nrun.T = 80\nlearn.b = 4\nrun.seeds = 1..5\n";
  CliOptions o;
  o.config_path = (dir / "c.txt").string();
  o.b = 2.5;
  auto c = effective_config(o);
  CHECK(c.T == 80);
  CHECK(c.params.b == 2.5);
  CHECK(c.params.a == 1e4);

  o.env_seed = 100;
  c = effective_config(o);
  CHECK(c.seeds == std::vector<std::uint64_t>{100, 101, 102, 103, 104});

  o.scale = 0.5;
  CHECK(effective_config(o).T == 40);
}

TEST_CASE("run writes one CSV row per round and is byte-identical across runs") {
  const fs::path a = fresh_dir("run_a"), b = fresh_dir("run_b");
  std::ostringstream out, err;
  REQUIRE(cmd_run(small_svm_run(a), out, err) == kExitOk);
  REQUIRE(cmd_run(small_svm_run(b), out, err) == kExitOk);
  const std::string csv = slurp(a / "regret_learn_k12.csv");
  CHECK(csv == slurp(b / "regret_learn_k12.csv"));
  CHECK(csv.find('\r') == std::string::npos);

  const auto lines = lines_of(csv);
  REQUIRE(lines.size() == 151);
  CHECK(lines[0] == "t,mean_regret,stderr_regret");
  CHECK(lines[1].rfind("1,", 0) == 0);
  CHECK(std::count(lines[150].begin(), lines[150].end(), ',') == 2);
}

TEST_CASE("ridge preset with two seeds gives T rows") {
  const fs::path dir = fresh_dir("run_ridge");
  CliOptions o;
  o.preset = "ridge";
  o.out_dir = dir;
  o.T = 40;
  o.seeds = "1,2";
  o.learner = "ogd";
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == kExitOk);
  CHECK(lines_of(slurp(dir / "regret_ogd_k0.csv")).size() == 41);
}

TEST_CASE("CSV values carry at least nine significant digits") {
  const fs::path dir = fresh_dir("digits");
  AggregateSeries s;
  s.mean = {1.0 / 3.0};
  s.stderr_ = {2.0 / 3.0};
  write_regret_csv(dir / "x.csv", s);
  CHECK(lines_of(slurp(dir / "x.csv"))[1] == "1,0.333333333333,0.666666666667");
}

TEST_CASE("manifest round-trips") {
  const fs::path first = fresh_dir("manifest_a"), second = fresh_dir("manifest_b");
  std::ostringstream out, err;
  REQUIRE(cmd_run(small_svm_run(first), out, err) == kExitOk);
  const std::string manifest = slurp(first / "manifest.txt");
  CHECK(manifest.find("result.learn.k12.final_regret_mean") != std::string::npos);
  CHECK(manifest.find("result.learn.k12.path_length") != std::string::npos);
  CHECK(manifest.find("result.learn.k12.delta_s") != std::string::npos);
  CHECK(manifest.find("result.learn.k12.max_clean_loss") != std::string::npos);

  CliOptions again;
  again.config_path = (first / "manifest.txt").string();
  again.out_dir = second;
  REQUIRE(cmd_run(again, out, err) == kExitOk);
  CHECK(slurp(first / "regret_learn_k12.csv") == slurp(second / "regret_learn_k12.csv"));
  CHECK(slurp(first / "manifest.txt") == slurp(second / "manifest.txt"));
}

TEST_CASE("missing config file is a usage error naming the path") {
  CliOptions o;
  o.config_path = "/nonexistent/robust.cfg";
  std::ostringstream out, err;
  CHECK(cmd_run(o, out, err) == kExitUsage);
  CHECK(err.str().find("/nonexistent/robust.cfg") != std::string::npos);
}

TEST_CASE("invalid configuration is a usage error") {
  CliOptions o = small_svm_run(fresh_dir("invalid"));
  o.k = 1000;
  std::ostringstream out, err;
  CHECK(cmd_run(o, out, err) == kExitUsage);
  o = small_svm_run(fresh_dir("invalid"));
  o.learner = "sgd";
  CHECK(cmd_run(o, out, err) == kExitUsage);
}

TEST_CASE("sweep writes sixteen CSVs and the scaled k grid") {
  const fs::path dir = fresh_dir("sweep");
  CliOptions o;
  o.preset = "svm";
  o.out_dir = dir;
  o.scale = 0.02;  // T = 200
  o.seeds = "1,2";
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(o, out, err) == kExitOk);
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir)) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 16);
  for (const auto* learner : {"ogd", "learn", "topk", "uncertain_topk"}) {
    for (auto k : {0, 14, 34, 50}) {
      CHECK(fs::exists(dir / fmt::format("regret_{}_k{}.csv", learner, k)));
    }
  }
  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("sweep.k_values = 0,14,34,50") != std::string::npos);
  CHECK(manifest.find("run.T = 200") != std::string::npos);
  CHECK(manifest.find("result.uncertain_topk.k50.filter_budget = 37") != std::string::npos);
}

TEST_CASE("dump-stream subsamples rounds reproducibly") {
  const fs::path a = fresh_dir("dump_a"), b = fresh_dir("dump_b");
  CliOptions o;
  o.preset = "svm";
  o.T = 2000;
  o.k = 44;
  o.seeds = "3";
  o.subsample = 500;
  o.out_dir = a;
  std::ostringstream out, err;
  REQUIRE(cmd_dump_stream(o, out, err) == kExitOk);
  o.out_dir = b;
  REQUIRE(cmd_dump_stream(o, out, err) == kExitOk);

  const std::string stream = slurp(a / "stream.jsonl");
  CHECK(stream == slurp(b / "stream.jsonl"));
  const auto lines = lines_of(stream);
  CHECK(lines.size() == 500);
  std::size_t prev = 0;
  for (const auto& line : lines) {
    const auto j = nlohmann::json::parse(line);
    const auto t = j.at("t").get<std::size_t>();
    CHECK(t > prev);
    prev = t;
  }

  const auto thetas = nlohmann::json::parse(slurp(a / "final_theta.json"));
  CHECK(thetas.at("theta_star").size() == 2);
  for (const auto* learner : {"ogd", "learn", "topk", "uncertain_topk"}) {
    CHECK(thetas.at("final_theta").at(learner).size() == 2);
  }
}

TEST_CASE("dump-stream with k = 0 has no outliers") {
  const fs::path dir = fresh_dir("dump_clean");
  CliOptions o;
  o.preset = "ridge";
  o.T = 100;
  o.k = 0;
  o.seeds = "1";
  o.out_dir = dir;
  std::ostringstream out, err;
  REQUIRE(cmd_dump_stream(o, out, err) == kExitOk);
  const auto lines = lines_of(slurp(dir / "stream.jsonl"));
  CHECK(lines.size() == 100);
  for (const auto& line : lines) CHECK_FALSE(nlohmann::json::parse(line).at("is_outlier").get<bool>());
}

TEST_CASE("verify in quick mode prints one line per check") {
  CliOptions o;
  o.samples = 10;
  std::ostringstream out, err;
  CHECK(cmd_verify(o, out, err) == kExitOk);
  const auto lines = lines_of(out.str());
  CHECK(lines.size() > 30);
  for (const auto& line : lines) {
    const bool ok = line.find("violations=0") != std::string::npos ||
                    line.find("holds=true") != std::string::npos;
    CHECK_MESSAGE(ok, line);
  }
  CHECK(out.str().find("invexity[") != std::string::npos);
  CHECK(out.str().find("regret_bound[ridge,T=200,D=5,k=34]") != std::string::npos);
}

TEST_CASE("binary exit codes") {
  CHECK(run_binary("verify --samples 10") == 0);
  CHECK(run_binary("run --config /nonexistent/x.cfg") == 2);
  CHECK(run_binary("frobnicate") == 2);
  const fs::path dir = fresh_dir("binary");
  CHECK(run_binary("run --preset svm --T 30 --seeds 1 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "regret_learn_k0.csv"));
  CHECK(run_binary("run --preset svm --T 30 --k 40 --out " + dir.string()) == 2);
}

TEST_CASE("shipped example configs load") {
  for (const auto* name : {"svm_learn.cfg", "ridge_bound.cfg", "svm_experts.cfg"}) {
    CliOptions o;
    o.config_path = std::string(ROBUST_OCO_CONFIG_DIR) + "/" + name;
    CHECK_NOTHROW(effective_config(o));
  }
}

TEST_CASE("ROBUST_OCO_SEED shifts the seeds of the binary") {
  const fs::path plain = fresh_dir("env_plain"), shifted = fresh_dir("env_shifted");
  CHECK(run_binary("run --preset svm --T 30 --seeds 5 --out " + plain.string()) == 0);
  CHECK(run_binary("run --preset svm --T 30 --seeds 1 --out " + shifted.string() +
                   " --workers 1") == 0);
  const std::string cmd = "ROBUST_OCO_SEED=5 " + std::string(ROBUST_OCO_CLI_PATH) +
                          " run --preset svm --T 30 --out " + shifted.string() +
                          " --seeds 1 > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(plain / "regret_learn_k0.csv") == slurp(shifted / "regret_learn_k0.csv"));
  CHECK(slurp(shifted / "manifest.txt").find("run.seeds = 5") != std::string::npos);
}
