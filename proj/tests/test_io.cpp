/*
 Copyright 2026 The stoc authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stoc/io.hpp"
#include "stoc/problems.hpp"
#include "stoc/runner.hpp"

using Catch::Approx;
using namespace stoc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stoc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

// strip the trailing timing columns (and keep everything before them)
std::string drop_timing_columns(const std::string& line, int keep_cols) {
  std::stringstream ss(line);
  std::string field;
  std::string out;
  for (int c = 0; c < keep_cols && std::getline(ss, field, ','); ++c) {
    out += (c ? "," : "") + field;
  }
  return out;
}

}  // namespace

TEST_CASE("doubles round-trip through their shortest representation") {
  for (double v : {0.1919, 1.0 / 3.0, 2.0 / 175.0, 1e-17, -3.5, 0.0}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("log csv carries the documented columns") {
  ConvergenceLog log;
  IterationRecord r;
  r.iter = 0;
  r.opt_error = 1.25;
  r.alpha = 0.5;
  r.t_s = {0.4, 1.2};
  r.i_s = {3, 9};
  r.backward_ns = 100;
  r.forward_ns = 50;
  log.records.push_back(r);
  const auto lines = lines_of(log_csv(log));
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "iter,opt_error,alpha,t_s_1,t_s_2,is_1,is_2,t_backward_ns,"
        "t_forward_ns");
  CHECK(lines[1] == "0,1.25,0.5,0.4,1.2,3,9,100,50");
}

TEST_CASE("log json lines parse back") {
  ConvergenceLog log;
  IterationRecord r;
  r.iter = 2;
  r.opt_error = 0.125;
  r.alpha = 1.0;
  r.t_s = {0.75};
  r.i_s = {12};
  log.records.push_back(r);
  const auto j = nlohmann::json::parse(lines_of(log_json_lines(log))[0]);
  CHECK(j["iter"] == 2);
  CHECK(j["opt_error"] == 0.125);
  CHECK(j["t_s"][0] == 0.75);
  CHECK(j["i_s"][0] == 12);
}

TEST_CASE("trajectory csv has one row per node plus switch nodes") {
  const ProblemSpec spec = make_example2();
  const GridLayout grid = build_grid(spec, {0.5, 1.0});
  const Iterate it = make_initial_iterate(spec, {0.5, 1.0});
  const auto lines = lines_of(trajectory_csv(spec, grid, it));
  CHECK(lines[0] == "t,x1,x2,u1");
  CHECK(lines.size() == 1 + static_cast<std::size_t>(spec.N + 1) + 2);
  // terminal row has an empty input field
  CHECK(lines.back().back() == ',');
}

TEST_CASE("runner writes the documented artifacts for example1") {
  const fs::path out = fresh_dir("run_example1");
  RunConfig cfg;
  cfg.problem = "example1";
  cfg.out_dir = out.string();
  cfg.emit_trajectory = true;
  CHECK(run(cfg) == 0);

  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["schema_version"] == 1);
  CHECK(summary["status"] == "Converged");
  CHECK(summary["t_s"][0].get<double>() == Approx(0.1919).margin(2e-3));
  CHECK(summary["iterations"].get<int>() <= 23);
  CHECK(fs::exists(out / "convergence.csv"));
  CHECK(fs::exists(out / "trajectory.csv"));

  SECTION("re-running reproduces the numeric csv content") {
    const std::string first = slurp(out / "convergence.csv");
    REQUIRE(run(cfg) == 0);
    const std::string second = slurp(out / "convergence.csv");
    const auto a = lines_of(first);
    const auto b = lines_of(second);
    REQUIRE(a.size() == b.size());
    // 3 fixed columns + one t_s column + one i_s column; timings vary
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(drop_timing_columns(a[i], 5) == drop_timing_columns(b[i], 5));
    }
  }
}

TEST_CASE("runner honors a config file with flag precedence") {
  const fs::path out = fresh_dir("run_config");
  const fs::path cfg_file = out / "config.json";
  {
    std::ofstream f(cfg_file);
    f << R"({"problem": "example1", "N": 100, "max_iters": 60, "t_init": [0.8]})";
  }
  RunConfig cfg;
  cfg.config_path = cfg_file.string();
  cfg.out_dir = out.string();
  cfg.N = 120;  // explicit flag beats the file
  CHECK(run(cfg) == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["problem"] == "example1");
  CHECK(summary["N"] == 120);
  CHECK(summary["t_s"][0].get<double>() == Approx(0.1919).margin(3e-3));
}

TEST_CASE("oracle check is guarded and reports tiny deviations at small N") {
  RunConfig cfg;
  cfg.problem = "example1";
  cfg.oracle_check = true;

  SECTION("rejected above the dense-size guard") {
    cfg.out_dir = fresh_dir("oracle_guard").string();
    CHECK_THROWS_AS(run(cfg), std::invalid_argument);
  }
  SECTION("runs and appends the deviation column at small N") {
    const fs::path out = fresh_dir("oracle_small");
    cfg.out_dir = out.string();
    cfg.N = 40;
    cfg.max_iters = 80;
    const int rc = run(cfg);
    CHECK(rc == 0);
    const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(summary["oracle_max_deviation"].get<double>() <= 1e-9);
    const auto lines = lines_of(slurp(out / "convergence.csv"));
    CHECK(lines[0].find("oracle_dev") != std::string::npos);
  }
}

TEST_CASE("unknown problem names are rejected with the registry contents") {
  RunConfig cfg;
  cfg.problem = "nope";
  cfg.out_dir = fresh_dir("unknown").string();
  CHECK_THROWS_WITH(run(cfg),
                    Catch::Matchers::ContainsSubstring("example1"));
}

TEST_CASE("bench mode writes the scaling table") {
  const fs::path out = fresh_dir("bench");
  RunConfig cfg;
  cfg.problem = "example1";
  cfg.out_dir = out.string();
  cfg.bench_N = {8, 16, 32};
  CHECK(run(cfg) == 0);
  const auto lines = lines_of(slurp(out / "scaling.csv"));
  CHECK(lines[0] == "N,reps,median_pass_ns,median_dense_ns,loglog_slope");
  REQUIRE(lines.size() == 4);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  CHECK(summary["mode"] == "bench");
  CHECK(summary["entries"].size() == 3);
  // dense solves were measured at these small sizes
  for (const auto& e : summary["entries"]) {
    CHECK(e["median_dense_ns"].get<std::int64_t>() > 0);
  }
}

TEST_CASE("dense cost grows faster than the recursion cost") {
  const ScalingTable table = bench_scaling("example1", {8, 32}, 40);
  REQUIRE(table.entries.size() == 2);
  REQUIRE(table.entries[0].median_dense_ns > 0);
  REQUIRE(table.entries[1].median_dense_ns > 0);
  const double dense_ratio =
      static_cast<double>(table.entries[1].median_dense_ns) /
      static_cast<double>(table.entries[0].median_dense_ns);
  const double pass_ratio =
      static_cast<double>(table.entries[1].median_pass_ns) /
      static_cast<double>(table.entries[0].median_pass_ns);
  CHECK(dense_ratio > pass_ratio);
}
