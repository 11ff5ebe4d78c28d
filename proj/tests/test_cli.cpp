/*
 * Copyright 2026 The desync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "desync_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(DESYNC_CLI_PATH) + " " + args + " > " + (kDir / "stdout.txt").string() +
                          " 2> " + (kDir / "stderr.txt").string();
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string write(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  const fs::path f = kDir / name;
  std::ofstream(f) << text;
  return f.string();
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("exit codes") {
  const auto good = write("good.json", R"({"params": {"n": 2, "coupling": -0.2}, "initial": {"state": [0, 0.1]},
      "stop": {"max_flow_time": 10}, "analysis": {"c2": 0.24, "c1": 0.1}})");
  const auto bad = write("bad.json", R"({"params": {"n": 2, "coupling": 0.2}, "initial": {"state": [0, 0.1]}})");
  const auto out = (kDir / "out").string();

  CHECK(run("simulate --config " + good + " --out " + out) == 0);
  CHECK(fs::exists(fs::path(out) / "arc.csv"));
  CHECK(fs::exists(fs::path(out) / "jumps.csv"));

  CHECK(run("bound --config " + good) == 0);
  CHECK(slurp(kDir / "stdout.txt").find("bound_m=7.84668") != std::string::npos);

  CHECK(run("desync-set --config " + good) == 0);
  CHECK(slurp(kDir / "stdout.txt").rfind("tau_1,tau_2\n", 0) == 0);

  CHECK(run("verify --config " + good) == 0);

  CHECK(run("simulate --config " + bad) == 1);
  CHECK(slurp(kDir / "stderr.txt").find("params.coupling") != std::string::npos);
  CHECK(run("simulate") == 1);
  CHECK(run("teleport --config " + good) == 1);

  CHECK(run("simulate --config " + (kDir / "missing.json").string()) == 2);
  const auto blocker = write("blocker", "x");
  CHECK(run("simulate --config " + good + " --out " + blocker + "/sub") == 2);
}

TEST_CASE("verify reports an invariant violation with exit code 3") {
  // Horizon far too short for the transient to decay below the drift bound.
  const auto cfg = write("violate.json", R"({"params": {"n": 2, "threshold": 4, "coupling": -0.3},
      "perturbation": {"kind": "flow-rate", "magnitudes": [0.120, 0.134]},
      "initial": {"state": [0.0, 0.05]}, "stop": {"max_flow_time": 5},
      "analysis": {"steady_fraction": 0.1}})");
  CHECK(run("verify --config " + cfg) == 3);
  CHECK(slurp(kDir / "stdout.txt").find(",steady_state_v,") != std::string::npos);
}

TEST_CASE("seed flag changes random batches, same seed reproduces them") {
  const auto cfg = write("batch.json", R"({"params": {"n": 3, "coupling": -0.3},
      "initial": {"mode": "random", "count": 3}, "stop": {"max_flow_time": 10}})");
  const auto a = (kDir / "ba").string(), b = (kDir / "bb").string(), c = (kDir / "bc").string();
  CHECK(run("batch --config " + cfg + " --out " + a + " --seed 4") == 0);
  CHECK(run("batch --config " + cfg + " --out " + b + " --seed 4") == 0);
  CHECK(run("batch --config " + cfg + " --out " + c + " --seed 5") == 0);
  CHECK(slurp(fs::path(a) / "summary.csv") == slurp(fs::path(b) / "summary.csv"));
  CHECK(slurp(fs::path(a) / "summary.csv") != slurp(fs::path(c) / "summary.csv"));
}

TEST_CASE("fig4 subcommand") {
  const auto cfg = write("fig4.json", R"({"params": {"n": 2}, "initial": {"state": [0, 0.1]},
      "fig4": {"eps": [-0.9, -0.5, -0.1], "c1_fractions": [0.5, 0.05], "c2_fraction": 0.99}})");
  const auto out = (kDir / "f4").string();
  CHECK(run("fig4 --config " + cfg + " --out " + out) == 0);
  const std::string text = slurp(fs::path(out) / "fig4.csv");
  CHECK(text.rfind("eps,c1,m_normalized\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}
