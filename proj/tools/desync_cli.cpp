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
// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "desync/desync.h"

namespace {

enum Exit { kOk = 0, kConfig = 1, kIo = 2, kInvariant = 3 };

void to_stdout(const char* data, size_t size, void*) { std::fwrite(data, 1, size, stdout); }

int exit_code(desync_status s) {
  switch (s) {
    case DESYNC_OK:
      return kOk;
    case DESYNC_ERR_IO:
      return kIo;
    case DESYNC_ERR_INVARIANT_VIOLATION:
      return kInvariant;
    default:
      return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification of impulse-coupled oscillator networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  const char* commands[][2] = {
      {"simulate", "simulate one arc; writes arc.csv and jumps.csv"},
      {"batch", "simulate a seeded batch; writes dist_<k>.csv and summary.csv"},
      {"desync-set", "print every anchor of the desynchronization set as CSV"},
      {"bound", "print convergence and robustness bounds as key=value lines"},
      {"verify", "check contraction, convergence and ordering along simulated arcs"},
      {"fig4", "tabulate normalized convergence time against coupling; writes fig4.csv"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", config_path, "run configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides outputs.directory)");
    sub->add_option("--seed", seed, "base seed (overrides initial.seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot read config file '" << config_path << "'\n";
    return kIo;
  }
  std::stringstream text;
  text << in.rdbuf();

  const CLI::App* sub = app.get_subcommands().front();
  const bool has_seed = sub->count("--seed") > 0;
  const desync_status status =
      desync_run(sub->get_name().c_str(), text.str().c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
                 has_seed ? 1 : 0, seed, to_stdout, nullptr);
  std::fflush(stdout);
  if (status != DESYNC_OK) std::cerr << "error: " << desync_last_error() << '\n';
  return exit_code(status);
}
