// Copyright 2026 The zpgsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zpgsim/zpgsim.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;
constexpr int kExitGuardRefusal = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--workers", args.workers, "Worker threads for config batches");
  cmd->add_option("--seed", args.seed, "Override the haar circuit seed");
}

zpgsim::ExperimentConfig load_config(const CommonArgs& args, const std::string& expected_task) {
  std::ifstream in(args.config_path);
  if (!in) throw zpgsim::ConfigError("cannot open config file " + args.config_path);
  zpgsim::json j;
  try {
    j = zpgsim::json::parse(in);
  } catch (const zpgsim::json::parse_error& e) {
    throw zpgsim::ConfigError(std::string("config parse error: ") + e.what());
  }
  zpgsim::ExperimentConfig config = zpgsim::ExperimentConfig::from_json(j);
  if (zpgsim::task_name(config.task) != expected_task)
    throw zpgsim::ConfigError("config task '" + std::string(zpgsim::task_name(config.task)) +
                              "' does not match subcommand '" + expected_task + "'");
  return config;
}

void write_reports(const zpgsim::ReportBundle& report, const CommonArgs& args,
                   const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  bool want_json = false, want_csv = false;
  for (const std::string& f : formats) {
    want_json |= (f == "json");
    want_csv |= (f == "csv");
  }
  if (want_json) {
    std::ofstream out(dir / "summary.json");
    out << report.summary.dump(2) << "\n";
  }
  if (want_csv && !report.results_csv.empty()) {
    std::ofstream out(dir / "results.csv");
    out << report.results_csv;
  }
  std::ofstream manifest(dir / "manifest.json");
  manifest << report.manifest.dump(2) << "\n";
}

int run_task(const CommonArgs& args, const std::string& task) {
  zpgsim::ExperimentConfig config = load_config(args, task);
  zpgsim::ReportBundle report = zpgsim::run_experiment(config, args.seed, args.workers);
  write_reports(report, args, config.formats);
  std::cout << report.summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-integrated photon counting via zero-photon generators"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> tasks = {
      {"pn-dist", "pn_dist"},           {"threshold", "threshold"},
      {"fom", "fom"},                   {"hom", "hom"},
      {"tvd-benchmark", "tvd_benchmark"}, {"bench", "bench_scaling"}};

  std::vector<CommonArgs> args(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(tasks[i].first, "Run the " + tasks[i].second + " task");
    add_common_flags(cmd, args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      if (app.got_subcommand(tasks[i].first)) return run_task(args[i], tasks[i].second);
    return kExitConfigError;
  } catch (const zpgsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const zpgsim::GuardRefusal& e) {
    std::cerr << "guard refusal: " << e.what() << "\n";
    return kExitGuardRefusal;
  } catch (const zpgsim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}
