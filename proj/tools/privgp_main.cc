//
// Copyright 2026 The privgp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// privgp_cli: run, replay and certify experiment configs.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "privgp/errors.h"
#include "privgp/experiment.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw privgp::ConfigError("", "cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void PrintSummary(const privgp::ExperimentResult& result) {
  for (const privgp::CellResult& c : result.cells) {
    std::printf("%-32s trials=%zu final_regret=%.4f +- %.4f\n", c.cell.name().c_str(),
                c.trials.size(), c.MeanFinalRegret(), c.StdFinalRegret());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private GP-UCB simulator"};
  app.require_subcommand(1);

  std::string config_path;
  int trials = 0;
  uint64_t seed = 0;
  std::string out_dir;
  int parallel = 1;
  int trial = -1;

  CLI::App* run = app.add_subcommand("run", "Run a sweep and write CSV/SVG outputs");
  run->add_option("--config", config_path, "Config file")->required();
  CLI::Option* run_trials = run->add_option("--trials", trials, "Trials per cell")
                                ->check(CLI::PositiveNumber);
  CLI::Option* run_seed = run->add_option("--seed", seed, "Master seed");
  CLI::Option* run_out = run->add_option("--out", out_dir, "Output directory");
  run->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

  CLI::App* replay =
      app.add_subcommand("replay", "Re-run an archived config with a given seed");
  replay->add_option("--config", config_path, "Archived config.txt")->required();
  replay->add_option("--seed", seed, "Master seed")->required();
  replay->add_option("--trial", trial, "Replay a single trial index")
      ->check(CLI::NonNegativeNumber);
  CLI::Option* replay_out = replay->add_option("--out", out_dir, "Output directory");
  replay->add_option("--parallel", parallel, "Worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* certify =
      app.add_subcommand("certify", "Print the feature-map error and its bound");
  certify->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const std::string text = ReadText(config_path);
    privgp::ExperimentSpec spec = privgp::ParseConfig(text);

    if (*certify) {
      privgp::RunConfig config = spec.base;
      const auto env = privgp::MakeEnvironment(spec, spec.master_seed);
      const privgp::FeatureMap map = privgp::BuildFeatureMap(config, env->dim());
      const privgp::SEKernel kernel = privgp::SEKernel::Isotropic(env->dim(), config.lengthscale);
      const privgp::ApproxCertificate cert =
          privgp::CertifyUniformError(map, kernel, env->CertificationGrid());
      std::printf("embedding_dim=%d grid_points=%d\n", map.embedding_dim(),
                  cert.grid_size);
      std::printf("epsilon_hat=%s\n", privgp::FormatDouble(cert.measured).c_str());
      if (cert.bound) {
        std::printf("bound=%s (unit-cube domain)\n", privgp::FormatDouble(*cert.bound).c_str());
      } else {
        std::printf("bound=none\n");
      }
      return 0;
    }

    if (*run) {
      if (*run_trials) spec.trials = trials;
      if (*run_seed) spec.master_seed = seed;
      if (*run_out) spec.out_dir = out_dir;
      const privgp::ExperimentResult result = privgp::RunExperiment(spec, parallel);
      privgp::WriteOutputs(spec, result, spec.out_dir);
      PrintSummary(result);
      std::printf("wrote %s\n", spec.out_dir.c_str());
      return 0;
    }

    // replay
    if (const auto recorded = privgp::RecordedHash(text)) {
      if (*recorded != privgp::ConfigHash(spec)) {
        std::fprintf(stderr,
                     "warning: config hash mismatch (recorded %016llx, computed "
                     "%016llx); the file was edited after it was archived\n",
                     static_cast<unsigned long long>(*recorded),
                     static_cast<unsigned long long>(privgp::ConfigHash(spec)));
      }
    } else {
      std::fprintf(stderr, "warning: config has no recorded hash\n");
    }
    spec.master_seed = seed;
    if (*replay_out) spec.out_dir = out_dir;
    std::vector<int> ids;
    if (trial >= 0) {
      if (trial >= spec.trials) {
        throw privgp::ConfigError("trials", "--trial " + std::to_string(trial) +
                                                " is out of range for trials = " +
                                                std::to_string(spec.trials));
      }
      ids.push_back(trial);
    } else {
      for (int i = 0; i < spec.trials; ++i) ids.push_back(i);
    }
    const privgp::ExperimentResult result = privgp::RunTrials(spec, ids, parallel);
    privgp::WriteOutputs(spec, result, spec.out_dir, ids);
    PrintSummary(result);
    std::printf("wrote %s\n", spec.out_dir.c_str());
    return 0;
  } catch (const privgp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
