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

#ifndef PRIVGP_EXPERIMENT_H_
#define PRIVGP_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "privgp/bandit.h"
#include "privgp/envs.h"

namespace privgp {

enum class EnvKind { kSynthetic, kCamelback };

// A sweep over (regime, alpha, beta_priv) cells, each run for `trials`
// seeded trials.
//
// Config files are flat `key = value` text; `#` starts a comment. Keys:
//   regime        comma list of nonprivate | jdp | ldp
//   T             horizon
//   d             input dimension (synthetic environment)
//   nu            kernel lengthscale
//   m_bar         quadrature nodes per dimension
//   feature_kind  qff | rff
//   alpha         comma list of privacy budgets
//   beta_priv     comma list of privacy failure probabilities
//   B, rho, lambda, zeta
//   n_candidates  decision-set size
//   trials, seed, out_dir
//   env           synthetic | camelback
//   anchors       optional fixed function: "x11 x12; x21 x22; ..."
//   weights       optional fixed function weights: "a1, a2, ..."
struct ExperimentSpec {
  RunConfig base;
  EnvKind env = EnvKind::kSynthetic;
  int d = 2;
  int n_candidates = 25;
  std::vector<Regime> regimes = {Regime::kNonPrivate};
  std::vector<double> alphas = {1.0};
  std::vector<double> betas = {0.1};
  int trials = 1;
  uint64_t master_seed = 0;
  std::string out_dir = "out";
  std::optional<SyntheticFunction> fixed_function;
};

struct Cell {
  Regime regime = Regime::kNonPrivate;
  double alpha = 0.0;
  double beta_priv = 0.0;

  // File stem, e.g. "jdp_alpha1_beta0.1" or "nonprivate".
  std::string name() const;
};

// Throws ConfigError naming the offending key.
ExperimentSpec ParseConfig(std::string_view text);
ExperimentSpec LoadConfig(const std::filesystem::path& path);

// Canonical key = value form. out_dir is written last and excluded from the
// hash so relocating outputs does not change the identity of a run.
std::string SerializeConfig(const ExperimentSpec& spec);
uint64_t ConfigHash(const ExperimentSpec& spec);
// Hash recorded in a "# hash=<hex>" line of an archived config, if present.
std::optional<uint64_t> RecordedHash(std::string_view text);

// Non-private regimes ignore (alpha, beta_priv) and contribute one cell.
std::vector<Cell> ExpandCells(const ExperimentSpec& spec);

uint64_t TrialSeed(uint64_t master_seed, int trial);
RunConfig CellConfig(const ExperimentSpec& spec, const Cell& cell, int trial);
std::unique_ptr<Environment> MakeEnvironment(const ExperimentSpec& spec,
                                             uint64_t trial_seed);

struct CellResult {
  Cell cell;
  std::vector<RunRecord> trials;

  double MeanFinalRegret() const;
  // Sample standard deviation (0 for a single trial).
  double StdFinalRegret() const;
  // Mean cumulative regret per round across trials.
  std::vector<double> MeanCurve() const;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
};

// Runs every (cell, trial) pair on up to `parallel` worker threads. Results
// are ordered by cell, then trial, regardless of completion order.
ExperimentResult RunExperiment(const ExperimentSpec& spec, int parallel = 1);

// Runs only the listed trials of every cell.
ExperimentResult RunTrials(const ExperimentSpec& spec,
                           const std::vector<int>& trials, int parallel = 1);

// 17 significant digits.
std::string FormatDouble(double value);

std::string CellCsv(const CellResult& result,
                    const std::vector<int>& trial_ids = {});
std::string SummaryCsv(const ExperimentResult& result);
std::string RegretSvg(const ExperimentResult& result, std::string_view title);

// Writes <cell>.csv per cell, summary.csv, regret.svg and config.txt into
// `dir`, creating it if needed. Throws std::runtime_error if it cannot write.
void WriteOutputs(const ExperimentSpec& spec, const ExperimentResult& result,
                  const std::filesystem::path& dir,
                  const std::vector<int>& trial_ids = {});

}  // namespace privgp

#endif  // PRIVGP_EXPERIMENT_H_
