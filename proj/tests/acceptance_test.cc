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

// Acceptance gate: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <Eigen/Dense>

#include "privgp/bandit.h"
#include "privgp/envs.h"
#include "privgp/experiment.h"
#include "privgp/features.h"
#include "privgp/kernels.h"
#include "privgp/posterior.h"
#include "privgp/privacy.h"
#include "privgp/reference.h"
#include "privgp/rng.h"

namespace {

using namespace privgp;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Master seed of every simulated sweep, fixed before any sweep was run.
constexpr uint64_t kMasterSeed = 2024;
// Quadrature nodes per dimension for the d = 2 sweeps.
constexpr int kSweepMBar = 14;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

int Workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------
// 1. QFF approximation on [0, 1].
Verdict QffApproximation() {
  const auto start = Clock::now();
  const SEKernel k = SEKernel::Isotropic(1, 1.0);
  const auto grid = BoxGrid(Point::Zero(1), Point::Ones(1), 100);
  Verdict v{true, ""};
  double previous = INFINITY;
  for (int m_bar : {4, 8, 12}) {
    const ApproxCertificate c = CertifyUniformError(FeatureMap::Qff({1.0}, m_bar), k, grid);
    v.pass = v.pass && c.measured <= *c.bound && c.measured < previous;
    previous = c.measured;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "m_bar=%d eps=%.3g bound=%.3g; ", m_bar, c.measured,
                  *c.bound);
    v.detail += buf;
  }
  const double secs = Seconds(start);
  v.pass = v.pass && secs < 1.0;
  v.detail += Fmt("%.3fs", secs);
  return v;
}

// ---------------------------------------------------------------------------
// 2. Feature-space posterior versus the kernel-space oracle under k~.
Verdict OracleEquivalence() {
  const auto start = Clock::now();
  const double rho = 0.5, ridge = 1.0;
  std::mt19937_64 rng(kMasterSeed);
  double worst = 0.0;
  for (int d : {1, 2}) {
    for (int m_bar : {2, 4, 8}) {
      const FeatureMap map = FeatureMap::Qff(std::vector<double>(d, 1.0), m_bar);
      std::map<std::vector<double>, Eigen::VectorXd> cache;
      auto embed = [&](const Point& x) -> const Eigen::VectorXd& {
        std::vector<double> key(x.data(), x.data() + x.size());
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, map.Embed(x)).first;
        return it->second;
      };
      const reference::KernelFn approx = [&](const Point& a, const Point& b) {
        return embed(a).dot(embed(b));
      };
      PosteriorState state(map.embedding_dim());
      reference::History history;
      for (int t = 1; t <= 50; ++t) {
        const Point x = SampleUniformBall(d, kBallRadius, rng);
        const double y = static_cast<double>(rng() % 2);
        state.Update(embed(x), y);
        history.Add(x, y);
        const NoisyView view(state.sigma(), state.u(), ridge);
        for (int q = 0; q < 4; ++q) {
          const Point xq = SampleUniformBall(d, kBallRadius, rng);
          const Prediction p = view.Predict(embed(xq), rho);
          const reference::ExactPosterior e =
              reference::ExactPosteriorAt(history, approx, ridge, rho, xq);
          worst = std::max({worst, std::abs(p.mean - e.mean),
                            std::abs(p.stddev - std::sqrt(e.variance))});
        }
      }
    }
  }
  const double secs = Seconds(start);
  return {worst <= 1e-8 && secs < 5.0,
          Fmt("max abs diff %.2e over t<=50, m_bar in {2,4,8}, d in {1,2}; ", worst) +
              Fmt("%.2fs", secs)};
}

// ---------------------------------------------------------------------------
// 3. sigma~_t(x) <= sigma_t(x) + 2 t^2 sqrt(eps) / rho.
Verdict VarianceInflation() {
  const double rho = 0.5;
  const SEKernel kernel = SEKernel::Isotropic(2, 1.0);
  std::mt19937_64 rng(kMasterSeed + 3);
  int violations = 0, checks = 0;
  std::string eps_list;
  for (int m_bar : {4, 8, kSweepMBar}) {
    const FeatureMap map = FeatureMap::Qff(kernel.lengthscales(), m_bar);
    std::vector<Point> tests, history_points;
    for (int i = 0; i < 50; ++i) tests.push_back(SampleUniformBall(2, kBallRadius, rng));
    for (int i = 0; i < 30; ++i) {
      history_points.push_back(SampleUniformBall(2, kBallRadius, rng));
    }
    std::vector<Point> grid = BallGrid(2, kBallRadius, 21);
    grid.insert(grid.end(), tests.begin(), tests.end());
    grid.insert(grid.end(), history_points.begin(), history_points.end());
    const double eps = CertifyUniformError(map, kernel, grid).measured;
    eps_list += Fmt("%.2g ", eps);
    PosteriorState state(map.embedding_dim());
    reference::History history;
    for (int t = 1; t <= 30; ++t) {
      const Point& x = history_points[t - 1];
      const double y = static_cast<double>(rng() % 2);
      state.Update(map.Embed(x), y);
      history.Add(x, y);
      const NoisyView view(state.sigma(), state.u(), 1.0);
      for (const Point& xq : tests) {
        const double approx = view.Predict(map.Embed(xq), rho).stddev;
        const double exact =
            std::sqrt(reference::ExactPosteriorAt(history, kernel, 1.0, rho, xq).variance);
        ++checks;
        violations += approx > exact + 2.0 * t * t * std::sqrt(eps) / rho;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " +
                               std::to_string(checks) + " checks (m_bar 4/8/14, eps " +
                               eps_list + ")"};
}

// ---------------------------------------------------------------------------
// 4. Tree structure at T = 64.
Verdict TreeStructure() {
  const int T = 64, dim = 5;
  std::mt19937_64 rng(kMasterSeed + 4);
  // Entries are multiples of 1/8, so sums are exact in floating point.
  auto datum = [&] {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = static_cast<double>(rng() % 5) / 8.0;
    return v;
  };
  NoisyTree zero(T, dim, 0.0, 1);
  NoisyTree noisy(T, dim, 1.0, 1);
  Eigen::MatrixXd exact = Eigen::MatrixXd::Zero(dim, dim);
  int max_reads_excess = -100, max_touches = 0, inexact = 0;
  for (int t = 1; t <= T; ++t) {
    const Eigen::MatrixXd p = zero.PrefixBlock(t);
    noisy.PrefixBlock(t);
    inexact += (p != exact);
    const int allowed = 1 + static_cast<int>(std::ceil(std::log2(t)));
    max_reads_excess = std::max({max_reads_excess, zero.last_prefix_reads() - allowed,
                                 noisy.last_prefix_reads() - allowed});
    const Eigen::VectorXd v = datum();
    zero.Insert(t, v);
    noisy.Insert(t, v);
    exact += v * v.transpose();
    max_touches = std::max({max_touches, zero.last_insert_touches(),
                            noisy.last_insert_touches()});
  }
  const bool pass = max_reads_excess <= 0 && inexact == 0 && max_touches <= 7;
  return {pass, "reads - (1+ceil(log2 t)) <= " + std::to_string(max_reads_excess) +
                    ", inexact zero-noise prefixes " + std::to_string(inexact) +
                    ", max nodes per leaf " + std::to_string(max_touches)};
}

// ---------------------------------------------------------------------------
// 5. Spectral accuracy over 1000 draws at T = 100, m = 64, alpha = 1.
Verdict SpectralAccuracy() {
  const auto start = Clock::now();
  const int T = 100, m = 64, draws = 1000;
  const double zeta = 0.1, alpha = 1.0, beta = 0.1, B = 1.0, rho = 0.5;
  const int depth = TreeDepth(T);
  const double sigma = JdpNoiseScale(alpha, beta, T, B, rho);
  const SpectralBounds jb = JdpSpectral(sigma, depth, m, T, zeta);
  const LdpNoise ln = LdpNoiseScales(alpha, beta, B, m);
  const SpectralBounds lb = LdpSpectral(ln.sigma_x, ln.sigma_u, m, T, zeta);
  // JDP: the prefix over 63 leaves reads the most nodes (6) of any t <= T.
  // LocalJDP: the final round carries the most accumulated noise.
  const std::vector<NodeId> cover = DyadicCover(63);
  int jdp_spec = 0, jdp_kappa = 0, ldp_spec = 0, ldp_kappa = 0;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m);
  for (int draw = 0; draw < draws; ++draw) {
    const uint64_t seed = DeriveSeed(kMasterSeed, 5, draw);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (const NodeId& id : cover) {
      block += SampleNodeNoise(m + 1, sigma, seed, id.level, id.index);
    }
    {
      const Eigen::MatrixXd noise = block.topLeftCorner(m, m);
      const Eigen::VectorXd h = block.col(m).head(m);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(noise, Eigen::EigenvaluesOnly);
      jdp_spec += eig.eigenvalues().cwiseAbs().maxCoeff() <= jb.lambda_min;
      const Eigen::MatrixXd H = PsdShift(noise, jb.shift);
      jdp_kappa += std::sqrt(h.dot(H.llt().solve(h))) <= jb.kappa;
    }
    Rng rng(seed);
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(m);
    for (int t = 1; t < T; ++t) {
      const LdpIncrement inc = LdpPerturb(zero, 0.0, ln.sigma_x, ln.sigma_u, rng);
      noise += inc.sigma;
      h += inc.u;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(noise, Eigen::EigenvaluesOnly);
    ldp_spec += eig.eigenvalues().cwiseAbs().maxCoeff() <= lb.lambda_min;
    const Eigen::MatrixXd H = PsdShift(noise, lb.shift);
    ldp_kappa += std::sqrt(h.dot(H.llt().solve(h))) <= lb.kappa;
  }
  const double secs = Seconds(start);
  const int need = static_cast<int>(std::ceil(0.99 * draws));
  const bool pass = jdp_spec >= need && jdp_kappa >= need && ldp_spec >= need &&
                    ldp_kappa >= need && secs < 30.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "JDP spectrum %d/%d kappa %d/%d; LocalJDP spectrum %d/%d kappa %d/%d; %.1fs",
                jdp_spec, draws, jdp_kappa, draws, ldp_spec, draws, ldp_kappa, draws, secs);
  return {pass, buf};
}

// ---------------------------------------------------------------------------
// Shared sweeps for 6, 7 and 9.

ExperimentSpec SweepSpec(const std::string& body) {
  ExperimentSpec spec = ParseConfig(body + "\nT = 1024\nd = 2\nnu = 1\nm_bar = " +
                                    std::to_string(kSweepMBar) +
                                    "\nn_candidates = 25\ntrials = 20\nseed = " +
                                    std::to_string(kMasterSeed) + "\n");
  return spec;
}

struct Curve {
  std::string name;
  double final_mean = 0.0;
  double first_half = 0.0;
  double second_half = 0.0;
  std::vector<double> finals;
};

Curve Summarize(const CellResult& c) {
  Curve curve;
  curve.name = c.cell.name();
  for (const RunRecord& r : c.trials) {
    const size_t half = r.rounds.size() / 2;
    const double mid = r.rounds[half - 1].cum_regret;
    curve.first_half += mid;
    curve.second_half += r.final_regret() - mid;
    curve.finals.push_back(r.final_regret());
  }
  const double n = static_cast<double>(c.trials.size());
  curve.first_half /= n;
  curve.second_half /= n;
  curve.final_mean = c.MeanFinalRegret();
  return curve;
}

std::string Describe(const Curve& c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s=%.1f (halves %.1f/%.1f)", c.name.c_str(),
                c.final_mean, c.first_half, c.second_half);
  return buf;
}

struct Sweeps {
  std::vector<Curve> fig1;  // nonprivate, alpha 0.1, 0.5, 1, 10 at beta 0.1
  double fig1_seconds = 0.0;
  std::vector<Curve> fig2;  // alpha 1, beta 0.01, 0.1, 0.5, 0.99
  Curve ldp;                // alpha 1, beta 0.1
};

Sweeps RunSweeps() {
  Sweeps s;
  auto start = Clock::now();
  const ExperimentResult fig1 = RunExperiment(
      SweepSpec("regime = nonprivate, jdp\nalpha = 0.1, 0.5, 1, 10\nbeta_priv = 0.1"),
      Workers());
  s.fig1_seconds = Seconds(start);
  for (const CellResult& c : fig1.cells) s.fig1.push_back(Summarize(c));

  const ExperimentResult fig2 = RunExperiment(
      SweepSpec("regime = jdp\nalpha = 1\nbeta_priv = 0.01, 0.5, 0.99"), Workers());
  s.fig2 = {Summarize(fig2.cells[0]), s.fig1[3], Summarize(fig2.cells[1]),
            Summarize(fig2.cells[2])};

  const ExperimentResult ldp = RunExperiment(
      SweepSpec("regime = ldp\nalpha = 1\nbeta_priv = 0.1"), Workers());
  s.ldp = Summarize(ldp.cells[0]);
  return s;
}

// 6. Regret ordering across alpha and sublinear curves.
Verdict PrivacyBudgetSweep(const Sweeps& s) {
  const std::vector<Curve>& c = s.fig1;  // nonprivate, 0.1, 0.5, 1, 10
  const bool ordered = c[1].final_mean > c[2].final_mean && c[2].final_mean > c[3].final_mean &&
                       c[3].final_mean > c[4].final_mean && c[4].final_mean > c[0].final_mean;
  bool sublinear = true;
  std::string detail;
  for (const Curve& curve : c) {
    sublinear = sublinear && curve.second_half < curve.first_half;
    detail += Describe(curve) + "; ";
  }
  detail += Fmt("%.0fs", s.fig1_seconds);
  const bool fast = s.fig1_seconds < 600.0;
  return {ordered && sublinear && fast, std::string(ordered ? "ordered" : "NOT ordered") +
                                            ", " + (sublinear ? "sublinear" : "NOT sublinear") +
                                            (fast ? "" : ", too slow") + ": " + detail};
}

// 7. Regret increases as beta_priv decreases.
Verdict FailureProbabilitySweep(const Sweeps& s) {
  const std::vector<Curve>& c = s.fig2;  // beta 0.01, 0.1, 0.5, 0.99
  const bool ordered = c[0].final_mean > c[1].final_mean && c[1].final_mean > c[2].final_mean &&
                       c[2].final_mean > c[3].final_mean;
  std::string detail;
  for (const Curve& curve : c) detail += Fmt("%.1f ", curve.final_mean) + "(" + curve.name + ") ";
  return {ordered, std::string(ordered ? "ordered: " : "NOT ordered: ") + detail};
}

// 9. LocalJDP regret at least JDP regret.
Verdict LocalVersusCentral(const Sweeps& s) {
  const Curve& jdp = s.fig1[3];
  int paired = 0;
  for (size_t i = 0; i < jdp.finals.size(); ++i) paired += s.ldp.finals[i] >= jdp.finals[i];
  char buf[160];
  std::snprintf(buf, sizeof(buf), "LocalJDP %.1f vs JDP %.1f (LocalJDP >= JDP in %d/20 seeds)",
                s.ldp.final_mean, jdp.final_mean, paired);
  return {s.ldp.final_mean >= jdp.final_mean, buf};
}

// ---------------------------------------------------------------------------
// 8. Camelback ordering at T = 2048.
Verdict CamelbackOrdering() {
  const auto start = Clock::now();
  const ExperimentSpec spec = ParseConfig(
      "env = camelback\nregime = nonprivate, jdp\nalpha = 10, 1, 0.1\nbeta_priv = 0.1\n"
      "T = 2048\nd = 2\nnu = 1\nm_bar = " + std::to_string(kSweepMBar) +
      "\nn_candidates = 25\ntrials = 10\nseed = " + std::to_string(kMasterSeed) + "\n");
  const ExperimentResult r = RunExperiment(spec, Workers());
  std::vector<double> means;
  std::string detail;
  for (const CellResult& c : r.cells) {
    means.push_back(c.MeanFinalRegret());
    detail += c.cell.name() + Fmt("=%.1f ", means.back());
  }
  const bool ordered = means[0] < means[1] && means[1] < means[2] && means[2] < means[3];
  return {ordered, std::string(ordered ? "ordered: " : "NOT ordered: ") + detail +
                       Fmt("(%.0fs)", Seconds(start))};
}

// ---------------------------------------------------------------------------
// 10. Archived runs replay byte for byte.
Verdict Determinism() {
  const fs::path root =
      fs::temp_directory_path() / ("privgp_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  ExperimentSpec spec = ParseConfig(
      "regime = nonprivate, jdp, ldp\nalpha = 0.5, 5\nbeta_priv = 0.1\nT = 96\nd = 2\n"
      "m_bar = 6\ntrials = 3\nseed = " + std::to_string(kMasterSeed) + "\n");
  spec.out_dir = (root / "original").string();
  WriteOutputs(spec, RunExperiment(spec, Workers()), spec.out_dir);

  ExperimentSpec archived = LoadConfig(root / "original" / "config.txt");
  const bool hash_ok = ConfigHash(archived) == ConfigHash(spec);
  archived.out_dir = (root / "replay").string();
  WriteOutputs(archived, RunExperiment(archived, 1), archived.out_dir);

  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  int files = 0, mismatched = 0;
  for (const auto& entry : fs::directory_iterator(root / "original")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    mismatched += read(entry.path()) != read(root / "replay" / entry.path().filename());
  }
  fs::remove_all(root);
  return {hash_ok && files > 0 && mismatched == 0,
          std::to_string(files - mismatched) + "/" + std::to_string(files) +
              " CSV files identical after replay from the archived config" +
              (hash_ok ? "" : ", config hash changed")};
}

// ---------------------------------------------------------------------------
// 11. Coverage of f by mu~ +- beta sigma~ without privacy noise.
Verdict ConfidenceCoverage() {
  const auto start = Clock::now();
  const int runs = 200, T = 100;
  RunConfig config;
  config.m_bar = kSweepMBar;
  config.zeta = 0.1;
  int covered = 0;
  for (int run = 0; run < runs; ++run) {
    const uint64_t seed = DeriveSeed(kMasterSeed, 11, run);
    SyntheticEnvironment env(2, 1.0, 25, seed);
    const FeatureMap map = BuildFeatureMap(config, 2);
    const double eps =
        CertifyUniformError(map, SEKernel::Isotropic(2, 1.0), env.CertificationGrid()).measured;
    const ConfidenceParams params = MakeConfidence(config, SpectralBounds{}, eps);
    PosteriorState state(map.embedding_dim());
    bool inside = true;
    for (int t = 1; t <= T && inside; ++t) {
      const DecisionSet set = env.NextDecisionSet();
      const NoisyView view(state.sigma(), state.u(), config.ridge);
      const double beta = BetaHalf(params, view, t);
      std::vector<EmbeddedCandidate> candidates;
      for (int i = 0; i < set.size(); ++i) {
        candidates.push_back({i, map.Embed(set.points[i])});
        const Prediction p = view.Predict(candidates.back().phi, config.rho);
        inside = inside && std::abs(set.values[i] - p.mean) <= beta * p.stddev;
      }
      const int chosen = SelectAction(view, beta, candidates, config.rho);
      state.Update(candidates[chosen].phi, env.SampleReward(set.points[chosen]));
    }
    covered += inside;
  }
  const double rate = static_cast<double>(covered) / runs;
  return {rate >= 0.9, std::to_string(covered) + "/" + std::to_string(runs) +
                           " runs covered at every round and candidate (T=100)" +
                           Fmt(", %.0fs", Seconds(start))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> head = {
      {"QFF approximation error within analytic bound", QffApproximation},
      {"feature-space posterior matches kernel-space oracle", OracleEquivalence},
      {"variance inflation bound", VarianceInflation},
      {"tree mechanism structure", TreeStructure},
      {"spectral accuracy of both noise calibrations", SpectralAccuracy},
  };
  int failures = 0;
  auto report = [&](int id, const std::string& name, const Verdict& v) {
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };
  int id = 1;
  for (const auto& [name, fn] : head) report(id++, name, fn());

  const Sweeps sweeps = RunSweeps();
  report(6, "regret ordering across privacy budgets, sublinear curves",
         PrivacyBudgetSweep(sweeps));
  report(7, "regret increases as beta_priv decreases", FailureProbabilitySweep(sweeps));
  report(8, "Camelback ordering", CamelbackOrdering());
  report(9, "LocalJDP regret at least JDP regret", LocalVersusCentral(sweeps));
  report(10, "replay determinism", Determinism());
  report(11, "confidence coverage", ConfidenceCoverage());
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
