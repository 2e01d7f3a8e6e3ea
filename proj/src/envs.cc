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

#include "privgp/envs.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "privgp/errors.h"
#include "privgp/features.h"

namespace privgp {
namespace {

// Camelback extremes over [-2, 2] x [-1, 1]. The maximum 86/15 sits at the
// corners (2, 1) and (-2, -1), which lie on the 201 x 201 reference grid.
// The grid minimum (-1.03122) misses the two interior minimizers
// +-(0.0898, -0.7126), so the minimum is the known global value, confirmed by
// a 2001 x 1001 scan.
constexpr double kCamelbackMax = 86.0 / 15.0;
constexpr double kCamelbackMin = -1.0316284534898774;

int GridPerDim(int dim, double target_points) {
  return std::max(3, static_cast<int>(std::ceil(std::pow(target_points, 1.0 / dim))));
}

std::vector<Point> CertificationBallGrid(int dim) {
  int per_dim = GridPerDim(dim, 400.0);
  if (per_dim % 2 == 0) ++per_dim;  // keep the axis extremes and the origin
  return BallGrid(dim, kBallRadius, per_dim);
}

}  // namespace

double SyntheticFunction::operator()(const Point& x) const {
  double value = 0.0;
  for (size_t i = 0; i < anchors.size(); ++i) {
    value += weights[i] * kernel(anchors[i], x);
  }
  return value;
}

Point SampleUniformBall(int dim, double radius, Rng& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Point p(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) p[i] = normal(rng);
    norm = p.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(uniform(rng), 1.0 / dim);
  return p * (r / norm);
}

Eigen::VectorXd SampleUnitL1Ball(int k, Rng& rng) {
  // The first k coordinates of a flat Dirichlet on k + 1 components are
  // uniform on {w >= 0, sum w <= 1}; random signs fill the ball.
  std::exponential_distribution<double> exponential(1.0);
  std::bernoulli_distribution sign(0.5);
  Eigen::VectorXd e(k + 1);
  for (int i = 0; i <= k; ++i) e[i] = exponential(rng);
  const double total = e.sum();
  Eigen::VectorXd w(k);
  for (int i = 0; i < k; ++i) w[i] = (sign(rng) ? 1.0 : -1.0) * e[i] / total;
  return w;
}

std::vector<Point> ProbeGrid(int dim, int target_points) {
  return BallGrid(dim, kBallRadius, GridPerDim(dim, target_points));
}

SyntheticFunction SampleFunction(int dim, const SEKernel& kernel, Rng& rng,
                                 int num_anchors, int max_attempts) {
  if (dim < 1) throw std::invalid_argument("SampleFunction: dim must be >= 1");
  if (kernel.dim() != dim) {
    throw std::invalid_argument("SampleFunction: kernel dimension mismatch");
  }
  if (num_anchors < 1) {
    throw std::invalid_argument("SampleFunction: need at least one anchor");
  }
  const std::vector<Point> probe = ProbeGrid(dim);
  double best_max = -1.0;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    SyntheticFunction f{{}, {}, kernel};
    for (int i = 0; i < num_anchors; ++i) {
      f.anchors.push_back(SampleUniformBall(dim, kBallRadius, rng));
    }
    const Eigen::VectorXd w = SampleUnitL1Ball(num_anchors, rng);
    f.weights.assign(w.data(), w.data() + w.size());

    // max f <= sum of positive weights.
    if (w.cwiseMax(0.0).sum() < kNearOptimalLevel) continue;
    double max_value = -1.0;
    bool in_range = true;
    for (const Point& p : probe) {
      const double v = f(p);
      if (v < 0.0 || v > 1.0) {
        in_range = false;
        break;
      }
      max_value = std::max(max_value, v);
    }
    if (!in_range) continue;
    best_max = std::max(best_max, max_value);
    if (max_value >= kNearOptimalLevel) return f;
  }
  throw EnvironmentError(
      "SampleFunction: no admissible function after " +
      std::to_string(max_attempts) + " attempts (d=" + std::to_string(dim) +
      ", best in-range probe maximum " + std::to_string(best_max) + ")");
}

DecisionSet SampleDecisionSet(const SyntheticFunction& f, int n, Rng& rng,
                              int max_attempts) {
  if (n < 2) throw std::invalid_argument("SampleDecisionSet: n must be >= 2");
  const int dim = f.kernel.dim();
  DecisionSet set;
  bool have_best = false;
  int attempts = 0;
  while (!have_best || set.size() < n) {
    if (attempts++ >= max_attempts) {
      throw EnvironmentError(
          "SampleDecisionSet: gap construction failed after " +
          std::to_string(max_attempts) + " draws (near-optimal found: " +
          (have_best ? "yes" : "no") + ", suboptimal: " +
          std::to_string(set.size() - (have_best ? 1 : 0)) + ")");
    }
    Point p = SampleUniformBall(dim, kBallRadius, rng);
    const double v = f(p);
    if (v < 0.0 || v > 1.0) continue;
    if (v >= kNearOptimalLevel) {
      if (have_best) continue;
      have_best = true;
    } else if (v > kSuboptimalLevel) {
      continue;
    } else if (set.size() - (have_best ? 1 : 0) >= n - 1) {
      continue;
    }
    set.points.push_back(std::move(p));
    set.values.push_back(v);
  }
  // Fisher-Yates with an explicit distribution per step.
  for (int i = n - 1; i > 0; --i) {
    const int j = std::uniform_int_distribution<int>(0, i)(rng);
    std::swap(set.points[i], set.points[j]);
    std::swap(set.values[i], set.values[j]);
  }
  set.best_index = static_cast<int>(
      std::max_element(set.values.begin(), set.values.end()) - set.values.begin());
  return set;
}

int SampleReward(double mean, Rng& rng) {
  if (!(mean >= 0.0 && mean <= 1.0)) {
    throw std::invalid_argument("SampleReward: mean " + std::to_string(mean) +
                                " outside [0, 1]");
  }
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < mean ? 1 : 0;
}

double CamelbackRaw(const Point& x) {
  if (x.size() != 2) throw std::invalid_argument("Camelback: expected a 2-D point");
  const double a = x[0];
  const double b = x[1];
  const double a2 = a * a;
  const double b2 = b * b;
  return (4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b + (-4.0 + 4.0 * b2) * b2;
}

double Camelback(const Point& x) {
  if (x.size() != 2 || std::abs(x[0]) > 2.0 || std::abs(x[1]) > 1.0) {
    throw std::invalid_argument("Camelback: point outside [-2, 2] x [-1, 1]");
  }
  const double v = (kCamelbackMax - CamelbackRaw(x)) / (kCamelbackMax - kCamelbackMin);
  return std::clamp(v, 0.0, 1.0);
}

SyntheticEnvironment::SyntheticEnvironment(int dim, double lengthscale,
                                           int num_candidates, uint64_t seed)
    : SyntheticEnvironment(
          [&] {
            Rng rng = MakeRng(seed, Stream::kFunction);
            return SampleFunction(dim, SEKernel::Isotropic(dim, lengthscale), rng);
          }(),
          num_candidates, seed) {}

SyntheticEnvironment::SyntheticEnvironment(SyntheticFunction f,
                                           int num_candidates, uint64_t seed)
    : f_(std::move(f)),
      num_candidates_(num_candidates),
      sets_rng_(MakeRng(seed, Stream::kDecisionSets)),
      rewards_rng_(MakeRng(seed, Stream::kRewards)) {
  if (num_candidates < 2) {
    throw std::invalid_argument("SyntheticEnvironment: need at least 2 candidates");
  }
}

DecisionSet SyntheticEnvironment::NextDecisionSet() {
  return SampleDecisionSet(f_, num_candidates_, sets_rng_);
}

int SyntheticEnvironment::SampleReward(const Point& x) {
  return privgp::SampleReward(f_(x), rewards_rng_);
}

std::vector<Point> SyntheticEnvironment::CertificationGrid() const {
  return CertificationBallGrid(dim());
}

CamelbackEnvironment::CamelbackEnvironment(int num_candidates, uint64_t seed)
    : num_candidates_(num_candidates),
      sets_rng_(MakeRng(seed, Stream::kDecisionSets)),
      rewards_rng_(MakeRng(seed, Stream::kRewards)) {
  if (num_candidates < 1) {
    throw std::invalid_argument("CamelbackEnvironment: need at least 1 candidate");
  }
}

DecisionSet CamelbackEnvironment::NextDecisionSet() {
  std::uniform_real_distribution<double> u1(-2.0, 2.0);
  std::uniform_real_distribution<double> u2(-1.0, 1.0);
  DecisionSet set;
  for (int i = 0; i < num_candidates_; ++i) {
    Point p(2);
    p << u1(sets_rng_), u2(sets_rng_);
    set.values.push_back(Camelback(p));
    set.points.push_back(std::move(p));
  }
  set.best_index = static_cast<int>(
      std::max_element(set.values.begin(), set.values.end()) - set.values.begin());
  return set;
}

int CamelbackEnvironment::SampleReward(const Point& x) {
  return privgp::SampleReward(Camelback(x), rewards_rng_);
}

std::vector<Point> CamelbackEnvironment::CertificationGrid() const {
  Point lo(2), hi(2);
  lo << -2.0, -1.0;
  hi << 2.0, 1.0;
  return BoxGrid(lo, hi, 21);
}

}  // namespace privgp
