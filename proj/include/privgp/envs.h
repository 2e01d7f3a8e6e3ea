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

#ifndef PRIVGP_ENVS_H_
#define PRIVGP_ENVS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "privgp/kernels.h"
#include "privgp/rng.h"

namespace privgp {

// Candidate actions of one round with their (noise-free) mean rewards.
struct DecisionSet {
  std::vector<Point> points;
  std::vector<double> values;
  int best_index = 0;

  int size() const { return static_cast<int>(points.size()); }
  double best_value() const { return values[best_index]; }
};

// Source of decision sets and Bernoulli rewards for a single run.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int dim() const = 0;
  virtual DecisionSet NextDecisionSet() = 0;
  // Mean reward f(x) in [0, 1].
  virtual double Mean(const Point& x) const = 0;
  // Draws y ~ Ber(f(x)).
  virtual int SampleReward(const Point& x) = 0;
  // Points on which the feature approximation is certified.
  virtual std::vector<Point> CertificationGrid() const = 0;
};

// f(x) = sum_i alpha_i k(x_i, x).
struct SyntheticFunction {
  std::vector<Point> anchors;
  std::vector<double> weights;
  SEKernel kernel;

  double operator()(const Point& x) const;
};

inline constexpr double kBallRadius = 2.0;
inline constexpr double kNearOptimalLevel = 0.8;
inline constexpr double kSuboptimalLevel = 0.6;

// Uniform point in the closed ball of the given radius.
Point SampleUniformBall(int dim, double radius, Rng& rng);

// Uniform point in the unit L1 ball of R^k.
Eigen::VectorXd SampleUnitL1Ball(int k, Rng& rng);

// Grid of roughly `target_points` points covering the radius-2 ball.
std::vector<Point> ProbeGrid(int dim, int target_points = 10000);

// Draws anchors uniformly in the radius-2 ball and weights uniformly in the
// unit L1 ball, redrawing both until f stays in [0, 1] on the probe grid and
// reaches at least 0.8 there. Throws EnvironmentError after `max_attempts`.
SyntheticFunction SampleFunction(int dim, const SEKernel& kernel, Rng& rng,
                                 int num_anchors = 4,
                                 int max_attempts = 10000);

// One point with f >= 0.8 and n - 1 points with f <= 0.6 (all with
// f in [0, 1]), drawn by rejection from the radius-2 ball and shuffled.
// Throws std::invalid_argument for n < 2 and EnvironmentError after
// `max_attempts` rejected draws.
DecisionSet SampleDecisionSet(const SyntheticFunction& f, int n, Rng& rng,
                              int max_attempts = 100000);

// Bernoulli draw with success probability `mean`, which must lie in [0, 1].
int SampleReward(double mean, Rng& rng);

// Six-hump Camelback (4 - 2.1 x1^2 + x1^4/3) x1^2 + x1 x2 + (-4 + 4 x2^2) x2^2.
double CamelbackRaw(const Point& x);

// Negated Camelback rescaled to [0, 1] over [-2, 2] x [-1, 1]; 1 at the two
// global minimizers. Throws std::invalid_argument outside the domain.
double Camelback(const Point& x);

class SyntheticEnvironment : public Environment {
 public:
  // Samples the function from `seed`.
  SyntheticEnvironment(int dim, double lengthscale, int num_candidates,
                       uint64_t seed);
  // Uses a fixed function; decision sets and rewards still come from `seed`.
  SyntheticEnvironment(SyntheticFunction f, int num_candidates, uint64_t seed);

  const SyntheticFunction& function() const { return f_; }

  int dim() const override { return f_.kernel.dim(); }
  DecisionSet NextDecisionSet() override;
  double Mean(const Point& x) const override { return f_(x); }
  int SampleReward(const Point& x) override;
  std::vector<Point> CertificationGrid() const override;

 private:
  SyntheticFunction f_;
  int num_candidates_;
  Rng sets_rng_;
  Rng rewards_rng_;
};

// Uniform candidate sets on the Camelback domain.
class CamelbackEnvironment : public Environment {
 public:
  CamelbackEnvironment(int num_candidates, uint64_t seed);

  int dim() const override { return 2; }
  DecisionSet NextDecisionSet() override;
  double Mean(const Point& x) const override { return Camelback(x); }
  int SampleReward(const Point& x) override;
  std::vector<Point> CertificationGrid() const override;

 private:
  int num_candidates_;
  Rng sets_rng_;
  Rng rewards_rng_;
};

}  // namespace privgp

#endif  // PRIVGP_ENVS_H_
