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

#ifndef PRIVGP_REFERENCE_H_
#define PRIVGP_REFERENCE_H_

#include <functional>
#include <span>
#include <vector>

#include "privgp/kernels.h"

// Dense kernel-space oracles. Deliberately unoptimized O(t^3) code kept
// independent of the feature-space path.
namespace privgp::reference {

using KernelFn = std::function<double(const Point&, const Point&)>;

struct History {
  std::vector<Point> points;
  std::vector<double> rewards;

  void Add(Point x, double y) {
    points.push_back(std::move(x));
    rewards.push_back(y);
  }
  int size() const { return static_cast<int>(points.size()); }
};

struct ExactPosterior {
  double mean = 0.0;
  double variance = 0.0;
};

inline constexpr int kMaxOracleHistory = 500;

// mu = k_t(x)^T (K_t + lambda I)^{-1} y_t,
// var = rho^2 (k(x, x) - k_t(x)^T (K_t + lambda I)^{-1} k_t(x)), clamped at 0.
// Throws std::invalid_argument for lambda <= 0 or histories over 500 points.
ExactPosterior ExactPosteriorAt(const History& history, const KernelFn& kernel,
                                double lambda, double rho, const Point& x);
ExactPosterior ExactPosteriorAt(const History& history, const SEKernel& kernel,
                                double lambda, double rho, const Point& x);

// 1/2 log det(I + K / lambda) over the realized action set.
double InfoGain(std::span<const Point> actions, const KernelFn& kernel,
                double lambda);
double InfoGain(std::span<const Point> actions, const SEKernel& kernel,
                double lambda);

}  // namespace privgp::reference

#endif  // PRIVGP_REFERENCE_H_
