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

#include "privgp/reference.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace privgp::reference {
namespace {

Eigen::MatrixXd DenseGram(std::span<const Point> points, const KernelFn& kernel) {
  const auto t = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    for (Eigen::Index j = 0; j < t; ++j) gram(i, j) = kernel(points[i], points[j]);
  }
  return gram;
}

KernelFn Wrap(const SEKernel& kernel) {
  return [&kernel](const Point& a, const Point& b) { return kernel(a, b); };
}

}  // namespace

ExactPosterior ExactPosteriorAt(const History& history, const KernelFn& kernel,
                                double lambda, double rho, const Point& x) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ExactPosteriorAt: lambda must be positive");
  }
  if (history.size() > kMaxOracleHistory) {
    throw std::invalid_argument("ExactPosteriorAt: history exceeds oracle scale");
  }
  const int t = history.size();
  const double prior = kernel(x, x);
  if (t == 0) return {0.0, rho * rho * prior};

  Eigen::MatrixXd regularized = DenseGram(history.points, kernel);
  regularized.diagonal().array() += lambda;
  Eigen::VectorXd k_x(t);
  Eigen::VectorXd y(t);
  for (int i = 0; i < t; ++i) {
    k_x[i] = kernel(history.points[i], x);
    y[i] = history.rewards[i];
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(regularized);
  const double mean = k_x.dot(ldlt.solve(y));
  const double reduction = k_x.dot(ldlt.solve(k_x));
  const double variance = rho * rho * (prior - reduction);
  return {mean, std::max(0.0, variance)};
}

ExactPosterior ExactPosteriorAt(const History& history, const SEKernel& kernel,
                                double lambda, double rho, const Point& x) {
  return ExactPosteriorAt(history, Wrap(kernel), lambda, rho, x);
}

double InfoGain(std::span<const Point> actions, const KernelFn& kernel,
                double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("InfoGain: lambda must be positive");
  if (actions.empty()) return 0.0;
  Eigen::MatrixXd m = DenseGram(actions, kernel) / lambda;
  m.diagonal().array() += 1.0;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  return 0.5 * ldlt.vectorD().array().log().sum();
}

double InfoGain(std::span<const Point> actions, const SEKernel& kernel,
                double lambda) {
  return InfoGain(actions, Wrap(kernel), lambda);
}

}  // namespace privgp::reference
