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

#include "privgp/features.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "privgp/rng.h"

namespace privgp {
namespace {

constexpr double kMaxFrequencies = 1e6;

// Orthonormal Hermite function values h_n(x) = H_n(x) / sqrt(2^n n! sqrt(pi)).
double OrthonormalHermite(int n, double x) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur -
                        std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void CheckLengthscales(const std::vector<double>& lengthscales) {
  // Reuse the kernel's validation.
  (void)SEKernel(lengthscales);
}

}  // namespace

double HermitePolynomial(int n, double x) {
  if (n < 0) throw std::invalid_argument("HermitePolynomial: n must be >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

HermiteRule HermiteNodesWeights(int n) {
  if (n < 1 || n > 64) {
    throw std::invalid_argument(
        "HermiteNodesWeights: node count must be in [1, 64], got " +
        std::to_string(n));
  }
  HermiteRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {std::sqrt(std::numbers::pi)};
    return rule;
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      jacobi, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& eig = solver.eigenvalues();

  rule.nodes.resize(n);
  for (int i = 0; i < n; ++i) {
    // Enforce exact antisymmetry of the node set.
    rule.nodes[i] = 0.5 * (eig[i] - eig[n - 1 - i]);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;

  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // 2^{n-1} n! sqrt(pi) / (n^2 H_{n-1}^2) == 1 / (n h_{n-1}^2).
    const double h = OrthonormalHermite(n - 1, rule.nodes[i]);
    rule.weights[i] = 1.0 / (n * h * h);
  }
  for (int i = 0; i < n / 2; ++i) {
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  return rule;
}

FeatureMap::FeatureMap(FeatureKind kind, int m_bar,
                       std::vector<double> lengthscales,
                       Eigen::MatrixXd frequencies, Eigen::VectorXd weights)
    : kind_(kind),
      m_bar_(m_bar),
      lengthscales_(std::move(lengthscales)),
      frequencies_(std::move(frequencies)),
      weights_(std::move(weights)),
      sqrt_weights_(weights_.cwiseSqrt()) {}

FeatureMap FeatureMap::Qff(std::vector<double> lengthscales, int m_bar) {
  CheckLengthscales(lengthscales);
  const int d = static_cast<int>(lengthscales.size());
  if (m_bar < 1) {
    throw std::invalid_argument("FeatureMap::Qff: m_bar must be >= 1");
  }
  const double count = std::pow(static_cast<double>(m_bar), d);
  if (count > kMaxFrequencies) {
    throw std::invalid_argument(
        "FeatureMap::Qff: m_bar^d = " + std::to_string(m_bar) + "^" +
        std::to_string(d) + " = " + std::to_string(count) +
        " frequencies exceeds the limit of 1e6");
  }
  const HermiteRule rule = HermiteNodesWeights(m_bar);
  const int m = static_cast<int>(count);
  const double norm = std::pow(std::numbers::pi, -0.5 * d);

  Eigen::MatrixXd freqs(m, d);
  Eigen::VectorXd weights(m);
  std::vector<int> digits(d, 0);
  for (int i = 0; i < m; ++i) {
    double w = norm;
    for (int j = 0; j < d; ++j) {
      freqs(i, j) = std::numbers::sqrt2 * rule.nodes[digits[j]] / lengthscales[j];
      w *= rule.weights[digits[j]];
    }
    weights[i] = w;
    for (int j = d - 1; j >= 0; --j) {
      if (++digits[j] < m_bar) break;
      digits[j] = 0;
    }
  }
  return FeatureMap(FeatureKind::kQff, m_bar, std::move(lengthscales),
                    std::move(freqs), std::move(weights));
}

FeatureMap FeatureMap::Rff(std::vector<double> lengthscales,
                           int num_frequencies, uint64_t seed) {
  CheckLengthscales(lengthscales);
  if (num_frequencies < 1) {
    throw std::invalid_argument("FeatureMap::Rff: need at least 1 frequency");
  }
  const int d = static_cast<int>(lengthscales.size());
  Rng rng = MakeRng(seed, Stream::kRandomFeatures);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd freqs(num_frequencies, d);
  for (int i = 0; i < num_frequencies; ++i) {
    for (int j = 0; j < d; ++j) freqs(i, j) = normal(rng) / lengthscales[j];
  }
  Eigen::VectorXd weights =
      Eigen::VectorXd::Constant(num_frequencies, 1.0 / num_frequencies);
  return FeatureMap(FeatureKind::kRff, 0, std::move(lengthscales),
                    std::move(freqs), std::move(weights));
}

Eigen::VectorXd FeatureMap::Embed(const Point& x) const {
  Eigen::VectorXd out(embedding_dim());
  EmbedInto(x, out);
  return out;
}

void FeatureMap::EmbedInto(const Point& x,
                           Eigen::Ref<Eigen::VectorXd> out) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("FeatureMap::Embed: expected dimension " +
                                std::to_string(input_dim()) + ", got " +
                                std::to_string(x.size()));
  }
  if (out.size() != embedding_dim()) {
    throw std::invalid_argument("FeatureMap::Embed: output has wrong size");
  }
  const Eigen::VectorXd phase = frequencies_ * x;
  for (int i = 0; i < num_frequencies(); ++i) {
    out[2 * i] = sqrt_weights_[i] * std::cos(phase[i]);
    out[2 * i + 1] = sqrt_weights_[i] * std::sin(phase[i]);
  }
}

std::optional<double> FeatureMap::ErrorBound() const {
  if (kind_ != FeatureKind::kQff) return std::nullopt;
  const double nu =
      *std::min_element(lengthscales_.begin(), lengthscales_.end());
  return QffErrorBound(input_dim(), m_bar_, nu);
}

double QffErrorBound(int d, int m_bar, double min_lengthscale) {
  const double mb = m_bar;
  // Assemble in logs: m_bar^{m_bar} overflows quickly.
  const double log_bound =
      std::log(d) + (d - 1) * std::numbers::ln2 +
      0.5 * std::log(std::numbers::pi / 2.0) - mb * std::log(mb) +
      mb * (1.0 - std::log(4.0 * min_lengthscale * min_lengthscale));
  return std::exp(log_bound);
}

ApproxCertificate CertifyUniformError(const FeatureMap& map,
                                      const SEKernel& kernel,
                                      std::span<const Point> grid) {
  if (grid.empty()) {
    throw std::invalid_argument("CertifyUniformError: grid is empty");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd embedded(map.embedding_dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) map.EmbedInto(grid[i], embedded.col(i));
  const Eigen::MatrixXd approx = embedded.transpose() * embedded;

  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      worst = std::max(worst, std::abs(kernel(grid[i], grid[j]) - approx(i, j)));
    }
  }
  return ApproxCertificate{worst, map.ErrorBound(), static_cast<int>(n)};
}

std::vector<Point> BoxGrid(const Point& lo, const Point& hi, int per_dim) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw std::invalid_argument("BoxGrid: bounds must share a positive dimension");
  }
  if (per_dim < 1) throw std::invalid_argument("BoxGrid: per_dim must be >= 1");
  const auto d = lo.size();
  std::vector<int> digits(d, 0);
  std::vector<Point> grid;
  while (true) {
    Point p(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      p[j] = per_dim == 1 ? 0.5 * (lo[j] + hi[j])
                          : lo[j] + (hi[j] - lo[j]) * digits[j] / (per_dim - 1);
    }
    grid.push_back(std::move(p));
    Eigen::Index j = d - 1;
    for (; j >= 0; --j) {
      if (++digits[j] < per_dim) break;
      digits[j] = 0;
    }
    if (j < 0) break;
  }
  return grid;
}

std::vector<Point> BallGrid(int dim, double radius, int per_dim) {
  const Point lo = Point::Constant(dim, -radius);
  const Point hi = Point::Constant(dim, radius);
  std::vector<Point> grid;
  for (Point& p : BoxGrid(lo, hi, per_dim)) {
    if (p.squaredNorm() <= radius * radius * (1.0 + 1e-12)) {
      grid.push_back(std::move(p));
    }
  }
  return grid;
}

}  // namespace privgp
