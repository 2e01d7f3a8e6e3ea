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

#ifndef PRIVGP_FEATURES_H_
#define PRIVGP_FEATURES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "privgp/kernels.h"

namespace privgp {

// Gauss-Hermite rule for the weight function exp(-x^2).
struct HermiteRule {
  std::vector<double> nodes;    // ascending, symmetric about 0
  std::vector<double> weights;  // positive, summing to sqrt(pi)
};

// Nodes are the roots of the physicists' Hermite polynomial H_n, computed by
// Golub-Welsch on the symmetric tridiagonal Jacobi matrix. Weights use
//
//   w_i = 2^{n-1} n! sqrt(pi) / (n^2 H_{n-1}(x_i)^2),
//
// evaluated through the orthonormal recurrence to avoid overflow.
// Requires 1 <= n <= 64.
HermiteRule HermiteNodesWeights(int n);

// Physicists' Hermite polynomial H_n(x) by the three-term recurrence.
double HermitePolynomial(int n, double x);

enum class FeatureKind { kQff, kRff };

// Finite-dimensional feature map Phi with Phi(x)^T Phi(y) ~ k(x, y).
//
// The embedding interleaves one (cos, sin) pair per frequency:
//   Phi(x)_{2i}   = sqrt(w_i) cos(omega_i^T x)
//   Phi(x)_{2i+1} = sqrt(w_i) sin(omega_i^T x)
// so Phi(x)^T Phi(y) = sum_i w_i cos(omega_i^T (x - y)) and, since the
// weights sum to one, ||Phi(x)|| = 1.
class FeatureMap {
 public:
  // Quadrature Fourier features: m_bar Gauss-Hermite nodes per dimension,
  // m = m_bar^d frequencies. Refuses m_bar^d > 10^6.
  static FeatureMap Qff(std::vector<double> lengthscales, int m_bar);

  // Random Fourier features: `num_frequencies` draws from the Gaussian
  // spectral density (per-dimension std 1/nu_j), weights 1/m.
  static FeatureMap Rff(std::vector<double> lengthscales, int num_frequencies,
                        uint64_t seed);

  FeatureKind kind() const { return kind_; }
  int input_dim() const { return static_cast<int>(frequencies_.cols()); }
  int num_frequencies() const { return static_cast<int>(frequencies_.rows()); }
  int embedding_dim() const { return 2 * num_frequencies(); }
  // Nodes per dimension for QFF, 0 for RFF.
  int m_bar() const { return m_bar_; }
  const std::vector<double>& lengthscales() const { return lengthscales_; }

  // Rows are frequency vectors omega_i.
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  Eigen::VectorXd Embed(const Point& x) const;
  void EmbedInto(const Point& x, Eigen::Ref<Eigen::VectorXd> out) const;

  // Analytic uniform error bound on [0,1]^d (QFF only).
  std::optional<double> ErrorBound() const;

 private:
  FeatureMap(FeatureKind kind, int m_bar, std::vector<double> lengthscales,
             Eigen::MatrixXd frequencies, Eigen::VectorXd weights);

  FeatureKind kind_;
  int m_bar_;
  std::vector<double> lengthscales_;
  Eigen::MatrixXd frequencies_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd sqrt_weights_;
};

// d 2^{d-1} sqrt(pi/2) m_bar^{-m_bar} (e / (4 nu^2))^{m_bar}, the uniform QFF
// error bound on the unit cube for the smallest lengthscale nu.
double QffErrorBound(int d, int m_bar, double min_lengthscale);

struct ApproxCertificate {
  double measured = 0.0;         // max over grid pairs of |k - Phi^T Phi|
  std::optional<double> bound;   // analytic bound, QFF only
  int grid_size = 0;
};

// Throws std::invalid_argument on an empty grid.
ApproxCertificate CertifyUniformError(const FeatureMap& map,
                                      const SEKernel& kernel,
                                      std::span<const Point> grid);

// Regular grid with `per_dim` points per axis on the box [lo, hi].
std::vector<Point> BoxGrid(const Point& lo, const Point& hi, int per_dim);

// Points of the regular grid on [-r, r]^d that lie in the closed ball of
// radius r.
std::vector<Point> BallGrid(int dim, double radius, int per_dim);

}  // namespace privgp

#endif  // PRIVGP_FEATURES_H_
