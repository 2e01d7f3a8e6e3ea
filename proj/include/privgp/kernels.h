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

#ifndef PRIVGP_KERNELS_H_
#define PRIVGP_KERNELS_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace privgp {

using Point = Eigen::VectorXd;

// Squared-exponential kernel with unit output variance and per-dimension
// lengthscales:
//
//   k(x, y) = exp(-sum_i (x_i - y_i)^2 / (2 nu_i^2)).
class SEKernel {
 public:
  // Throws std::invalid_argument if the list is empty or any lengthscale is
  // not a positive finite number.
  explicit SEKernel(std::vector<double> lengthscales);

  static SEKernel Isotropic(int dim, double lengthscale);

  int dim() const { return static_cast<int>(lengthscales_.size()); }
  const std::vector<double>& lengthscales() const { return lengthscales_; }
  double min_lengthscale() const;

  // Throws std::invalid_argument on dimension mismatch.
  double operator()(const Point& x, const Point& y) const;

 private:
  std::vector<double> lengthscales_;
};

double Eval(const SEKernel& kernel, const Point& x, const Point& y);

// t x t Gram matrix K_ij = k(x_i, x_j). An empty list yields a 0 x 0 matrix.
Eigen::MatrixXd Gram(const SEKernel& kernel, std::span<const Point> points);

}  // namespace privgp

#endif  // PRIVGP_KERNELS_H_
