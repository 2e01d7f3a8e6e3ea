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

#include "privgp/kernels.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace privgp {

SEKernel::SEKernel(std::vector<double> lengthscales)
    : lengthscales_(std::move(lengthscales)) {
  if (lengthscales_.empty()) {
    throw std::invalid_argument("SEKernel: at least one lengthscale required");
  }
  for (double nu : lengthscales_) {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw std::invalid_argument("SEKernel: lengthscales must be positive, got " +
                                  std::to_string(nu));
    }
  }
}

SEKernel SEKernel::Isotropic(int dim, double lengthscale) {
  if (dim < 1) throw std::invalid_argument("SEKernel: dim must be >= 1");
  return SEKernel(std::vector<double>(dim, lengthscale));
}

double SEKernel::min_lengthscale() const {
  return *std::min_element(lengthscales_.begin(), lengthscales_.end());
}

double SEKernel::operator()(const Point& x, const Point& y) const {
  if (x.size() != dim() || y.size() != dim()) {
    throw std::invalid_argument("SEKernel: expected points of dimension " +
                                std::to_string(dim()));
  }
  double sq = 0.0;
  for (int i = 0; i < dim(); ++i) {
    const double z = (x[i] - y[i]) / lengthscales_[i];
    sq += z * z;
  }
  return std::exp(-0.5 * sq);
}

double Eval(const SEKernel& kernel, const Point& x, const Point& y) {
  return kernel(x, y);
}

Eigen::MatrixXd Gram(const SEKernel& kernel, std::span<const Point> points) {
  const auto t = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    gram(i, i) = kernel(points[i], points[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      gram(i, j) = gram(j, i) = kernel(points[i], points[j]);
    }
  }
  return gram;
}

}  // namespace privgp
