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

#include "privgp/privacy.h"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "privgp/errors.h"

namespace privgp {
namespace {

void CheckPrivacyParams(double alpha, double beta_priv) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("privacy budget alpha must be positive");
  }
  if (!(beta_priv > 0.0 && beta_priv < 1.0)) {
    throw std::invalid_argument("privacy failure probability must be in (0, 1)");
  }
}

void CheckSpectralArgs(double sigma, int dim, int horizon, double zeta) {
  if (!(sigma >= 0.0) || dim < 1 || horizon < 1 || !(zeta > 0.0)) {
    throw std::invalid_argument("spectral bounds: invalid arguments");
  }
}

int CeilLog2(int64_t x) {
  return x <= 1 ? 0 : 64 - std::countl_zero(static_cast<uint64_t>(x - 1));
}

}  // namespace

int TreeDepth(int horizon) {
  if (horizon < 1) throw std::invalid_argument("TreeDepth: horizon must be >= 1");
  return 1 + CeilLog2(horizon);
}

double JdpSensitivitySquared(double beta_priv, int horizon, double B,
                             double rho) {
  return 1.0 + B * B + 2.0 * rho * rho * std::log(8.0 * horizon / beta_priv);
}

double JdpNoiseScale(double alpha, double beta_priv, int horizon, double B,
                     double rho) {
  CheckPrivacyParams(alpha, beta_priv);
  const int n = TreeDepth(horizon);
  const double log_term = std::log(10.0 / beta_priv);
  const double variance = 16.0 * n *
                          JdpSensitivitySquared(beta_priv, horizon, B, rho) *
                          log_term * log_term / (alpha * alpha);
  return std::sqrt(variance);
}

SpectralBounds JdpSpectral(double sigma, int depth, int dim, int horizon,
                           double zeta) {
  CheckSpectralArgs(sigma, dim, horizon, zeta);
  if (depth < 1) throw std::invalid_argument("JdpSpectral: depth must be >= 1");
  SpectralBounds b;
  if (sigma == 0.0) return b;
  const double log_term = std::log(2.0 * horizon / zeta);
  b.scale = sigma * std::sqrt(2.0 * depth) *
            (4.0 * std::sqrt(static_cast<double>(dim)) + 2.0 * log_term);
  b.lambda_min = b.scale;
  b.lambda_max = 3.0 * b.scale;
  b.kappa = sigma * std::sqrt(depth / b.scale) *
            (std::sqrt(static_cast<double>(dim)) + std::sqrt(2.0 * log_term));
  b.shift = 2.0 * b.scale;
  return b;
}

LdpNoise LdpNoiseScales(double alpha, double beta_priv, double B, int dim) {
  CheckPrivacyParams(alpha, beta_priv);
  if (dim < 1) throw std::invalid_argument("LdpNoiseScales: dim must be >= 1");
  const double c = 8.0 / (alpha * alpha);
  LdpNoise noise;
  noise.sigma_x = std::sqrt(c * std::log(5.0 / (2.0 * beta_priv)));
  noise.sigma_u = std::sqrt(c * (B * B + 2.0 * std::log(8.0 * dim / beta_priv)) *
                            std::log(5.0 / beta_priv));
  return noise;
}

SpectralBounds LdpSpectral(double sigma_x, double sigma_u, int dim,
                           int horizon, double zeta) {
  CheckSpectralArgs(sigma_x, dim, horizon, zeta);
  if (!(sigma_u >= 0.0)) throw std::invalid_argument("LdpSpectral: sigma_u < 0");
  SpectralBounds b;
  if (sigma_x == 0.0) return b;
  b.scale = std::sqrt(static_cast<double>(horizon)) *
            (4.0 * std::sqrt(static_cast<double>(dim)) +
             2.0 * std::log(2.0 * horizon / zeta));
  b.lambda_min = sigma_x * b.scale;
  b.lambda_max = 3.0 * sigma_x * b.scale;
  b.kappa = sigma_u * std::sqrt(static_cast<double>(dim) * horizon / b.scale);
  b.shift = 2.0 * sigma_x * b.scale;
  return b;
}

Eigen::MatrixXd PsdShift(Eigen::MatrixXd raw, double shift) {
  raw.diagonal().array() += shift;
  return raw;
}

Eigen::MatrixXd SampleNodeNoise(int dim, double sigma, uint64_t seed,
                                int level, int64_t index) {
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(dim, dim);
  if (sigma == 0.0) return noise;
  Rng rng(DeriveSeed(seed, static_cast<uint64_t>(level),
                     static_cast<uint64_t>(index)));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double diag_scale = std::sqrt(2.0) * sigma;
  for (int j = 0; j < dim; ++j) {
    noise(j, j) = diag_scale * normal(rng);
    for (int i = j + 1; i < dim; ++i) noise(i, j) = sigma * normal(rng);
  }
  noise.triangularView<Eigen::StrictlyUpper>() = noise.transpose();
  return noise;
}

std::vector<NodeId> DyadicCover(int64_t count) {
  std::vector<NodeId> cover;
  for (int level = 62; level >= 0; --level) {
    if ((count >> level) & 1) {
      cover.push_back({level, (count >> level) - 1});
    }
  }
  return cover;
}

NoisyTree::NoisyTree(int horizon, int block_dim, double sigma, uint64_t seed)
    : horizon_(horizon),
      block_dim_(block_dim),
      depth_(TreeDepth(horizon)),
      sigma_(sigma),
      seed_(seed) {
  if (block_dim < 1) throw std::invalid_argument("NoisyTree: block_dim must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("NoisyTree: sigma must be >= 0");
}

NoisyTree::Node& NoisyTree::Touch(const NodeId& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    Node node{Eigen::MatrixXd::Zero(block_dim_, block_dim_),
              SampleNodeNoise(block_dim_, sigma_, seed_, id.level, id.index)};
    it = nodes_.emplace(id, std::move(node)).first;
  }
  return it->second;
}

void NoisyTree::CheckInsert(int t) const {
  if (t != inserted_ + 1) {
    throw StateError("NoisyTree: expected leaf " + std::to_string(inserted_ + 1) +
                     ", got " + std::to_string(t));
  }
  if (t > horizon_) {
    throw StateError("NoisyTree: leaf " + std::to_string(t) +
                     " beyond horizon " + std::to_string(horizon_));
  }
}

void NoisyTree::Insert(int t, const Eigen::VectorXd& v) {
  if (v.size() != block_dim_) {
    throw std::invalid_argument("NoisyTree::Insert: datum has wrong dimension");
  }
  CheckInsert(t);
  last_insert_touches_ = 0;
  for (int level = 0; level < depth_; ++level) {
    Touch({level, static_cast<int64_t>(t - 1) >> level}).data.noalias() +=
        v * v.transpose();
    ++last_insert_touches_;
  }
  inserted_ = t;
  Release(t);
}

void NoisyTree::InsertBlock(int t, const Eigen::MatrixXd& datum) {
  if (datum.rows() != block_dim_ || datum.cols() != block_dim_) {
    throw std::invalid_argument("NoisyTree::InsertBlock: datum has wrong shape");
  }
  CheckInsert(t);
  last_insert_touches_ = 0;
  for (int level = 0; level < depth_; ++level) {
    Touch({level, static_cast<int64_t>(t - 1) >> level}).data += datum;
    ++last_insert_touches_;
  }
  inserted_ = t;
  Release(t);
}

void NoisyTree::Release(int t) {
  // Node (l, j) serves prefix queries over [1, s] only for
  // s < (j + 2) 2^l; future queries have s >= t.
  for (auto it = nodes_.begin(); it != nodes_.end();) {
    const int64_t end = (it->first.index + 2) << it->first.level;
    it = end <= t ? nodes_.erase(it) : std::next(it);
  }
}

Eigen::MatrixXd NoisyTree::PrefixBlock(int t) {
  if (t < 1 || t > horizon_) {
    throw StateError("NoisyTree::Prefix: round " + std::to_string(t) +
                     " outside [1, " + std::to_string(horizon_) + "]");
  }
  if (inserted_ != t - 1) {
    throw StateError("NoisyTree::Prefix: round " + std::to_string(t) +
                     " requires " + std::to_string(t - 1) +
                     " inserted leaves, have " + std::to_string(inserted_));
  }
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(block_dim_, block_dim_);
  last_prefix_reads_ = 0;
  for (const NodeId& id : DyadicCover(t - 1)) {
    const Node& node = Touch(id);
    sum += node.data;
    sum += node.noise;
    ++last_prefix_reads_;
  }
  return sum;
}

PrefixStatistics NoisyTree::Prefix(int t) {
  const Eigen::MatrixXd block = PrefixBlock(t);
  const int m = block_dim_ - 1;
  return {block.topLeftCorner(m, m), block.col(m).head(m)};
}

LdpIncrement LdpPerturb(const Eigen::VectorXd& phi, double y, double sigma_x,
                        double sigma_u, Rng& rng) {
  if (!phi.allFinite() || !std::isfinite(y)) {
    throw std::invalid_argument("LdpPerturb: non-finite input");
  }
  if (phi.norm() > 1.0 + 1e-9) {
    throw std::invalid_argument("LdpPerturb: feature norm exceeds 1");
  }
  if (!(sigma_x >= 0.0) || !(sigma_u >= 0.0)) {
    throw std::invalid_argument("LdpPerturb: noise scales must be >= 0");
  }
  const auto m = phi.size();
  LdpIncrement inc{phi * phi.transpose(), y * phi};
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  if (sigma_x > 0.0) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = j; i < m; ++i) {
        const double z = sigma_x * normal(rng);
        inc.sigma(i, j) += z;
        if (i != j) inc.sigma(j, i) += z;
      }
    }
  }
  if (sigma_u > 0.0) {
    for (Eigen::Index i = 0; i < m; ++i) inc.u[i] += sigma_u * normal(rng);
  }
  return inc;
}

}  // namespace privgp
