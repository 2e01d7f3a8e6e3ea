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

#ifndef PRIVGP_PRIVACY_H_
#define PRIVGP_PRIVACY_H_

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "privgp/rng.h"

namespace privgp {

// Depth of the aggregation tree over `horizon` leaves: 1 + ceil(log2 T).
int TreeDepth(int horizon);

// Squared per-datum sensitivity used by the joint-DP calibration:
// 1 + B^2 + 2 rho^2 ln(8T / beta).
double JdpSensitivitySquared(double beta_priv, int horizon, double B,
                             double rho);

// Noise scale of each tree node,
//   sigma^2 = 16 n (1 + B^2 + 2 rho^2 ln(8T/beta)) ln(10/beta)^2 / alpha^2
// with n = TreeDepth(T). Throws std::invalid_argument unless alpha > 0 and
// beta_priv in (0, 1).
double JdpNoiseScale(double alpha, double beta_priv, int horizon, double B,
                     double rho);

// High-probability spectral bounds on the privacy noise together with the
// identity shift applied to make the noise PSD.
struct SpectralBounds {
  double scale = 0.0;  // Lambda
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
  double shift = 0.0;  // added to the diagonal of the released Gram block

  bool degenerate() const { return lambda_min == 0.0; }
};

// Lambda = sigma sqrt(2n) (4 sqrt(m) + 2 ln(2T/zeta)), lambda_min = Lambda,
// lambda_max = 3 Lambda, kappa = sigma sqrt(n / Lambda) (sqrt(m) +
// sqrt(2 ln(2T/zeta))), shift = 2 Lambda. `dim` is the side of the released
// Gram block. sigma = 0 yields all-zero bounds.
SpectralBounds JdpSpectral(double sigma, int depth, int dim, int horizon,
                           double zeta);

struct LdpNoise {
  double sigma_x = 0.0;  // per-entry std of the Gram perturbation
  double sigma_u = 0.0;  // per-entry std of the reward-vector perturbation
};

// sigma_x^2 = (8/alpha^2) ln(5/(2 beta)),
// sigma_u^2 = (8/alpha^2) (B^2 + 2 ln(8m/beta)) ln(5/beta).
LdpNoise LdpNoiseScales(double alpha, double beta_priv, double B, int dim);

// Lambda = sqrt(T) (4 sqrt(m) + 2 ln(2T/zeta)), lambda_min = sigma_x Lambda,
// lambda_max = 3 sigma_x Lambda, kappa = sigma_u sqrt(m T / Lambda),
// shift = 2 sigma_x Lambda.
SpectralBounds LdpSpectral(double sigma_x, double sigma_u, int dim,
                           int horizon, double zeta);

// raw + shift * I.
Eigen::MatrixXd PsdShift(Eigen::MatrixXd raw, double shift);

// Symmetric Gaussian block (1/sqrt 2)(Y + Y^T), Y_ij ~ N(0, sigma^2) i.i.d.:
// off-diagonal entries have variance sigma^2 and diagonal entries 2 sigma^2.
// Fully determined by (seed, level, index).
Eigen::MatrixXd SampleNodeNoise(int dim, double sigma, uint64_t seed,
                                int level, int64_t index);

// Tree node at `level` covering leaves index * 2^level + 1 ..
// (index + 1) * 2^level (1-based).
struct NodeId {
  int level = 0;
  int64_t index = 0;
  auto operator<=>(const NodeId&) const = default;
};

// Canonical dyadic nodes covering leaves [1, count], largest first.
std::vector<NodeId> DyadicCover(int64_t count);

// Released statistics: the top-left m x m block and the first m entries of
// the last column of a noisy (m+1) x (m+1) prefix sum.
struct PrefixStatistics {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd u;
};

// Tree-based aggregation of the (m+1) x (m+1) blocks v v^T, v = (phi, y).
// Each node holds the running sum of the leaves below it and a noise block
// sampled once, when the node is first touched. Nodes that no future prefix
// query can reach are released.
class NoisyTree {
 public:
  NoisyTree(int horizon, int block_dim, double sigma, uint64_t seed);

  int horizon() const { return horizon_; }
  int block_dim() const { return block_dim_; }
  int depth() const { return depth_; }
  int inserted() const { return inserted_; }
  double sigma() const { return sigma_; }

  // Adds v v^T at leaf t. Leaves must arrive in order 1, 2, ..., T; anything
  // else throws StateError.
  void Insert(int t, const Eigen::VectorXd& v);
  // Same with an explicit symmetric block.
  void InsertBlock(int t, const Eigen::MatrixXd& datum);

  // Noisy sum of leaves [1, t-1]. Requires exactly t-1 leaves inserted and
  // t <= T.
  Eigen::MatrixXd PrefixBlock(int t);
  PrefixStatistics Prefix(int t);

  // Instrumentation.
  int last_prefix_reads() const { return last_prefix_reads_; }
  int last_insert_touches() const { return last_insert_touches_; }
  int live_nodes() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Eigen::MatrixXd data;
    Eigen::MatrixXd noise;
  };

  Node& Touch(const NodeId& id);
  void CheckInsert(int t) const;
  void Release(int t);

  int horizon_;
  int block_dim_;
  int depth_;
  double sigma_;
  uint64_t seed_;
  int inserted_ = 0;
  std::map<NodeId, Node> nodes_;
  int last_prefix_reads_ = 0;
  int last_insert_touches_ = 0;
};

struct LdpIncrement {
  Eigen::MatrixXd sigma;  // phi phi^T + N, N symmetric
  Eigen::VectorXd u;      // y phi + n
};

// One client's perturbed contribution. N_ij ~ N(0, sigma_x^2) for i >= j,
// mirrored above the diagonal; n_i ~ N(0, sigma_u^2).
LdpIncrement LdpPerturb(const Eigen::VectorXd& phi, double y, double sigma_x,
                        double sigma_u, Rng& rng);

}  // namespace privgp

#endif  // PRIVGP_PRIVACY_H_
