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

#ifndef PRIVGP_POSTERIOR_H_
#define PRIVGP_POSTERIOR_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace privgp {

// Running sufficient statistics of feature-space ridge regression:
//   sigma = sum_tau phi_tau phi_tau^T,  u = sum_tau y_tau phi_tau.
class PosteriorState {
 public:
  explicit PosteriorState(int dim);

  // Throws std::invalid_argument on non-finite input or ||phi|| > 1 + 1e-9.
  void Update(const Eigen::VectorXd& phi, double y);

  int dim() const { return static_cast<int>(u_.size()); }
  int rounds() const { return rounds_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& u() const { return u_; }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd u_;
  int rounds_ = 0;
};

struct Prediction {
  double mean = 0.0;
  double stddev = 0.0;
};

// Privatized statistics (sigma~, u~) with V = sigma~ + ridge I factored once.
// Construction throws NumericError when V is not positive definite.
class NoisyView {
 public:
  NoisyView(Eigen::MatrixXd sigma_tilde, Eigen::VectorXd u_tilde, double ridge);

  int dim() const { return static_cast<int>(u_tilde_.size()); }
  double ridge() const { return ridge_; }
  const Eigen::MatrixXd& sigma_tilde() const { return sigma_tilde_; }
  const Eigen::VectorXd& u_tilde() const { return u_tilde_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double log_det_v() const { return log_det_v_; }

  // phi^T V^{-1} phi.
  double InverseQuadratic(const Eigen::VectorXd& phi) const;
  // Column-wise phi^T V^{-1} phi.
  Eigen::VectorXd InverseQuadraticBatch(const Eigen::MatrixXd& phis) const;

  // mean = theta^T phi, stddev = rho sqrt(phi^T V^{-1} phi).
  Prediction Predict(const Eigen::VectorXd& phi, double rho) const;

 private:
  Eigen::MatrixXd sigma_tilde_;
  Eigen::VectorXd u_tilde_;
  double ridge_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd theta_;
  double log_det_v_ = 0.0;
};

// Inputs to the confidence width. With `private_noise == false` the
// statistics are exact: lambda_min/lambda_max/kappa are ignored, the
// approximation term uses sqrt(ridge) and the log-det is normalized by
// ridge^m alone.
struct ConfidenceParams {
  double B = 1.0;
  double rho = 0.5;
  double ridge = 1.0;
  double zeta = 0.1;
  double epsilon = 0.0;
  bool private_noise = false;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
};

// Multiplier of sigma~_t(x) in the confidence band at round t:
//
//   B sqrt(lambda_max / rho^2 + 1) + t B eps / (rho sqrt(lambda_min))
//     + kappa / rho
//     + sqrt(log det(V) - m log(ridge + lambda_min) + 2 ln(2 / zeta)).
//
// Throws std::invalid_argument for inconsistent parameters (e.g. a private
// configuration with lambda_min = 0 and eps > 0).
double BetaHalf(const ConfidenceParams& params, const NoisyView& view, int t);

struct EmbeddedCandidate {
  int id = 0;
  Eigen::VectorXd phi;
};

// UCB score theta^T phi + beta_half * rho * sqrt(phi^T V^{-1} phi).
double UcbScore(const NoisyView& view, double beta_half,
                const Eigen::VectorXd& phi, double rho);

// Returns the id of the highest-scoring candidate; ties go to the lowest id.
// Throws std::invalid_argument on an empty candidate list.
int SelectAction(const NoisyView& view, double beta_half,
                 std::span<const EmbeddedCandidate> candidates, double rho);

}  // namespace privgp

#endif  // PRIVGP_POSTERIOR_H_
