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

#include "privgp/posterior.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "privgp/errors.h"

namespace privgp {

PosteriorState::PosteriorState(int dim)
    : sigma_(Eigen::MatrixXd::Zero(dim, dim)), u_(Eigen::VectorXd::Zero(dim)) {
  if (dim < 1) throw std::invalid_argument("PosteriorState: dim must be >= 1");
}

void PosteriorState::Update(const Eigen::VectorXd& phi, double y) {
  if (phi.size() != dim()) {
    throw std::invalid_argument("PosteriorState::Update: feature has dimension " +
                                std::to_string(phi.size()) + ", expected " +
                                std::to_string(dim()));
  }
  if (!std::isfinite(y) || !phi.allFinite()) {
    throw std::invalid_argument("PosteriorState::Update: non-finite input");
  }
  if (phi.norm() > 1.0 + 1e-9) {
    throw std::invalid_argument("PosteriorState::Update: feature norm exceeds 1");
  }
  sigma_.noalias() += phi * phi.transpose();
  u_.noalias() += y * phi;
  ++rounds_;
}

NoisyView::NoisyView(Eigen::MatrixXd sigma_tilde, Eigen::VectorXd u_tilde,
                     double ridge)
    : sigma_tilde_(std::move(sigma_tilde)),
      u_tilde_(std::move(u_tilde)),
      ridge_(ridge) {
  if (sigma_tilde_.rows() != sigma_tilde_.cols() ||
      sigma_tilde_.rows() != u_tilde_.size()) {
    throw std::invalid_argument("NoisyView: inconsistent statistic shapes");
  }
  if (!(ridge_ >= 0.0)) throw std::invalid_argument("NoisyView: ridge must be >= 0");
  Eigen::MatrixXd v = sigma_tilde_;
  v.diagonal().array() += ridge_;
  llt_.compute(v);
  if (llt_.info() != Eigen::Success) {
    throw NumericError("NoisyView: V = sigma~ + ridge I is not positive definite");
  }
  theta_ = llt_.solve(u_tilde_);
  log_det_v_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  if (!theta_.allFinite() || !std::isfinite(log_det_v_)) {
    throw NumericError("NoisyView: non-finite solution");
  }
}

double NoisyView::InverseQuadratic(const Eigen::VectorXd& phi) const {
  return llt_.matrixL().solve(phi).squaredNorm();
}

Eigen::VectorXd NoisyView::InverseQuadraticBatch(const Eigen::MatrixXd& phis) const {
  return llt_.matrixL().solve(phis).colwise().squaredNorm().transpose();
}

Prediction NoisyView::Predict(const Eigen::VectorXd& phi, double rho) const {
  return {theta_.dot(phi), rho * std::sqrt(InverseQuadratic(phi))};
}

double BetaHalf(const ConfidenceParams& params, const NoisyView& view, int t) {
  const double B = params.B;
  const double rho = params.rho;
  if (!(rho > 0.0) || !(params.ridge >= 0.0) || !(B >= 0.0) ||
      !(params.epsilon >= 0.0) || !(params.zeta > 0.0 && params.zeta < 1.0)) {
    throw std::invalid_argument("BetaHalf: invalid confidence parameters");
  }
  const double m = view.dim();
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  double kappa = 0.0;
  double approx_denominator = std::sqrt(params.ridge);
  if (params.private_noise) {
    lambda_min = params.lambda_min;
    lambda_max = params.lambda_max;
    kappa = params.kappa;
    if (lambda_min < 0.0 || lambda_max < lambda_min || kappa < 0.0) {
      throw std::invalid_argument("BetaHalf: invalid spectral bounds");
    }
    if (lambda_min == 0.0 && params.epsilon > 0.0) {
      throw std::invalid_argument(
          "BetaHalf: lambda_min = 0 with epsilon > 0 in a private configuration");
    }
    approx_denominator = std::sqrt(lambda_min);
  }
  double approx_term = 0.0;
  if (params.epsilon > 0.0) {
    if (approx_denominator == 0.0) {
      throw std::invalid_argument("BetaHalf: epsilon > 0 requires a positive ridge");
    }
    approx_term = t * B * params.epsilon / (rho * approx_denominator);
  }
  const double log_det_ratio =
      view.log_det_v() - m * std::log(params.ridge + lambda_min);
  // Off the accurate event the ratio can dip below zero.
  const double radicand =
      std::max(0.0, log_det_ratio + 2.0 * std::log(2.0 / params.zeta));
  return B * std::sqrt(lambda_max / (rho * rho) + 1.0) + approx_term +
         kappa / rho + std::sqrt(radicand);
}

double UcbScore(const NoisyView& view, double beta_half,
                const Eigen::VectorXd& phi, double rho) {
  return view.theta().dot(phi) +
         beta_half * rho * std::sqrt(view.InverseQuadratic(phi));
}

int SelectAction(const NoisyView& view, double beta_half,
                 std::span<const EmbeddedCandidate> candidates, double rho) {
  if (candidates.empty()) {
    throw std::invalid_argument("SelectAction: empty candidate set");
  }
  // One blocked triangular solve for all candidates.
  Eigen::MatrixXd phis(view.dim(), static_cast<Eigen::Index>(candidates.size()));
  for (size_t i = 0; i < candidates.size(); ++i) phis.col(i) = candidates[i].phi;
  const Eigen::VectorXd quad = view.InverseQuadraticBatch(phis);
  const Eigen::VectorXd means = phis.transpose() * view.theta();
  int best_id = candidates.front().id;
  double best_score = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < candidates.size(); ++i) {
    const double score = means[i] + beta_half * rho * std::sqrt(quad[i]);
    const int id = candidates[i].id;
    if (score > best_score || (score == best_score && id < best_id)) {
      best_score = score;
      best_id = id;
    }
  }
  return best_id;
}

}  // namespace privgp
