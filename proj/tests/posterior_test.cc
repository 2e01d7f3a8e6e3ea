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

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "privgp/errors.h"
#include "privgp/features.h"
#include "privgp/kernels.h"
#include "privgp/reference.h"

namespace privgp {
namespace {

Eigen::VectorXd RandomUnit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = n(rng);
  return v.normalized();
}

Point RandomBallPoint(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = u(rng);
  return p;
}

NoisyView ExactView(const PosteriorState& s, double ridge) {
  return NoisyView(s.sigma(), s.u(), ridge);
}

TEST(PosteriorStateTest, FirstUpdate) {
  PosteriorState s(3);
  const Eigen::VectorXd phi = Eigen::Vector3d(0.6, 0.0, 0.8);
  s.Update(phi, 0.0);
  EXPECT_EQ(s.sigma(), phi * phi.transpose());
  EXPECT_EQ(s.u(), Eigen::VectorXd::Zero(3));
  EXPECT_EQ(s.rounds(), 1);
}

TEST(PosteriorStateTest, TraceBoundedByRounds) {
  std::mt19937_64 rng(1);
  PosteriorState s(6);
  for (int t = 1; t <= 40; ++t) {
    s.Update(RandomUnit(6, rng) * 0.9, 1.0);
    EXPECT_LE(s.sigma().trace(), t + 1e-12);
  }
}

TEST(PosteriorStateTest, IncrementalMatchesBatch) {
  std::mt19937_64 rng(2);
  const int dim = 10, t = 200;
  PosteriorState s(dim);
  Eigen::MatrixXd phis(t, dim);
  Eigen::VectorXd ys(t);
  for (int i = 0; i < t; ++i) {
    phis.row(i) = RandomUnit(dim, rng).transpose();
    ys[i] = i % 3 == 0 ? 1.0 : 0.0;
    s.Update(phis.row(i).transpose(), ys[i]);
  }
  EXPECT_LT((s.sigma() - phis.transpose() * phis).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((s.u() - phis.transpose() * ys).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PosteriorStateTest, RejectsBadInput) {
  PosteriorState s(2);
  EXPECT_THROW(s.Update(Eigen::Vector2d(1.0, 1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(s.Update(Eigen::Vector2d(NAN, 0.0), 0.0), std::invalid_argument);
  EXPECT_THROW(s.Update(Eigen::Vector2d(0.5, 0.0), INFINITY), std::invalid_argument);
  EXPECT_THROW(s.Update(Eigen::Vector3d(0.5, 0.0, 0.0), 1.0), std::invalid_argument);
  EXPECT_EQ(s.rounds(), 0);
}

TEST(NoisyViewTest, PriorPrediction) {
  PosteriorState s(4);
  const NoisyView view = ExactView(s, 2.0);
  const Prediction p = view.Predict(Eigen::Vector4d(0.5, 0.5, 0.5, 0.5), 0.5);
  EXPECT_EQ(p.mean, 0.0);
  EXPECT_NEAR(p.stddev, 0.5 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(view.log_det_v(), 4 * std::log(2.0), 1e-14);
}

TEST(NoisyViewTest, RejectsIndefiniteMatrix) {
  Eigen::MatrixXd bad = -3.0 * Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(NoisyView(bad, Eigen::VectorXd::Zero(3), 1.0), NumericError);
}

TEST(NoisyViewTest, BatchQuadraticMatchesSingle) {
  std::mt19937_64 rng(3);
  PosteriorState s(8);
  for (int i = 0; i < 12; ++i) s.Update(RandomUnit(8, rng), 1.0);
  const NoisyView view = ExactView(s, 1.0);
  Eigen::MatrixXd phis(8, 5);
  for (int j = 0; j < 5; ++j) phis.col(j) = RandomUnit(8, rng);
  const Eigen::VectorXd batch = view.InverseQuadraticBatch(phis);
  for (int j = 0; j < 5; ++j) {
    EXPECT_NEAR(batch[j], view.InverseQuadratic(phis.col(j)), 1e-14);
  }
}

// Feature-space posterior versus the kernel-space formulas with
// k~(x, y) = Phi(x)^T Phi(y). The two coincide for ridge 1.
TEST(NoisyViewTest, MatchesKernelSpaceOracle) {
  std::mt19937_64 rng(4);
  const double rho = 0.5, ridge = 1.0;
  for (int d : {1, 2}) {
    for (int m_bar : {2, 5, 8}) {
      const FeatureMap map = FeatureMap::Qff(std::vector<double>(d, 1.0), m_bar);
      const reference::KernelFn approx = [&](const Point& a, const Point& b) {
        return map.Embed(a).dot(map.Embed(b));
      };
      PosteriorState s(map.embedding_dim());
      reference::History history;
      std::bernoulli_distribution coin(0.4);
      for (int t = 1; t <= 50; ++t) {
        const Point x = RandomBallPoint(d, rng);
        const double y = coin(rng);
        s.Update(map.Embed(x), y);
        history.Add(x, y);
        if (t % 7 != 0 && t != 50) continue;
        const NoisyView view = ExactView(s, ridge);
        for (int q = 0; q < 5; ++q) {
          const Point xq = RandomBallPoint(d, rng);
          const Prediction p = view.Predict(map.Embed(xq), rho);
          const reference::ExactPosterior e =
              reference::ExactPosteriorAt(history, approx, ridge, rho, xq);
          EXPECT_NEAR(p.mean, e.mean, 1e-8) << "d=" << d << " m_bar=" << m_bar;
          EXPECT_NEAR(p.stddev, std::sqrt(e.variance), 1e-8)
              << "d=" << d << " m_bar=" << m_bar << " t=" << t;
        }
      }
    }
  }
}

TEST(NoisyViewTest, StddevNonIncreasingWithData) {
  std::mt19937_64 rng(5);
  const FeatureMap map = FeatureMap::Qff({1.0, 1.0}, 6);
  const Eigen::VectorXd probe = map.Embed(Point::Zero(2));
  PosteriorState s(map.embedding_dim());
  double previous = INFINITY;
  for (int t = 0; t < 60; ++t) {
    const double sd = ExactView(s, 1.0).Predict(probe, 0.5).stddev;
    EXPECT_LE(sd, previous + 1e-12);
    previous = sd;
    s.Update(map.Embed(RandomBallPoint(2, rng)), 1.0);
  }
}

// sigma~_t(x) <= sigma_t(x) + 2 t^2 sqrt(eps) / rho with the exact kernel on
// the right and the measured feature error eps.
TEST(NoisyViewTest, VarianceInflationBound) {
  std::mt19937_64 rng(6);
  const double rho = 0.5;
  const SEKernel kernel = SEKernel::Isotropic(2, 1.0);
  for (int m_bar : {3, 6}) {
    const FeatureMap map = FeatureMap::Qff(kernel.lengthscales(), m_bar);
    std::vector<Point> tests;
    for (int i = 0; i < 50; ++i) tests.push_back(RandomBallPoint(2, rng));
    std::vector<Point> grid = BoxGrid(Point::Constant(2, -1.4), Point::Constant(2, 1.4), 15);
    grid.insert(grid.end(), tests.begin(), tests.end());
    const double eps = CertifyUniformError(map, kernel, grid).measured;
    PosteriorState s(map.embedding_dim());
    reference::History history;
    for (int t = 1; t <= 30; ++t) {
      const Point x = RandomBallPoint(2, rng);
      s.Update(map.Embed(x), 1.0);
      history.Add(x, 1.0);
      grid.push_back(x);
      const NoisyView view = ExactView(s, 1.0);
      for (const Point& xq : tests) {
        const double approx = view.Predict(map.Embed(xq), rho).stddev;
        const double exact = std::sqrt(
            reference::ExactPosteriorAt(history, kernel, 1.0, rho, xq).variance);
        EXPECT_LE(approx, exact + 2.0 * t * t * std::sqrt(eps) / rho);
      }
    }
  }
}

TEST(BetaHalfTest, DegenerateLimit) {
  PosteriorState s(5);
  const NoisyView view = ExactView(s, 1.0);
  ConfidenceParams p;
  p.B = 1.0;
  p.zeta = 0.1;
  EXPECT_NEAR(BetaHalf(p, view, 1), 1.0 + std::sqrt(2 * std::log(20.0)), 1e-12);
}

TEST(BetaHalfTest, MatchesDirectFormula) {
  std::mt19937_64 rng(7);
  const int m = 6;
  PosteriorState s(m);
  for (int i = 0; i < 10; ++i) s.Update(RandomUnit(m, rng), 1.0);
  ConfidenceParams p;
  p.B = 1.3;
  p.rho = 0.5;
  p.ridge = 1.0;
  p.zeta = 0.05;
  p.epsilon = 1e-3;
  p.private_noise = true;
  p.lambda_min = 4.0;
  p.lambda_max = 12.0;
  p.kappa = 0.7;
  const Eigen::MatrixXd shifted = s.sigma() + 8.0 * Eigen::MatrixXd::Identity(m, m);
  const NoisyView view(shifted, s.u(), p.ridge);
  const int t = 11;
  const double logdet = std::log((shifted + Eigen::MatrixXd::Identity(m, m)).determinant());
  const double expected = p.B * std::sqrt(p.lambda_max / (p.rho * p.rho) + 1) +
                          t * p.B * p.epsilon / (p.rho * std::sqrt(p.lambda_min)) +
                          p.kappa / p.rho +
                          std::sqrt(logdet - m * std::log(p.ridge + p.lambda_min) +
                                    2 * std::log(2 / p.zeta));
  EXPECT_NEAR(BetaHalf(p, view, t), expected, 1e-10);
}

TEST(BetaHalfTest, KappaIsAdditive) {
  PosteriorState s(3);
  const NoisyView view(4.0 * Eigen::MatrixXd::Identity(3, 3), s.u(), 1.0);
  ConfidenceParams p;
  p.private_noise = true;
  p.lambda_min = 2.0;
  p.lambda_max = 6.0;
  p.kappa = 0.3;
  const double a = BetaHalf(p, view, 5);
  p.kappa = 0.6;
  EXPECT_NEAR(BetaHalf(p, view, 5) - a, 0.3 / p.rho, 1e-12);
}

TEST(BetaHalfTest, NonDecreasingAlongRun) {
  std::mt19937_64 rng(8);
  PosteriorState s(8);
  ConfidenceParams p;
  p.epsilon = 1e-4;
  double previous = 0.0;
  for (int t = 1; t <= 100; ++t) {
    const double b = BetaHalf(p, ExactView(s, 1.0), t);
    EXPECT_GE(b, previous);
    previous = b;
    s.Update(RandomUnit(8, rng), 1.0);
  }
}

TEST(BetaHalfTest, RejectsInconsistentParameters) {
  PosteriorState s(2);
  const NoisyView view = ExactView(s, 1.0);
  ConfidenceParams p;
  p.private_noise = true;
  p.epsilon = 0.1;
  EXPECT_THROW(BetaHalf(p, view, 1), std::invalid_argument);
  ConfidenceParams q;
  q.rho = 0.0;
  EXPECT_THROW(BetaHalf(q, view, 1), std::invalid_argument);
  ConfidenceParams r;
  r.zeta = 1.0;
  EXPECT_THROW(BetaHalf(r, view, 1), std::invalid_argument);
}

TEST(SelectActionTest, SingleCandidate) {
  PosteriorState s(2);
  const std::vector<EmbeddedCandidate> c = {{7, Eigen::Vector2d(1, 0)}};
  EXPECT_EQ(SelectAction(ExactView(s, 1.0), 3.0, c, 0.5), 7);
}

TEST(SelectActionTest, PureExploitation) {
  PosteriorState s(2);
  s.Update(Eigen::Vector2d(1, 0), 1.0);
  const std::vector<EmbeddedCandidate> c = {{0, Eigen::Vector2d(0, 1)},
                                            {1, Eigen::Vector2d(1, 0)}};
  EXPECT_EQ(SelectAction(ExactView(s, 1.0), 0.0, c, 0.5), 1);
}

TEST(SelectActionTest, TiesGoToLowestId) {
  PosteriorState s(2);
  const std::vector<EmbeddedCandidate> c = {{5, Eigen::Vector2d(1, 0)},
                                            {2, Eigen::Vector2d(0, 1)},
                                            {9, Eigen::Vector2d(-1, 0)}};
  EXPECT_EQ(SelectAction(ExactView(s, 1.0), 1.0, c, 0.5), 2);
}

TEST(SelectActionTest, EmptyThrows) {
  PosteriorState s(2);
  EXPECT_THROW(SelectAction(ExactView(s, 1.0), 1.0, {}, 0.5), std::invalid_argument);
}

TEST(SelectActionTest, MatchesBruteForceScoring) {
  std::mt19937_64 rng(9);
  const int m = 12;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(m, m);
    const Eigen::MatrixXd sigma = a * a.transpose();
    const Eigen::VectorXd u = Eigen::VectorXd::Random(m);
    const NoisyView view(sigma, u, 1.0);
    const Eigen::MatrixXd v_inv = (sigma + Eigen::MatrixXd::Identity(m, m)).inverse();
    const Eigen::VectorXd theta = v_inv * u;
    std::vector<EmbeddedCandidate> c;
    for (int i = 0; i < 25; ++i) c.push_back({i, RandomUnit(m, rng)});
    const double beta = 0.5 * trial;
    int best = 0;
    double best_score = -INFINITY;
    for (const auto& e : c) {
      const double score =
          theta.dot(e.phi) + beta * 0.5 * std::sqrt(e.phi.dot(v_inv * e.phi));
      if (score > best_score) {
        best_score = score;
        best = e.id;
      }
    }
    EXPECT_EQ(SelectAction(view, beta, c, 0.5), best);
    EXPECT_NEAR(UcbScore(view, beta, c[best].phi, 0.5), best_score, 1e-10);
  }
}

TEST(SelectActionTest, ScalingThetaKeepsArgmax) {
  std::mt19937_64 rng(10);
  const int m = 6;
  PosteriorState s(m);
  for (int i = 0; i < 8; ++i) s.Update(RandomUnit(m, rng), i % 2);
  std::vector<EmbeddedCandidate> c;
  for (int i = 0; i < 25; ++i) c.push_back({i, RandomUnit(m, rng)});
  const int base = SelectAction(ExactView(s, 1.0), 0.0, c, 0.5);
  for (double scale : {0.01, 3.0, 1000.0}) {
    const NoisyView scaled(s.sigma(), scale * s.u(), 1.0);
    EXPECT_EQ(SelectAction(scaled, 0.0, c, 0.5), base);
  }
}

}  // namespace
}  // namespace privgp
