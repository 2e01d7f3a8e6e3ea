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

#include "privgp/bandit.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "privgp/errors.h"
#include "privgp/reference.h"
#include "privgp/rng.h"

namespace privgp {
namespace {

struct Choice {
  int index = 0;
  double beta_half = 0.0;
};

Choice Choose(const NoisyView& view, const ConfidenceParams& confidence, int t,
              const DecisionSet& decision_set, const FeatureMap& map) {
  Choice choice;
  choice.beta_half = BetaHalf(confidence, view, t);
  std::vector<EmbeddedCandidate> candidates(decision_set.size());
  for (int i = 0; i < decision_set.size(); ++i) {
    candidates[i].id = i;
    candidates[i].phi = map.Embed(decision_set.points[i]);
  }
  choice.index = SelectAction(view, choice.beta_half, candidates, confidence.rho);
  return choice;
}

void Record(RunRecord& record, const DecisionSet& decision_set, int index,
            int reward, double beta_half) {
  RoundRecord round;
  round.action_id = index;
  round.reward = reward;
  round.inst_regret =
      std::max(0.0, decision_set.best_value() - decision_set.values[index]);
  round.cum_regret =
      (record.rounds.empty() ? 0.0 : record.rounds.back().cum_regret) +
      round.inst_regret;
  round.beta_half = beta_half;
  record.rounds.push_back(round);
}

Eigen::VectorXd WithReward(const Eigen::VectorXd& phi, double y) {
  Eigen::VectorXd v(phi.size() + 1);
  v << phi, y;
  return v;
}

void CheckConfig(const RunConfig& config) {
  if (config.horizon < 1) throw std::invalid_argument("RunConfig: horizon must be >= 1");
  if (config.m_bar < 1) throw std::invalid_argument("RunConfig: m_bar must be >= 1");
  if (!(config.rho > 0.0) || !(config.ridge > 0.0) || !(config.B >= 0.0)) {
    throw std::invalid_argument("RunConfig: rho, ridge must be > 0 and B >= 0");
  }
  if (!(config.zeta > 0.0 && config.zeta < 1.0)) {
    throw std::invalid_argument("RunConfig: zeta must be in (0, 1)");
  }
}

}  // namespace

std::string_view RegimeName(Regime regime) {
  switch (regime) {
    case Regime::kNonPrivate:
      return "nonprivate";
    case Regime::kJdp:
      return "jdp";
    case Regime::kLocalJdp:
      return "ldp";
  }
  return "unknown";
}

std::optional<Regime> ParseRegime(std::string_view name) {
  if (name == "nonprivate" || name == "non_private" || name == "none") {
    return Regime::kNonPrivate;
  }
  if (name == "jdp") return Regime::kJdp;
  if (name == "ldp" || name == "local_jdp" || name == "localjdp") {
    return Regime::kLocalJdp;
  }
  return std::nullopt;
}

PrivacySetup DerivePrivacy(const RunConfig& config, int dim) {
  PrivacySetup setup;
  setup.tree_depth = TreeDepth(config.horizon);
  switch (config.regime) {
    case Regime::kNonPrivate:
      break;
    case Regime::kJdp:
      if (!config.zero_noise) {
        setup.tree_sigma = JdpNoiseScale(config.alpha, config.beta_priv,
                                         config.horizon, config.B, config.rho);
      }
      setup.bounds = JdpSpectral(setup.tree_sigma, setup.tree_depth, dim,
                                 config.horizon, config.zeta);
      break;
    case Regime::kLocalJdp:
      if (!config.zero_noise) {
        setup.ldp = LdpNoiseScales(config.alpha, config.beta_priv, config.B, dim);
      }
      setup.bounds = LdpSpectral(setup.ldp.sigma_x, setup.ldp.sigma_u, dim,
                                 config.horizon, config.zeta);
      break;
  }
  return setup;
}

ConfidenceParams MakeConfidence(const RunConfig& config,
                                const SpectralBounds& bounds, double epsilon) {
  ConfidenceParams params;
  params.B = config.B;
  params.rho = config.rho;
  params.ridge = config.ridge;
  params.zeta = config.zeta;
  params.epsilon = epsilon;
  params.private_noise = !bounds.degenerate();
  if (params.private_noise) {
    params.lambda_min = bounds.lambda_min;
    params.lambda_max = bounds.lambda_max;
    params.kappa = bounds.kappa;
  }
  return params;
}

FeatureMap BuildFeatureMap(const RunConfig& config, int input_dim) {
  std::vector<double> lengthscales(input_dim, config.lengthscale);
  if (config.feature_kind == FeatureKind::kQff) {
    return FeatureMap::Qff(std::move(lengthscales), config.m_bar);
  }
  const double count = std::pow(static_cast<double>(config.m_bar), input_dim);
  if (count > 1e6) {
    throw std::invalid_argument("BuildFeatureMap: m_bar^d exceeds 1e6 frequencies");
  }
  return FeatureMap::Rff(
      std::move(lengthscales), static_cast<int>(count),
      DeriveSeed(config.seed, static_cast<uint64_t>(Stream::kRandomFeatures)));
}

PrefixStatistics ExactPrivatizer::Release(int /*t*/) {
  return {state_.sigma(), state_.u()};
}

void ExactPrivatizer::Absorb(int /*t*/, const Eigen::VectorXd& phi, double y) {
  state_.Update(phi, y);
}

JdpPrivatizer::JdpPrivatizer(int horizon, int dim, double sigma, double shift,
                             uint64_t seed)
    : tree_(horizon, dim + 1, sigma, seed), shift_(shift) {}

PrefixStatistics JdpPrivatizer::Release(int t) {
  PrefixStatistics stats = tree_.Prefix(t);
  stats.sigma = PsdShift(std::move(stats.sigma), shift_);
  return stats;
}

void JdpPrivatizer::Absorb(int t, const Eigen::VectorXd& phi, double y) {
  tree_.Insert(t, WithReward(phi, y));
}

LdpPrivatizer::LdpPrivatizer(int dim, LdpNoise noise, double shift,
                             uint64_t seed)
    : sigma_(Eigen::MatrixXd::Zero(dim, dim)),
      u_(Eigen::VectorXd::Zero(dim)),
      noise_(noise),
      shift_(shift),
      seed_(seed) {}

PrefixStatistics LdpPrivatizer::Release(int /*t*/) {
  return {PsdShift(sigma_, shift_), u_};
}

void LdpPrivatizer::Absorb(int t, const Eigen::VectorXd& phi, double y) {
  Rng rng = MakeRng(seed_, Stream::kPrivacyNoise, static_cast<uint64_t>(t));
  const LdpIncrement inc = LdpPerturb(phi, y, noise_.sigma_x, noise_.sigma_u, rng);
  sigma_ += inc.sigma;
  u_ += inc.u;
}

std::unique_ptr<Privatizer> MakePrivatizer(const RunConfig& config, int dim,
                                           const PrivacySetup& setup) {
  const uint64_t noise_seed = DeriveSeed(config.seed,
                                         static_cast<uint64_t>(Stream::kPrivacyNoise));
  switch (config.regime) {
    case Regime::kNonPrivate:
      return std::make_unique<ExactPrivatizer>(dim);
    case Regime::kJdp:
      return std::make_unique<JdpPrivatizer>(config.horizon, dim, setup.tree_sigma,
                                             setup.bounds.shift, noise_seed);
    case Regime::kLocalJdp:
      return std::make_unique<LdpPrivatizer>(dim, setup.ldp, setup.bounds.shift,
                                             noise_seed);
  }
  throw std::invalid_argument("MakePrivatizer: unknown regime");
}

namespace {

void MaybeRecordInfoGain(const RunConfig& config, const FeatureMap& map,
                         const std::vector<Point>& actions, RunRecord& record) {
  if (!config.record_info_gain) return;
  const SEKernel kernel(map.lengthscales());
  record.info_gain = reference::InfoGain(actions, kernel, config.ridge);
}

}  // namespace

RunRecord Run(const RunConfig& config, Environment& env) {
  CheckConfig(config);
  const FeatureMap map = BuildFeatureMap(config, env.dim());
  const SEKernel kernel(map.lengthscales());
  const std::vector<Point> grid = env.CertificationGrid();

  RunRecord record;
  record.certificate = CertifyUniformError(map, kernel, grid);
  const int dim = map.embedding_dim();
  const PrivacySetup setup = DerivePrivacy(config, dim);
  const ConfidenceParams confidence =
      MakeConfidence(config, setup.bounds, record.certificate.measured);
  std::unique_ptr<Privatizer> privatizer = MakePrivatizer(config, dim, setup);

  std::vector<Point> actions;
  record.rounds.reserve(config.horizon);
  for (int t = 1; t <= config.horizon; ++t) {
    const DecisionSet decision_set = env.NextDecisionSet();
    PrefixStatistics stats = privatizer->Release(t);
    const NoisyView view(std::move(stats.sigma), std::move(stats.u), config.ridge);
    const Choice choice = Choose(view, confidence, t, decision_set, map);
    const Point& x = decision_set.points[choice.index];
    const int y = env.SampleReward(x);
    privatizer->Absorb(t, map.Embed(x), y);
    Record(record, decision_set, choice.index, y, choice.beta_half);
    if (config.record_info_gain) actions.push_back(x);
  }
  MaybeRecordInfoGain(config, map, actions, record);
  return record;
}

LdpServer::LdpServer(int dim)
    : sigma_(Eigen::MatrixXd::Zero(dim, dim)), u_(Eigen::VectorXd::Zero(dim)) {}

ProtocolMessage LdpServer::SendParameters(int t) const {
  return {ProtocolMessage::Kind::kParameters, t, sigma_, u_};
}

void LdpServer::ReceiveUpdate(const ProtocolMessage& update) {
  if (update.kind != ProtocolMessage::Kind::kUpdate || update.round != next_round_) {
    throw StateError("LdpServer: unexpected message for round " +
                     std::to_string(update.round));
  }
  if (update.sigma.rows() != sigma_.rows() || update.u.size() != u_.size()) {
    throw std::invalid_argument("LdpServer: update has wrong shape");
  }
  sigma_ = update.sigma;
  u_ = update.u;
  ++next_round_;
}

LdpClient::LdpClient(const FeatureMap& map, ConfidenceParams confidence,
                     SpectralBounds bounds, LdpNoise noise, uint64_t noise_seed)
    : map_(map),
      confidence_(confidence),
      bounds_(bounds),
      noise_(noise),
      noise_seed_(noise_seed) {}

ClientOutcome LdpClient::Participate(const ProtocolMessage& parameters,
                                     const DecisionSet& decision_set,
                                     Environment& env) const {
  const int t = parameters.round;
  const NoisyView view(PsdShift(parameters.sigma, bounds_.shift), parameters.u,
                       confidence_.ridge);
  const Choice choice = Choose(view, confidence_, t, decision_set, map_);
  const int y = env.SampleReward(decision_set.points[choice.index]);

  Rng rng = MakeRng(noise_seed_, Stream::kPrivacyNoise, static_cast<uint64_t>(t));
  const LdpIncrement inc =
      LdpPerturb(map_.Embed(decision_set.points[choice.index]), y,
                 noise_.sigma_x, noise_.sigma_u, rng);
  ClientOutcome outcome;
  outcome.update = {ProtocolMessage::Kind::kUpdate, t, parameters.sigma + inc.sigma,
                    parameters.u + inc.u};
  outcome.action_index = choice.index;
  outcome.reward = y;
  outcome.beta_half = choice.beta_half;
  return outcome;
}

RunRecord RunLdpProtocol(const RunConfig& config, Environment& env,
                         std::vector<ProtocolMessage>* trace) {
  CheckConfig(config);
  if (config.regime != Regime::kLocalJdp) {
    throw std::invalid_argument("RunLdpProtocol: regime must be LocalJDP");
  }
  const FeatureMap map = BuildFeatureMap(config, env.dim());
  const SEKernel kernel(map.lengthscales());
  const std::vector<Point> grid = env.CertificationGrid();

  RunRecord record;
  record.certificate = CertifyUniformError(map, kernel, grid);
  const int dim = map.embedding_dim();
  const PrivacySetup setup = DerivePrivacy(config, dim);
  const ConfidenceParams confidence =
      MakeConfidence(config, setup.bounds, record.certificate.measured);
  const uint64_t noise_seed = DeriveSeed(config.seed,
                                         static_cast<uint64_t>(Stream::kPrivacyNoise));
  const LdpClient client(map, confidence, setup.bounds, setup.ldp, noise_seed);
  LdpServer server(dim);

  std::vector<Point> actions;
  record.rounds.reserve(config.horizon);
  for (int t = 1; t <= config.horizon; ++t) {
    const DecisionSet decision_set = env.NextDecisionSet();
    ProtocolMessage parameters = server.SendParameters(t);
    ClientOutcome outcome = client.Participate(parameters, decision_set, env);
    server.ReceiveUpdate(outcome.update);
    Record(record, decision_set, outcome.action_index, outcome.reward,
           outcome.beta_half);
    if (config.record_info_gain) {
      actions.push_back(decision_set.points[outcome.action_index]);
    }
    if (trace != nullptr) {
      trace->push_back(std::move(parameters));
      trace->push_back(std::move(outcome.update));
    }
  }
  MaybeRecordInfoGain(config, map, actions, record);
  return record;
}

}  // namespace privgp
