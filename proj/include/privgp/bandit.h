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

#ifndef PRIVGP_BANDIT_H_
#define PRIVGP_BANDIT_H_

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "privgp/envs.h"
#include "privgp/features.h"
#include "privgp/posterior.h"
#include "privgp/privacy.h"

namespace privgp {

enum class Regime { kNonPrivate, kJdp, kLocalJdp };

std::string_view RegimeName(Regime regime);
std::optional<Regime> ParseRegime(std::string_view name);

struct RunConfig {
  Regime regime = Regime::kNonPrivate;
  int horizon = 1024;
  FeatureKind feature_kind = FeatureKind::kQff;
  int m_bar = 8;  // nodes per dimension; RFF draws m_bar^d frequencies
  double lengthscale = 1.0;
  double alpha = 1.0;
  double beta_priv = 0.1;
  double B = 1.0;
  double rho = 0.5;
  double ridge = 1.0;
  double zeta = 0.1;
  uint64_t seed = 0;
  // Test hook: run the private regimes with all noise scales forced to 0.
  bool zero_noise = false;
  bool record_info_gain = false;
};

struct RoundRecord {
  int action_id = 0;
  int reward = 0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
  double beta_half = 0.0;
};

struct RunRecord {
  std::vector<RoundRecord> rounds;
  ApproxCertificate certificate;
  double info_gain = std::numeric_limits<double>::quiet_NaN();

  double final_regret() const {
    return rounds.empty() ? 0.0 : rounds.back().cum_regret;
  }
};

// Noise calibration of one run, derived from the config and the embedding
// dimension m (the released statistics are m x m and m-dimensional).
struct PrivacySetup {
  double tree_sigma = 0.0;  // JDP per-node noise scale
  int tree_depth = 1;
  LdpNoise ldp;             // LocalJDP per-round noise scales
  SpectralBounds bounds;    // all zero for NonPrivate or zero-noise runs
};

PrivacySetup DerivePrivacy(const RunConfig& config, int dim);

ConfidenceParams MakeConfidence(const RunConfig& config,
                                const SpectralBounds& bounds, double epsilon);

FeatureMap BuildFeatureMap(const RunConfig& config, int input_dim);

// The trusted side of the loop: holds raw data (or only perturbed aggregates,
// for LocalJDP) and releases statistics ready for a NoisyView.
class Privatizer {
 public:
  virtual ~Privatizer() = default;
  // Released (sigma~ + shift I, u~) for round t.
  virtual PrefixStatistics Release(int t) = 0;
  virtual void Absorb(int t, const Eigen::VectorXd& phi, double y) = 0;
};

class ExactPrivatizer : public Privatizer {
 public:
  explicit ExactPrivatizer(int dim) : state_(dim) {}
  PrefixStatistics Release(int t) override;
  void Absorb(int t, const Eigen::VectorXd& phi, double y) override;

 private:
  PosteriorState state_;
};

class JdpPrivatizer : public Privatizer {
 public:
  JdpPrivatizer(int horizon, int dim, double sigma, double shift, uint64_t seed);
  PrefixStatistics Release(int t) override;
  void Absorb(int t, const Eigen::VectorXd& phi, double y) override;
  const NoisyTree& tree() const { return tree_; }

 private:
  NoisyTree tree_;
  double shift_;
};

// In-process LocalJDP aggregate: only perturbed increments ever reach it.
class LdpPrivatizer : public Privatizer {
 public:
  LdpPrivatizer(int dim, LdpNoise noise, double shift, uint64_t seed);
  PrefixStatistics Release(int t) override;
  void Absorb(int t, const Eigen::VectorXd& phi, double y) override;

 private:
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd u_;
  LdpNoise noise_;
  double shift_;
  uint64_t seed_;
};

std::unique_ptr<Privatizer> MakePrivatizer(const RunConfig& config, int dim,
                                           const PrivacySetup& setup);

// Runs `config.horizon` rounds of UCB on privatized feature statistics.
// Throws EnvironmentError if the environment cannot produce a decision set
// and NumericError if V_t fails to factor.
RunRecord Run(const RunConfig& config, Environment& env);

// Messages of the LocalJDP server/client protocol. The server only ever
// holds the latest update message.
struct ProtocolMessage {
  enum class Kind { kParameters, kUpdate };
  Kind kind = Kind::kParameters;
  int round = 0;
  Eigen::MatrixXd sigma;
  Eigen::VectorXd u;
};

class LdpServer {
 public:
  explicit LdpServer(int dim);
  ProtocolMessage SendParameters(int t) const;
  void ReceiveUpdate(const ProtocolMessage& update);
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::VectorXd& u() const { return u_; }

 private:
  Eigen::MatrixXd sigma_;
  Eigen::VectorXd u_;
  int next_round_ = 1;
};

struct ClientOutcome {
  ProtocolMessage update;
  int action_index = 0;
  int reward = 0;
  double beta_half = 0.0;
};

// Client(t): selects and plays with the received aggregates, then returns
// them with its own perturbed contribution added.
class LdpClient {
 public:
  LdpClient(const FeatureMap& map, ConfidenceParams confidence,
            SpectralBounds bounds, LdpNoise noise, uint64_t noise_seed);

  ClientOutcome Participate(const ProtocolMessage& parameters,
                            const DecisionSet& decision_set,
                            Environment& env) const;

 private:
  const FeatureMap& map_;
  ConfidenceParams confidence_;
  SpectralBounds bounds_;
  LdpNoise noise_;
  uint64_t noise_seed_;
};

// LocalJDP as an explicit message exchange. Produces the same record as
// Run() for the same config; `trace`, when given, receives all 2T messages.
RunRecord RunLdpProtocol(const RunConfig& config, Environment& env,
                         std::vector<ProtocolMessage>* trace = nullptr);

}  // namespace privgp

#endif  // PRIVGP_BANDIT_H_
