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

#include "privgp/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "privgp/errors.h"
#include "privgp/rng.h"

namespace privgp {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    parts.push_back(Trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double ParseDouble(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(std::string(key), "config key '" + std::string(key) +
                                            "': expected a number, got '" +
                                            std::string(text) + "'");
  }
  return value;
}

int64_t ParseInt(std::string_view key, std::string_view text) {
  int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), "config key '" + std::string(key) +
                                            "': expected an integer, got '" +
                                            std::string(text) + "'");
  }
  return value;
}

uint64_t ParseSeed(std::string_view key, std::string_view text) {
  uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key), "config key '" + std::string(key) +
                                            "': expected a non-negative integer");
  }
  return value;
}

std::vector<double> ParseDoubleList(std::string_view key, std::string_view text) {
  std::vector<double> values;
  for (std::string_view part : Split(text, ',')) values.push_back(ParseDouble(key, part));
  return values;
}

void Require(bool ok, std::string_view key, const std::string& message) {
  if (!ok) {
    throw ConfigError(std::string(key),
                      "config key '" + std::string(key) + "': " + message);
  }
}

std::string JoinDoubles(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += FormatDouble(values[i]);
  }
  return out;
}

std::string ShortDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

uint64_t Fnv1a(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string CanonicalBody(const ExperimentSpec& spec) {
  const RunConfig& b = spec.base;
  std::ostringstream out;
  std::string regimes;
  for (size_t i = 0; i < spec.regimes.size(); ++i) {
    if (i > 0) regimes += ",";
    regimes += RegimeName(spec.regimes[i]);
  }
  out << "regime = " << regimes << "\n";
  out << "env = " << (spec.env == EnvKind::kCamelback ? "camelback" : "synthetic") << "\n";
  out << "T = " << b.horizon << "\n";
  out << "d = " << spec.d << "\n";
  out << "nu = " << FormatDouble(b.lengthscale) << "\n";
  out << "m_bar = " << b.m_bar << "\n";
  out << "feature_kind = " << (b.feature_kind == FeatureKind::kQff ? "qff" : "rff") << "\n";
  out << "alpha = " << JoinDoubles(spec.alphas) << "\n";
  out << "beta_priv = " << JoinDoubles(spec.betas) << "\n";
  out << "B = " << FormatDouble(b.B) << "\n";
  out << "rho = " << FormatDouble(b.rho) << "\n";
  out << "lambda = " << FormatDouble(b.ridge) << "\n";
  out << "zeta = " << FormatDouble(b.zeta) << "\n";
  out << "n_candidates = " << spec.n_candidates << "\n";
  out << "trials = " << spec.trials << "\n";
  out << "seed = " << spec.master_seed << "\n";
  if (spec.fixed_function) {
    const SyntheticFunction& f = *spec.fixed_function;
    out << "anchors = ";
    for (size_t i = 0; i < f.anchors.size(); ++i) {
      if (i > 0) out << "; ";
      for (Eigen::Index j = 0; j < f.anchors[i].size(); ++j) {
        if (j > 0) out << " ";
        out << FormatDouble(f.anchors[i][j]);
      }
    }
    out << "\nweights = " << JoinDoubles(f.weights) << "\n";
  }
  return out.str();
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string Cell::name() const {
  if (regime == Regime::kNonPrivate) return std::string(RegimeName(regime));
  return std::string(RegimeName(regime)) + "_alpha" + ShortDouble(alpha) +
         "_beta" + ShortDouble(beta_priv);
}

ExperimentSpec ParseConfig(std::string_view text) {
  ExperimentSpec spec;
  std::string anchors_text;
  std::string weights_text;
  std::map<std::string, int> seen;
  for (std::string_view raw : Split(text, '\n')) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "config line '" + std::string(line) +
                                               "' is not of the form key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string_view value = Trim(line.substr(eq + 1));
    Require(++seen[key] == 1, key, "given more than once");
    Require(!value.empty(), key, "empty value");

    RunConfig& b = spec.base;
    if (key == "regime") {
      spec.regimes.clear();
      for (std::string_view part : Split(value, ',')) {
        const auto regime = ParseRegime(part);
        Require(regime.has_value(), key, "unknown regime '" + std::string(part) + "'");
        spec.regimes.push_back(*regime);
      }
    } else if (key == "env") {
      if (value == "synthetic") {
        spec.env = EnvKind::kSynthetic;
      } else if (value == "camelback" || value == "camel") {
        spec.env = EnvKind::kCamelback;
      } else {
        Require(false, key, "expected synthetic or camelback");
      }
    } else if (key == "T") {
      const int64_t v = ParseInt(key, value);
      Require(v >= 1 && v <= (1 << 24), key, "must be in [1, 2^24]");
      b.horizon = static_cast<int>(v);
    } else if (key == "d") {
      const int64_t v = ParseInt(key, value);
      Require(v >= 1 && v <= 20, key, "must be in [1, 20]");
      spec.d = static_cast<int>(v);
    } else if (key == "nu") {
      b.lengthscale = ParseDouble(key, value);
      Require(b.lengthscale > 0.0, key, "must be positive");
    } else if (key == "m_bar") {
      const int64_t v = ParseInt(key, value);
      Require(v >= 1 && v <= 64, key, "must be in [1, 64]");
      b.m_bar = static_cast<int>(v);
    } else if (key == "feature_kind") {
      if (value == "qff") {
        b.feature_kind = FeatureKind::kQff;
      } else if (value == "rff") {
        b.feature_kind = FeatureKind::kRff;
      } else {
        Require(false, key, "expected qff or rff");
      }
    } else if (key == "alpha") {
      spec.alphas = ParseDoubleList(key, value);
      for (double a : spec.alphas) Require(a > 0.0, key, "must be positive");
    } else if (key == "beta_priv") {
      spec.betas = ParseDoubleList(key, value);
      for (double v : spec.betas) Require(v > 0.0 && v < 1.0, key, "must be in (0, 1)");
    } else if (key == "B") {
      b.B = ParseDouble(key, value);
      Require(b.B >= 0.0, key, "must be non-negative");
    } else if (key == "rho") {
      b.rho = ParseDouble(key, value);
      Require(b.rho > 0.0, key, "must be positive");
    } else if (key == "lambda") {
      b.ridge = ParseDouble(key, value);
      Require(b.ridge > 0.0, key, "must be positive");
    } else if (key == "zeta") {
      b.zeta = ParseDouble(key, value);
      Require(b.zeta > 0.0 && b.zeta < 1.0, key, "must be in (0, 1)");
    } else if (key == "n_candidates") {
      const int64_t v = ParseInt(key, value);
      Require(v >= 2 && v <= 100000, key, "must be in [2, 100000]");
      spec.n_candidates = static_cast<int>(v);
    } else if (key == "trials") {
      const int64_t v = ParseInt(key, value);
      Require(v >= 1 && v <= 1000000, key, "must be >= 1");
      spec.trials = static_cast<int>(v);
    } else if (key == "seed") {
      spec.master_seed = ParseSeed(key, value);
    } else if (key == "out_dir") {
      spec.out_dir = std::string(value);
    } else if (key == "anchors") {
      anchors_text = std::string(value);
    } else if (key == "weights") {
      weights_text = std::string(value);
    } else {
      throw ConfigError(key, "unknown config key '" + key + "'");
    }
  }

  if (spec.env == EnvKind::kCamelback) {
    Require(spec.d == 2, "d", "the camelback environment is 2-dimensional");
  }
  Require(anchors_text.empty() == weights_text.empty(), "anchors",
          "anchors and weights must be given together");
  if (!anchors_text.empty()) {
    Require(spec.env == EnvKind::kSynthetic, "anchors",
            "a fixed function needs env = synthetic");
    SyntheticFunction f{{}, {}, SEKernel::Isotropic(spec.d, spec.base.lengthscale)};
    for (std::string_view a : Split(anchors_text, ';')) {
      std::vector<double> coords;
      for (std::string_view c : Split(a, ' ')) {
        if (!c.empty()) coords.push_back(ParseDouble("anchors", c));
      }
      Require(static_cast<int>(coords.size()) == spec.d, "anchors",
              "each anchor needs d coordinates");
      f.anchors.push_back(Eigen::Map<Eigen::VectorXd>(coords.data(), spec.d));
    }
    f.weights = ParseDoubleList("weights", weights_text);
    Require(f.weights.size() == f.anchors.size(), "weights",
            "need one weight per anchor");
    double l1 = 0.0;
    for (double w : f.weights) l1 += std::abs(w);
    Require(l1 <= 1.0 + 1e-12, "weights", "L1 norm must be at most 1");
    spec.fixed_function = std::move(f);
  }
  return spec;
}

ExperimentSpec LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

std::string SerializeConfig(const ExperimentSpec& spec) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(ConfigHash(spec)));
  return CanonicalBody(spec) + "out_dir = " + spec.out_dir + "\n# hash=" + hash + "\n";
}

uint64_t ConfigHash(const ExperimentSpec& spec) {
  return Fnv1a(CanonicalBody(spec));
}

std::optional<uint64_t> RecordedHash(std::string_view text) {
  constexpr std::string_view kTag = "# hash=";
  const auto pos = text.find(kTag);
  if (pos == std::string_view::npos) return std::nullopt;
  std::string_view rest = text.substr(pos + kTag.size());
  rest = rest.substr(0, rest.find('\n'));
  rest = Trim(rest);
  uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value, 16);
  if (ec != std::errc() || ptr != rest.data() + rest.size()) return std::nullopt;
  return value;
}

std::vector<Cell> ExpandCells(const ExperimentSpec& spec) {
  std::vector<Cell> cells;
  for (Regime regime : spec.regimes) {
    if (regime == Regime::kNonPrivate) {
      Cell cell{regime, spec.alphas.front(), spec.betas.front()};
      const bool seen = std::any_of(cells.begin(), cells.end(), [](const Cell& c) {
        return c.regime == Regime::kNonPrivate;
      });
      if (!seen) cells.push_back(cell);
      continue;
    }
    for (double alpha : spec.alphas) {
      for (double beta : spec.betas) cells.push_back({regime, alpha, beta});
    }
  }
  return cells;
}

uint64_t TrialSeed(uint64_t master_seed, int trial) {
  return DeriveSeed(master_seed, 0x7269616cULL, static_cast<uint64_t>(trial));
}

RunConfig CellConfig(const ExperimentSpec& spec, const Cell& cell, int trial) {
  RunConfig config = spec.base;
  config.regime = cell.regime;
  config.alpha = cell.alpha;
  config.beta_priv = cell.beta_priv;
  config.seed = TrialSeed(spec.master_seed, trial);
  return config;
}

std::unique_ptr<Environment> MakeEnvironment(const ExperimentSpec& spec,
                                             uint64_t trial_seed) {
  if (spec.env == EnvKind::kCamelback) {
    return std::make_unique<CamelbackEnvironment>(spec.n_candidates, trial_seed);
  }
  if (spec.fixed_function) {
    return std::make_unique<SyntheticEnvironment>(*spec.fixed_function,
                                                  spec.n_candidates, trial_seed);
  }
  return std::make_unique<SyntheticEnvironment>(spec.d, spec.base.lengthscale,
                                                spec.n_candidates, trial_seed);
}

double CellResult::MeanFinalRegret() const {
  double sum = 0.0;
  for (const RunRecord& r : trials) sum += r.final_regret();
  return trials.empty() ? 0.0 : sum / trials.size();
}

double CellResult::StdFinalRegret() const {
  if (trials.size() < 2) return 0.0;
  const double mean = MeanFinalRegret();
  double ss = 0.0;
  for (const RunRecord& r : trials) {
    const double d = r.final_regret() - mean;
    ss += d * d;
  }
  return std::sqrt(ss / (trials.size() - 1));
}

std::vector<double> CellResult::MeanCurve() const {
  if (trials.empty()) return {};
  std::vector<double> curve(trials.front().rounds.size(), 0.0);
  for (const RunRecord& r : trials) {
    for (size_t t = 0; t < curve.size(); ++t) curve[t] += r.rounds[t].cum_regret;
  }
  for (double& v : curve) v /= trials.size();
  return curve;
}

ExperimentResult RunTrials(const ExperimentSpec& spec,
                           const std::vector<int>& trials, int parallel) {
  const std::vector<Cell> cells = ExpandCells(spec);
  ExperimentResult result;
  for (const Cell& cell : cells) {
    result.cells.push_back({cell, std::vector<RunRecord>(trials.size())});
  }
  const size_t total = cells.size() * trials.size();
  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    while (true) {
      const size_t job = next.fetch_add(1);
      if (job >= total) return;
      const size_t c = job / trials.size();
      const size_t k = job % trials.size();
      try {
        const RunConfig config = CellConfig(spec, cells[c], trials[k]);
        std::unique_ptr<Environment> env = MakeEnvironment(spec, config.seed);
        result.cells[c].trials[k] = Run(config, *env);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(total);
      }
    }
  };
  const int workers = std::max(1, std::min<int>(parallel, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return result;
}

ExperimentResult RunExperiment(const ExperimentSpec& spec, int parallel) {
  std::vector<int> trials(spec.trials);
  for (int i = 0; i < spec.trials; ++i) trials[i] = i;
  return RunTrials(spec, trials, parallel);
}

std::string CellCsv(const CellResult& result, const std::vector<int>& trial_ids) {
  std::string out = "trial,round,action_id,reward,inst_regret,cum_regret,beta_t\n";
  for (size_t k = 0; k < result.trials.size(); ++k) {
    const int trial = trial_ids.empty() ? static_cast<int>(k) : trial_ids[k];
    const RunRecord& record = result.trials[k];
    for (size_t t = 0; t < record.rounds.size(); ++t) {
      const RoundRecord& r = record.rounds[t];
      out += std::to_string(trial) + "," + std::to_string(t + 1) + "," +
             std::to_string(r.action_id) + "," + std::to_string(r.reward) + "," +
             FormatDouble(r.inst_regret) + "," + FormatDouble(r.cum_regret) + "," +
             FormatDouble(r.beta_half) + "\n";
    }
  }
  return out;
}

std::string SummaryCsv(const ExperimentResult& result) {
  std::string out =
      "cell,regime,alpha,beta_priv,trials,mean_final_regret,std_final_regret,"
      "epsilon_hat\n";
  for (const CellResult& c : result.cells) {
    const bool priv = c.cell.regime != Regime::kNonPrivate;
    const double eps =
        c.trials.empty() ? 0.0 : c.trials.front().certificate.measured;
    out += c.cell.name() + "," + std::string(RegimeName(c.cell.regime)) + "," +
           (priv ? FormatDouble(c.cell.alpha) : "") + "," +
           (priv ? FormatDouble(c.cell.beta_priv) : "") + "," +
           std::to_string(c.trials.size()) + "," + FormatDouble(c.MeanFinalRegret()) +
           "," + FormatDouble(c.StdFinalRegret()) + "," + FormatDouble(eps) + "\n";
  }
  return out;
}

std::string RegretSvg(const ExperimentResult& result, std::string_view title) {
  constexpr double kWidth = 720, kHeight = 480;
  constexpr double kLeft = 70, kRight = 200, kTop = 40, kBottom = 50;
  constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                     "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                     "#bcbd22", "#17becf"};
  std::vector<std::vector<double>> curves;
  size_t rounds = 1;
  double y_max = 1e-12;
  for (const CellResult& c : result.cells) {
    curves.push_back(c.MeanCurve());
    rounds = std::max(rounds, curves.back().size());
    for (double v : curves.back()) y_max = std::max(y_max, v);
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + plot_w * t / std::max<double>(1, rounds); };
  auto py = [&](double v) { return kTop + plot_h * (1.0 - v / y_max); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" "
      << "font-size=\"16\">";
  for (char ch : title) {
    if (ch == '<') svg << "&lt;";
    else if (ch == '>') svg << "&gt;";
    else if (ch == '&') svg << "&amp;";
    else svg << ch;
  }
  svg << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    const double t = static_cast<double>(rounds) * i / 4.0;
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << ShortDouble(std::round(v * 10) / 10) << "</text>\n";
    svg << "<text x=\"" << px(t) << "\" y=\"" << kTop + plot_h + 16
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << ShortDouble(std::round(t)) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
      << "round</text>\n";
  svg << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << kTop + plot_h / 2
      << ")\">mean cumulative regret</text>\n";

  for (size_t s = 0; s < curves.size(); ++s) {
    const std::vector<double>& curve = curves[s];
    const std::string name = result.cells[s].cell.name();
    const char* color = kColors[s % std::size(kColors)];
    const size_t stride = std::max<size_t>(1, curve.size() / 512);
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" data-source=\"" << name << ".csv\" points=\"";
    for (size_t t = 0; t < curve.size(); t += stride) {
      svg << px(t + 1) << "," << py(curve[t]) << " ";
    }
    if (!curve.empty()) svg << px(curve.size()) << "," << py(curve.back());
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * (s + 1);
    svg << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << ly - 4
        << "\" x2=\"" << kLeft + plot_w + 32 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w + 36 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void WriteOutputs(const ExperimentSpec& spec, const ExperimentResult& result,
                  const std::filesystem::path& dir,
                  const std::vector<int>& trial_ids) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             ": " + ec.message());
  }
  for (const CellResult& c : result.cells) {
    WriteFile(dir / (c.cell.name() + ".csv"), CellCsv(c, trial_ids));
  }
  WriteFile(dir / "summary.csv", SummaryCsv(result));
  WriteFile(dir / "regret.svg", RegretSvg(result, "Mean cumulative regret"));
  WriteFile(dir / "config.txt", SerializeConfig(spec));
}

}  // namespace privgp
