#include "evfusion/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <json.hpp>

#include "evfusion/defs.hpp"
#include "evfusion/error.hpp"

namespace evfusion::harness {

using nlohmann::json;

namespace {

double sigmoid(double t) { return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

// Symmetric square root of a PSD correlation matrix; throws if not PSD.
Eigen::MatrixXd correlation_factor(const std::vector<std::vector<double>>& corr) {
  const auto n = static_cast<Eigen::Index>(corr.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = corr[i][j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const auto& values = eig.eigenvalues();
  if (values.minCoeff() < -1e-10) {
    throw Error(ErrorKind::NotPositiveSemidefinite,
                fmt::format("correlation matrix has eigenvalue {:.6g}", values.minCoeff()));
  }
  const Eigen::VectorXd roots = values.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal();
}

}  // namespace

void ScenarioConfig::validate() const {
  const std::size_t f = spaces.size();
  if (f == 0) throw Error(ErrorKind::InvalidConfig, "scenario has no features");
  if (n_samples < 1) throw Error(ErrorKind::InvalidConfig, "n_samples must be at least 1");
  if (softness.size() != f) throw Error(ErrorKind::InvalidConfig, "one softness per feature expected");
  for (double s : softness) {
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidConfig, "softness must be positive");
  }
  if (classes.empty()) throw Error(ErrorKind::InvalidConfig, "scenario has no classes");
  double prior_sum = 0.0;
  for (const auto& c : classes) {
    if (!(c.prior >= 0.0)) throw Error(ErrorKind::InvalidConfig, fmt::format("class '{}' has a negative prior", c.label));
    if (c.mean.size() != f || c.spread.size() != f) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("class '{}' needs a mean and spread per feature", c.label));
    }
    for (double s : c.spread) {
      if (!(s >= 0.0)) throw Error(ErrorKind::InvalidConfig, fmt::format("class '{}' has a negative spread", c.label));
    }
    prior_sum += c.prior;
  }
  if (std::abs(prior_sum - 1.0) > 1e-6) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("class priors sum to {:.9g}", prior_sum));
  }
  if (correlation.size() != f) throw Error(ErrorKind::InvalidConfig, "correlation matrix has the wrong size");
  for (std::size_t i = 0; i < f; ++i) {
    if (correlation[i].size() != f) throw Error(ErrorKind::InvalidConfig, "correlation matrix is not square");
    if (std::abs(correlation[i][i] - 1.0) > 1e-12) throw Error(ErrorKind::InvalidConfig, "correlation diagonal must be 1");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(correlation[i][j] - correlation[j][i]) > 1e-12) {
        throw Error(ErrorKind::InvalidConfig, "correlation matrix is not symmetric");
      }
    }
  }
  correlation_factor(correlation);
}

ScenarioConfig parse_scenario_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  ScenarioConfig cfg;
  try {
    const json doc = json::parse(json_text);
    const auto defs = resolve(load_definitions(base_dir / doc.at("defs").get<std::string>()));
    cfg.n_samples = doc.at("n_samples").get<std::size_t>();
    cfg.seed = doc.value("seed", std::uint64_t{0});

    for (const auto& jf : doc.at("features")) {
      const auto id = jf.at("id").get<std::string>();
      auto it = std::find_if(defs.spaces.begin(), defs.spaces.end(),
                             [&](const EventSpacePtr& s) { return s->feature_id() == id; });
      if (it == defs.spaces.end()) throw Error(ErrorKind::InvalidConfig, fmt::format("feature '{}' not in defs", id));
      cfg.spaces.push_back(*it);
      cfg.softness.push_back(jf.value("softness", 1.0));
    }
    const std::size_t f = cfg.spaces.size();

    const json& jc = doc.at("correlation");
    if (jc.is_number()) {
      const double r = jc.get<double>();
      cfg.correlation.assign(f, std::vector<double>(f, r));
      for (std::size_t i = 0; i < f; ++i) cfg.correlation[i][i] = 1.0;
    } else {
      cfg.correlation = jc.get<std::vector<std::vector<double>>>();
    }

    for (const auto& jcl : doc.at("classes")) {
      ClassSpec c;
      c.label = jcl.at("label").get<std::string>();
      c.prior = jcl.at("prior").get<double>();
      for (const auto& s : cfg.spaces) {
        c.mean.push_back(jcl.at("mean").at(s->feature_id()).get<double>());
        c.spread.push_back(jcl.at("spread").at(s->feature_id()).get<double>());
      }
      cfg.classes.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("scenario config: {}", e.what()));
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  return parse_scenario_config(read_text_file(path), path.parent_path());
}

Dataset generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::size_t f = cfg.spaces.size();
  const Eigen::MatrixXd factor = correlation_factor(cfg.correlation);

  std::vector<double> priors;
  for (const auto& c : cfg.classes) priors.push_back(c.prior);

  std::vector<EventSpacePtr> completed;
  for (const auto& s : cfg.spaces) completed.push_back(std::make_shared<const EventSpace>(s->with_complement()));

  Dataset ds;
  ds.spaces = cfg.spaces;
  ds.features.assign(f, std::vector<double>(cfg.n_samples));
  ds.samples.reserve(cfg.n_samples);
  ds.labels.reserve(cfg.n_samples);

  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(std::uint64_t{i} >> 32)};
    std::mt19937_64 rng(seq);
    std::discrete_distribution<std::size_t> pick_class(priors.begin(), priors.end());
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto& cls = cfg.classes[pick_class(rng)];
    Eigen::VectorXd z(static_cast<Eigen::Index>(f));
    for (std::size_t k = 0; k < f; ++k) z(static_cast<Eigen::Index>(k)) = normal(rng);
    const Eigen::VectorXd correlated = factor * z;

    std::vector<ProbReport> reports;
    for (std::size_t k = 0; k < f; ++k) {
      const double x = cls.mean[k] + cls.spread[k] * correlated(static_cast<Eigen::Index>(k));
      ds.features[k][i] = x;
      const auto& space = *cfg.spaces[k];
      std::vector<double> probs;
      double total = 0.0;
      for (std::size_t e = 0; e < space.declared_size(); ++e) {
        const auto range = space.events()[e].range.value_or(Interval{-INFINITY, INFINITY});
        double p = 1.0;
        if (std::isfinite(range.lower)) p *= sigmoid((x - range.lower) / cfg.softness[k]);
        if (std::isfinite(range.upper)) p *= sigmoid((range.upper - x) / cfg.softness[k]);
        probs.push_back(p);
        total += p;
      }
      // Overlapping events can claim more than unit mass between them.
      if (total > 1.0) {
        for (double& p : probs) p /= total;
        total = 1.0;
      }
      probs.push_back(std::max(0.0, 1.0 - total));
      reports.push_back(normalize_report(probs, completed[k]));
    }
    ds.samples.push_back(std::move(reports));
    ds.labels.push_back(cls.label);
  }
  return ds;
}

}  // namespace evfusion::harness
