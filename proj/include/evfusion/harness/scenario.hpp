#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "evfusion/harness/dataset.hpp"
#include "evfusion/model.hpp"

namespace evfusion::harness {

struct ClassSpec {
  std::string label;
  double prior = 0.0;
  /// Latent mean and spread per feature, in ScenarioConfig::spaces order.
  std::vector<double> mean;
  std::vector<double> spread;
};

/// Synthetic labelled scenario. Each sample draws a class by prior, a latent
/// feature vector mean + spread * z with z ~ N(0, correlation), and turns each
/// feature value into soft event probabilities: an event [u, v) gets
/// sigmoid((x - u) / s) * sigmoid((v - x) / s), s being the feature softness.
struct ScenarioConfig {
  std::vector<EventSpacePtr> spaces;
  std::vector<double> softness;
  std::vector<ClassSpec> classes;
  std::vector<std::vector<double>> correlation;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// JSON form:
///   {"defs": "dataset1.defs",            // relative to the config file
///    "n_samples": 2000, "seed": 42,
///    "features": [{"id": "v", "softness": 1.5}, ...],
///    "correlation": 0.9 | [[1, 0.9, ...], ...],
///    "classes": [{"label": "o1", "prior": 0.4545,
///                 "mean": {"v": 25, ...}, "spread": {"v": 6, ...}}, ...]}
/// A scalar correlation means that value on every off-diagonal entry.
ScenarioConfig parse_scenario_config(std::string_view json_text, const std::filesystem::path& base_dir);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Labelled dataset with latent feature columns. Sample i depends only on
/// (seed, i).
Dataset generate_scenario(const ScenarioConfig& cfg);

}  // namespace evfusion::harness
