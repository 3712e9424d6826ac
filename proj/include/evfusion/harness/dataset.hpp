#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "evfusion/defs.hpp"
#include "evfusion/model.hpp"

namespace evfusion::harness {

/// Per-sample reports over a fixed list of feature spaces.
struct Dataset {
  /// Declared spaces, one per feature, in report order.
  std::vector<EventSpacePtr> spaces;
  /// Weights used to merge several reports of the same feature, keyed by
  /// feature id (only for features reported by more than one sensor).
  std::map<std::string, std::vector<double>> merge_weights;
  /// samples[i][k] is the normalised report on spaces[k] for sample i.
  std::vector<std::vector<ProbReport>> samples;
  /// Class label per sample; empty when unlabelled.
  std::vector<std::string> labels;
  /// Raw feature values, one column per feature; empty when unavailable.
  std::vector<std::vector<double>> features;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Reads and parses a definition file. Parse errors keep their kind and
/// position; the message gains the path.
DefinitionFile load_definitions(const std::filesystem::path& path);

/// Reports JSON:
///   {"spaces":  [{"feature": "v", "sensor": "radar", "events": ["a1_v", "a2_v"],
///                 "merge_weights": [0.8, 0.6]}, ...],
///    "samples": [{"v": [0.6, 0.3], ...}, ...]}
/// A sample entry holds the declared-event probabilities (optionally followed
/// by the complement mass), or, for a feature with "merge_weights", one such
/// array per contributing sensor. "spaces" may be omitted when `defs_spaces`
/// is given; when both are present their event labels must agree.
Dataset parse_reports_json(std::string_view text, const std::vector<EventSpacePtr>* defs_spaces = nullptr);
std::string to_reports_json(const Dataset& dataset);

/// Labels CSV with header "sample_index,class_label".
std::vector<std::string> parse_labels_csv(std::string_view text, std::size_t expected_samples);
std::string to_labels_csv(const std::vector<std::string>& labels);

/// Feature CSV: a header of feature ids, then one numeric row per sample.
/// Returns one column per header field.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};
FeatureTable parse_feature_csv(std::string_view text);
std::string to_feature_csv(const FeatureTable& table);

/// Splits CSV text into trimmed fields per non-empty line.
std::vector<std::vector<std::string>> split_csv(std::string_view text);

}  // namespace evfusion::harness
