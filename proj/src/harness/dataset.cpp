#include "evfusion/harness/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "evfusion/error.hpp"
#include "evfusion/fusion.hpp"

namespace evfusion::harness {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::Io, fmt::format("failed writing '{}'", path.string()));
}

DefinitionFile load_definitions(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_definitions(text);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), e.position(), fmt::format("{}: {}", path.string(), e.detail()));
  }
}

namespace {

std::vector<double> to_probs(const json& j, std::string_view feature) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidConfig, fmt::format("'{}' must be an array", feature));
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidConfig, fmt::format("'{}' holds a non-number", feature));
    out.push_back(v.get<double>());
  }
  return out;
}

// A completed copy of `space` is shared by every report that needs one, so
// reports on one feature point at one space object.
struct SpaceForms {
  EventSpacePtr declared;
  EventSpacePtr completed;
};

ProbReport normalized(const std::vector<double>& raw, const SpaceForms& forms, bool force_complement) {
  const auto& space = *forms.declared;
  if (force_complement || raw.size() == space.declared_size() + 1) {
    return normalize_report(raw, forms.completed);
  }
  auto r = normalize_report(raw, forms.declared);
  if (r.space().has_complement()) return ProbReport(forms.completed, {r.probs().begin(), r.probs().end()});
  return r;
}

}  // namespace

Dataset parse_reports_json(std::string_view text, const std::vector<EventSpacePtr>* defs_spaces) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("reports JSON: {}", e.what()));
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw Error(ErrorKind::InvalidConfig, "reports JSON needs a \"samples\" array");
  }

  Dataset ds;
  if (doc.contains("spaces")) {
    for (const auto& s : doc["spaces"]) {
      const auto feature = s.at("feature").get<std::string>();
      const auto sensor = s.value("sensor", std::string{});
      std::vector<Event> events;
      for (const auto& e : s.at("events")) events.push_back({e.get<std::string>(), std::nullopt});
      if (defs_spaces) {
        auto it = std::find_if(defs_spaces->begin(), defs_spaces->end(),
                               [&](const EventSpacePtr& d) { return d->feature_id() == feature; });
        if (it == defs_spaces->end()) {
          throw Error(ErrorKind::LabelMismatch, fmt::format("feature '{}' is not in the definitions", feature));
        }
        std::vector<std::string> labels;
        for (const auto& e : events) labels.push_back(e.label);
        if ((*it)->labels() != labels) {
          throw Error(ErrorKind::LabelMismatch, fmt::format("events of feature '{}' differ from the definitions", feature));
        }
        ds.spaces.push_back(*it);
      } else {
        ds.spaces.push_back(std::make_shared<const EventSpace>(feature, sensor, std::move(events)));
      }
      if (s.contains("merge_weights")) ds.merge_weights[feature] = s["merge_weights"].get<std::vector<double>>();
    }
  } else if (defs_spaces) {
    ds.spaces = *defs_spaces;
  } else {
    throw Error(ErrorKind::InvalidConfig, "reports JSON without \"spaces\" needs definitions");
  }

  std::vector<SpaceForms> forms;
  for (const auto& s : ds.spaces) forms.push_back({s, std::make_shared<const EventSpace>(s->with_complement())});

  for (const auto& sample : doc["samples"]) {
    if (!sample.is_object()) throw Error(ErrorKind::InvalidConfig, "each sample must be an object");
    std::vector<ProbReport> reports;
    for (std::size_t k = 0; k < ds.spaces.size(); ++k) {
      const auto& id = ds.spaces[k]->feature_id();
      if (!sample.contains(id)) {
        throw Error(ErrorKind::InvalidConfig, fmt::format("sample {} lacks feature '{}'", ds.samples.size(), id));
      }
      const json& entry = sample[id];
      const auto weights = ds.merge_weights.find(id);
      if (weights == ds.merge_weights.end()) {
        reports.push_back(normalized(to_probs(entry, id), forms[k], false));
        continue;
      }
      if (!entry.is_array() || entry.size() != weights->second.size()) {
        throw Error(ErrorKind::InvalidConfig,
                    fmt::format("feature '{}' expects {} sensor reports", id, weights->second.size()));
      }
      std::vector<std::vector<double>> raws;
      bool any_short = false;
      for (const auto& r : entry) {
        raws.push_back(to_probs(r, id));
        const double s = std::accumulate(raws.back().begin(), raws.back().end(), 0.0);
        any_short = any_short || (raws.back().size() == ds.spaces[k]->declared_size() && s < 1.0 - kProbTolerance);
      }
      ProbReport merged = normalized(raws[0], forms[k], any_short);
      double acc_weight = weights->second[0];
      for (std::size_t j = 1; j < raws.size(); ++j) {
        merged = merge_duplicate_feature(merged, normalized(raws[j], forms[k], any_short),
                                         {acc_weight, weights->second[j]});
        acc_weight += weights->second[j];
      }
      reports.push_back(std::move(merged));
    }
    ds.samples.push_back(std::move(reports));
  }
  // Once one sample leaves mass unassigned, the whole feature carries the
  // complement so every sample shares a shape.
  for (std::size_t k = 0; k < forms.size(); ++k) {
    const bool any_completed = std::any_of(ds.samples.begin(), ds.samples.end(), [&](const auto& sample) {
      return sample[k].space_ptr() == forms[k].completed;
    });
    if (!any_completed) continue;
    for (auto& sample : ds.samples) {
      if (sample[k].space_ptr() == forms[k].completed) continue;
      std::vector<double> probs(sample[k].probs().begin(), sample[k].probs().end());
      probs.push_back(0.0);
      sample[k] = ProbReport(forms[k].completed, std::move(probs));
    }
  }
  return ds;
}

std::string to_reports_json(const Dataset& dataset) {
  json doc;
  doc["spaces"] = json::array();
  for (const auto& s : dataset.spaces) {
    json js{{"feature", s->feature_id()}, {"sensor", s->sensor_id()}, {"events", json::array()}};
    for (std::size_t i = 0; i < s->declared_size(); ++i) js["events"].push_back(s->events()[i].label);
    doc["spaces"].push_back(std::move(js));
  }
  doc["samples"] = json::array();
  for (const auto& sample : dataset.samples) {
    json js = json::object();
    for (const auto& r : sample) js[r.space().feature_id()] = std::vector<double>(r.probs().begin(), r.probs().end());
    doc["samples"].push_back(std::move(js));
  }
  return doc.dump(1) + "\n";
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      std::string_view f = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
      while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
      fields.emplace_back(f);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

namespace {

double parse_number(const std::string& s, std::size_t row) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("row {}: '{}' is not a number", row, s));
  }
  return v;
}

}  // namespace

std::vector<std::string> parse_labels_csv(std::string_view text, std::size_t expected_samples) {
  const auto rows = split_csv(text);
  if (rows.empty()) throw Error(ErrorKind::InvalidConfig, "empty labels file");
  std::vector<std::string> labels(expected_samples);
  std::vector<bool> seen(expected_samples, false);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw Error(ErrorKind::InvalidConfig, fmt::format("labels row {} needs 2 fields", r));
    const double idx = parse_number(rows[r][0], r);
    if (idx < 0 || idx != static_cast<double>(static_cast<std::size_t>(idx)) ||
        static_cast<std::size_t>(idx) >= expected_samples) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("labels row {}: bad sample index '{}'", r, rows[r][0]));
    }
    const auto i = static_cast<std::size_t>(idx);
    if (seen[i]) throw Error(ErrorKind::InvalidConfig, fmt::format("sample {} labelled twice", i));
    seen[i] = true;
    labels[i] = rows[r][1];
  }
  for (std::size_t i = 0; i < expected_samples; ++i) {
    if (!seen[i]) throw Error(ErrorKind::InvalidConfig, fmt::format("sample {} has no label", i));
  }
  return labels;
}

std::string to_labels_csv(const std::vector<std::string>& labels) {
  std::string out = "sample_index,class_label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out += fmt::format("{},{}\n", i, labels[i]);
  return out;
}

FeatureTable parse_feature_csv(std::string_view text) {
  const auto rows = split_csv(text);
  if (rows.empty()) throw Error(ErrorKind::InvalidConfig, "empty feature file");
  FeatureTable t;
  t.names = rows[0];
  t.columns.assign(t.names.size(), {});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != t.names.size()) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("feature row {} has {} fields", r, rows[r].size()));
    }
    for (std::size_t c = 0; c < t.names.size(); ++c) t.columns[c].push_back(parse_number(rows[r][c], r));
  }
  return t;
}

std::string to_feature_csv(const FeatureTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.names.size(); ++c) out += (c ? "," : "") + table.names[c];
  out += "\n";
  const std::size_t n = table.columns.empty() ? 0 : table.columns.front().size();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out += fmt::format("{}{:.17g}", c ? "," : "", table.columns[c][r]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace evfusion::harness
