#include "tedkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tedkit/errors.hpp"

namespace tedkit {
namespace {

// Shortest representation that parses back to the same double.
std::string format_value(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_value(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw format_error("csv line " + std::to_string(line_no) + ": not a number: '" +
                       std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

int intern(std::string_view name, std::vector<std::string>& names,
           std::unordered_map<std::string, int>& ids) {
  auto it = ids.find(std::string(name));
  if (it != ids.end()) return it->second;
  int id = static_cast<int>(names.size());
  names.emplace_back(name);
  ids.emplace(name, id);
  return id;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> feature_names, bool with_explanations)
    : feature_names_(std::move(feature_names)),
      has_explanations_(with_explanations),
      features_(0, feature_names_.size()) {
  for (const auto& name : feature_names_) {
    if (name.empty() || name == "label" || name == "explanation") {
      throw std::invalid_argument("invalid feature column name: '" + name + "'");
    }
    if (name.find(',') != std::string::npos) {
      throw std::invalid_argument("feature name may not contain a comma: '" + name + "'");
    }
  }
}

void Dataset::add(std::span<const double> features, std::string_view label,
                  std::string_view explanation) {
  if (features.size() != feature_count()) {
    throw std::invalid_argument("instance has " + std::to_string(features.size()) +
                                " features, dataset expects " +
                                std::to_string(feature_count()));
  }
  if (has_explanations_ == explanation.empty()) {
    throw std::invalid_argument(has_explanations_
                                    ? "instance without explanation added to a TED dataset"
                                    : "explanation added to a baseline dataset");
  }
  features_.append_row(features);
  labels_.push_back(intern(label, label_names_, label_ids_));
  if (has_explanations_) {
    explanations_.push_back(intern(explanation, explanation_names_, explanation_ids_));
  }
}

LabeledInstance Dataset::instance(std::size_t i) const {
  if (i >= size()) throw std::invalid_argument("instance index out of range");
  LabeledInstance inst;
  inst.features = features_.row(i);
  inst.label = labels_[i];
  if (has_explanations_) inst.explanation = explanations_[i];
  return inst;
}

Dataset Dataset::without_explanations() const {
  Dataset out(feature_names_, false);
  out.features_ = features_;
  out.labels_ = labels_;
  out.label_names_ = label_names_;
  out.label_ids_ = label_ids_;
  out.task_ = task_;
  out.generator_seed_ = generator_seed_;
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(feature_names_, has_explanations_);
  out.label_names_ = label_names_;
  out.label_ids_ = label_ids_;
  out.explanation_names_ = explanation_names_;
  out.explanation_ids_ = explanation_ids_;
  out.task_ = task_;
  out.generator_seed_ = generator_seed_;
  for (std::size_t i : indices) {
    if (i >= size()) throw std::invalid_argument("subset index out of range");
    out.features_.append_row(features_.row(i));
    out.labels_.push_back(labels_[i]);
    if (has_explanations_) out.explanations_.push_back(explanations_[i]);
  }
  return out;
}

nlohmann::json Dataset::summary() const {
  nlohmann::json j;
  j["instances"] = size();
  j["feature_count"] = feature_count();
  j["has_explanations"] = has_explanations_;
  if (!task_.empty()) j["task"] = task_;

  nlohmann::json label_counts = nlohmann::json::object();
  std::vector<std::size_t> tally(label_names_.size(), 0);
  for (int id : labels_) ++tally[id];
  for (std::size_t i = 0; i < label_names_.size(); ++i) label_counts[label_names_[i]] = tally[i];
  j["label_counts"] = label_counts;

  if (has_explanations_) {
    nlohmann::json expl_counts = nlohmann::json::object();
    std::vector<std::size_t> etally(explanation_names_.size(), 0);
    for (int id : explanations_) ++etally[id];
    for (std::size_t i = 0; i < explanation_names_.size(); ++i) {
      expl_counts[explanation_names_[i]] = etally[i];
    }
    j["explanation_counts"] = expl_counts;

    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) pairs.emplace_back(labels_[i], explanations_[i]);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    j["distinct_pairs"] = pairs.size();
  }
  return j;
}

void Dataset::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path.string());

  if (!task_.empty() || generator_seed_) {
    out << '#';
    if (!task_.empty()) out << " task=" << task_;
    if (generator_seed_) out << " seed=" << *generator_seed_;
    out << '\n';
  }
  for (std::size_t c = 0; c < feature_names_.size(); ++c) {
    if (c) out << ',';
    out << feature_names_[c];
  }
  out << ",label";
  if (has_explanations_) out << ",explanation";
  out << '\n';

  for (std::size_t i = 0; i < size(); ++i) {
    auto row = features_.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_value(row[c]);
    }
    out << ',' << label_names_[labels_[i]];
    if (has_explanations_) out << ',' << explanation_names_[explanations_[i]];
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path.string());
}

Dataset Dataset::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::string task;
  std::optional<std::uint64_t> seed;

  // Leading comment lines carry generator metadata as key=value tokens.
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] != '#') break;
    std::istringstream tokens(line.substr(1));
    std::string token;
    while (tokens >> token) {
      if (token.starts_with("task=")) task = token.substr(5);
      if (token.starts_with("seed=")) seed = std::stoull(token.substr(5));
    }
  }
  if (line.empty() || line[0] == '#') throw format_error("csv has no header row: " + path.string());

  auto header = split_fields(line);
  int label_col = -1;
  int explanation_col = -1;
  std::vector<std::string> feature_names;
  std::vector<int> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "label") {
      if (label_col >= 0) throw format_error("duplicate label column");
      label_col = static_cast<int>(c);
    } else if (header[c] == "explanation") {
      if (explanation_col >= 0) throw format_error("duplicate explanation column");
      explanation_col = static_cast<int>(c);
    } else {
      feature_names.push_back(header[c]);
      feature_cols.push_back(static_cast<int>(c));
    }
  }
  if (label_col < 0) throw format_error("csv has no label column: " + path.string());

  Dataset out(std::move(feature_names), explanation_col >= 0);
  if (!task.empty()) out.set_task(task);
  if (seed) out.set_generator_seed(*seed);

  std::vector<double> row(feature_cols.size());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw format_error("csv line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < feature_cols.size(); ++c) {
      row[c] = parse_value(fields[feature_cols[c]], line_no);
    }
    out.add(row, fields[label_col],
            explanation_col >= 0 ? std::string_view(fields[explanation_col]) : std::string_view());
  }
  return out;
}

}  // namespace tedkit
