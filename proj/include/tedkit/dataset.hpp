#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tedkit/matrix.hpp"

namespace tedkit {

// Row view over a dataset. `explanation` is empty for baseline data.
struct LabeledInstance {
  std::span<const double> features;
  int label = -1;
  std::optional<int> explanation;
};

// Columnar store of labeled instances. Label and explanation values are
// interned to dense ids in first-occurrence order; a dataset either carries
// an explanation for every instance or for none (no mixing).
class Dataset {
 public:
  Dataset(std::vector<std::string> feature_names, bool with_explanations);

  void add(std::span<const double> features, std::string_view label,
           std::string_view explanation = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t feature_count() const { return feature_names_.size(); }
  bool has_explanations() const { return has_explanations_; }

  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& explanations() const { return explanations_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  const std::vector<std::string>& explanation_names() const { return explanation_names_; }

  LabeledInstance instance(std::size_t i) const;

  // Generator metadata, persisted as a CSV header comment.
  const std::string& task() const { return task_; }
  void set_task(std::string task) { task_ = std::move(task); }
  std::optional<std::uint64_t> generator_seed() const { return generator_seed_; }
  void set_generator_seed(std::uint64_t seed) { generator_seed_ = seed; }

  // Copy with the explanation column removed.
  Dataset without_explanations() const;
  // Copy of the selected rows; shares the full vocabularies so ids stay
  // comparable across subsets of the same dataset.
  Dataset subset(std::span<const std::size_t> indices) const;

  // Instance/feature counts, per-class tallies and the distinct (Y,E) pair
  // count, as stable JSON.
  nlohmann::json summary() const;

  void write_csv(const std::filesystem::path& path) const;
  static Dataset read_csv(const std::filesystem::path& path);

 private:
  std::vector<std::string> feature_names_;
  bool has_explanations_ = false;
  Matrix features_;
  std::vector<int> labels_;
  std::vector<int> explanations_;
  std::vector<std::string> label_names_;
  std::vector<std::string> explanation_names_;
  std::unordered_map<std::string, int> label_ids_;
  std::unordered_map<std::string, int> explanation_ids_;
  std::string task_;
  std::optional<std::uint64_t> generator_seed_;
};

}  // namespace tedkit
