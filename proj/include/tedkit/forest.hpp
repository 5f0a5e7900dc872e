#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tedkit/classifier.hpp"
#include "tedkit/matrix.hpp"

namespace tedkit {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t min_samples_leaf = 5;
  bool bootstrap = true;
  // Features examined per split stay at floor(sqrt(feature_count)).
  std::size_t n_threads = 0;  // 0 = hardware concurrency
};

// Flat CART tree. Internal nodes route on feature <= threshold; leaves hold
// per-class training-sample counts (bootstrap multiplicity included).
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::uint32_t> class_counts;  // leaves only

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> row) const;
};

// Random forest of Gini-split CART trees on bootstrap resamples. Candidate
// thresholds are midpoints of adjacent distinct values; both children of any
// split keep at least min_samples_leaf samples. Trees may be grown in
// parallel; per-tree RNG streams are derived from the master seed by
// counter, so results do not depend on scheduling.
class ForestClassifier final : public Classifier {
 public:
  explicit ForestClassifier(ForestConfig config = {});

  void fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) override;
  Matrix predict_proba(const Matrix& x) const override;

  std::size_t class_count() const override { return class_count_; }
  std::size_t feature_count() const override { return feature_count_; }

  const ForestConfig& config() const { return config_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  // Smallest training-sample count over all leaves of all trees.
  std::size_t min_leaf_size() const;

  nlohmann::json to_json() const override;
  static std::unique_ptr<ForestClassifier> from_json(const nlohmann::json& j);

 private:
  ForestConfig config_;
  std::size_t class_count_ = 0;
  std::size_t feature_count_ = 0;
  std::vector<DecisionTree> trees_;
};

}  // namespace tedkit
