#include "tedkit/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "tedkit/errors.hpp"
#include "tedkit/rng.hpp"

namespace tedkit {
namespace {

void check_training_input(const Matrix& x, const std::vector<int>& y) {
  if (x.rows() == 0) throw std::invalid_argument("fit: empty training set");
  if (x.rows() != y.size()) {
    throw std::invalid_argument("fit: " + std::to_string(x.rows()) + " rows vs " +
                                std::to_string(y.size()) + " labels");
  }
}

std::size_t dense_class_count(const std::vector<int>& y) {
  int max_id = -1;
  for (int id : y) {
    if (id < 0) throw std::invalid_argument("fit: negative class id");
    max_id = std::max(max_id, id);
  }
  std::vector<bool> seen(max_id + 1, false);
  for (int id : y) seen[id] = true;
  for (int id = 0; id <= max_id; ++id) {
    if (!seen[id]) {
      throw std::invalid_argument("fit: class ids not dense, id " + std::to_string(id) +
                                  " unused");
    }
  }
  return static_cast<std::size_t>(max_id) + 1;
}

struct SplitCandidate {
  bool found = false;
  double score = -std::numeric_limits<double>::infinity();  // higher is purer
  int feature = -1;
  double threshold = 0.0;
};

// Grows one CART tree over a bootstrap index multiset.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<int>& y, std::size_t classes,
              const ForestConfig& config, std::uint64_t seed)
      : x_(x),
        y_(y),
        classes_(classes),
        min_leaf_(config.min_samples_leaf),
        mtry_(std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols()))))),
        rng_(make_rng(seed)) {
    indices_.resize(x_.rows());
    if (config.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, x_.rows() - 1);
      for (auto& i : indices_) i = pick(rng_);
    } else {
      std::iota(indices_.begin(), indices_.end(), 0);
    }
    feature_order_.resize(x_.cols());
    std::iota(feature_order_.begin(), feature_order_.end(), 0);
  }

  DecisionTree build() {
    DecisionTree tree;
    grow(tree, 0, indices_.size());
    return tree;
  }

 private:
  std::vector<std::uint32_t> tally(std::size_t begin, std::size_t end) const {
    std::vector<std::uint32_t> counts(classes_, 0);
    for (std::size_t i = begin; i < end; ++i) ++counts[y_[indices_[i]]];
    return counts;
  }

  // Best Gini split of [begin, end) on one feature, honoring min_leaf on
  // both children. Score is sum of squared class counts over child sizes
  // (equivalent to minimizing weighted Gini impurity).
  SplitCandidate best_split_on(int feature, std::size_t begin, std::size_t end) {
    std::size_t n = end - begin;
    values_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t row = indices_[begin + i];
      values_[i] = {x_.at(row, feature), y_[row]};
    }
    std::sort(values_.begin(), values_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    SplitCandidate best;
    if (values_.front().first == values_.back().first) return best;

    left_counts_.assign(classes_, 0);
    right_counts_ = tally(begin, end);
    double left_sq = 0.0;
    double right_sq = 0.0;
    for (std::uint32_t c : right_counts_) right_sq += static_cast<double>(c) * c;

    for (std::size_t pos = 0; pos + 1 < n; ++pos) {
      int cls = values_[pos].second;
      left_sq += 2.0 * left_counts_[cls] + 1.0;
      right_sq -= 2.0 * right_counts_[cls] - 1.0;
      ++left_counts_[cls];
      --right_counts_[cls];

      if (values_[pos + 1].first == values_[pos].first) continue;
      std::size_t left_n = pos + 1;
      std::size_t right_n = n - left_n;
      if (left_n < min_leaf_ || right_n < min_leaf_) continue;

      double score = left_sq / static_cast<double>(left_n) +
                     right_sq / static_cast<double>(right_n);
      if (!best.found || score > best.score) {
        double lo = values_[pos].first;
        double hi = values_[pos + 1].first;
        double threshold = (lo + hi) / 2.0;
        if (threshold >= hi) threshold = lo;  // adjacent doubles
        best = {true, score, feature, threshold};
      }
    }
    return best;
  }

  int grow(DecisionTree& tree, std::size_t begin, std::size_t end) {
    int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    auto counts = tally(begin, end);
    bool pure = std::count_if(counts.begin(), counts.end(),
                              [](std::uint32_t c) { return c > 0; }) <= 1;
    std::size_t n = end - begin;

    SplitCandidate best;
    if (!pure && n >= 2 * min_leaf_) {
      std::shuffle(feature_order_.begin(), feature_order_.end(), rng_);
      std::size_t usable = 0;
      for (int feature : feature_order_) {
        SplitCandidate cand = best_split_on(feature, begin, end);
        if (!cand.found) continue;  // keep searching past constant features
        ++usable;
        if (cand.score > best.score || !best.found) best = cand;
        if (usable >= mtry_) break;
      }
    }

    if (!best.found) {
      tree.nodes[id].class_counts = std::move(counts);
      return id;
    }

    auto mid_it = std::partition(
        indices_.begin() + begin, indices_.begin() + end,
        [&](std::size_t row) { return x_.at(row, best.feature) <= best.threshold; });
    std::size_t mid = static_cast<std::size_t>(mid_it - indices_.begin());

    tree.nodes[id].feature = best.feature;
    tree.nodes[id].threshold = best.threshold;
    int left = grow(tree, begin, mid);
    int right = grow(tree, mid, end);
    tree.nodes[id].left = left;
    tree.nodes[id].right = right;
    return id;
  }

  const Matrix& x_;
  const std::vector<int>& y_;
  std::size_t classes_;
  std::size_t min_leaf_;
  std::size_t mtry_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> indices_;
  std::vector<int> feature_order_;
  std::vector<std::pair<double, int>> values_;
  std::vector<std::uint32_t> left_counts_;
  std::vector<std::uint32_t> right_counts_;
};

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    node = row[node->feature] <= node->threshold ? &nodes[node->left] : &nodes[node->right];
  }
  return *node;
}

ForestClassifier::ForestClassifier(ForestConfig config) : config_(config) {
  if (config_.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
  if (config_.min_samples_leaf < 1) throw std::invalid_argument("min_samples_leaf must be >= 1");
}

void ForestClassifier::fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) {
  check_training_input(x, y);
  class_count_ = dense_class_count(y);
  feature_count_ = x.cols();
  trees_.assign(config_.n_trees, {});

  std::size_t workers = config_.n_threads ? config_.n_threads
                                          : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config_.n_trees);

  auto grow_tree = [&](std::size_t t) {
    TreeBuilder builder(x, y, class_count_, config_, substream_seed(seed, t));
    trees_[t] = builder.build();
  };

  if (workers <= 1) {
    for (std::size_t t = 0; t < config_.n_trees; ++t) grow_tree(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t t = next.fetch_add(1); t < config_.n_trees; t = next.fetch_add(1)) {
        grow_tree(t);
      }
    });
  }
  for (auto& worker : pool) worker.join();
}

Matrix ForestClassifier::predict_proba(const Matrix& x) const {
  if (trees_.empty()) throw state_error("forest: predict before fit");
  if (x.cols() != feature_count_) {
    throw std::invalid_argument("forest: expected " + std::to_string(feature_count_) +
                                " features, got " + std::to_string(x.cols()));
  }
  Matrix proba(x.rows(), class_count_);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* out = proba.row(i).data();
    for (const auto& tree : trees_) {
      const auto& counts = tree.leaf_for(x.row(i)).class_counts;
      double total = 0.0;
      for (std::uint32_t c : counts) total += c;
      for (std::size_t k = 0; k < class_count_; ++k) out[k] += counts[k] / total;
    }
    for (std::size_t k = 0; k < class_count_; ++k) out[k] /= static_cast<double>(trees_.size());
  }
  return proba;
}

std::size_t ForestClassifier::min_leaf_size() const {
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (const auto& tree : trees_) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) continue;
      std::size_t total = 0;
      for (std::uint32_t c : node.class_counts) total += c;
      smallest = std::min(smallest, total);
    }
  }
  return smallest;
}

nlohmann::json ForestClassifier::to_json() const {
  if (trees_.empty()) throw state_error("forest: serialize before fit");
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json feature = nlohmann::json::array();
    nlohmann::json threshold = nlohmann::json::array();
    nlohmann::json left = nlohmann::json::array();
    nlohmann::json right = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      counts.push_back(node.class_counts);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"counts", counts}});
  }
  return {{"type", "forest"},
          {"classes", class_count_},
          {"features", feature_count_},
          {"config",
           {{"n_trees", config_.n_trees},
            {"min_samples_leaf", config_.min_samples_leaf},
            {"bootstrap", config_.bootstrap}}},
          {"trees", trees}};
}

std::unique_ptr<ForestClassifier> ForestClassifier::from_json(const nlohmann::json& j) {
  try {
    ForestConfig config;
    config.n_trees = j.at("config").at("n_trees").get<std::size_t>();
    config.min_samples_leaf = j.at("config").at("min_samples_leaf").get<std::size_t>();
    config.bootstrap = j.at("config").at("bootstrap").get<bool>();
    auto model = std::make_unique<ForestClassifier>(config);
    model->class_count_ = j.at("classes").get<std::size_t>();
    model->feature_count_ = j.at("features").get<std::size_t>();

    for (const auto& jt : j.at("trees")) {
      DecisionTree tree;
      auto feature = jt.at("feature").get<std::vector<int>>();
      auto threshold = jt.at("threshold").get<std::vector<double>>();
      auto left = jt.at("left").get<std::vector<int>>();
      auto right = jt.at("right").get<std::vector<int>>();
      auto counts = jt.at("counts").get<std::vector<std::vector<std::uint32_t>>>();
      std::size_t n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n ||
          counts.size() != n || n == 0) {
        throw format_error("forest json: inconsistent node arrays");
      }
      tree.nodes.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto& node = tree.nodes[i];
        node.feature = feature[i];
        node.threshold = threshold[i];
        node.left = left[i];
        node.right = right[i];
        node.class_counts = counts[i];
        if (node.is_leaf()) {
          if (node.class_counts.size() != model->class_count_) {
            throw format_error("forest json: leaf count width mismatch");
          }
        } else if (node.left < 0 || node.right < 0 ||
                   node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n)) {
          throw format_error("forest json: child index out of range");
        }
      }
      model->trees_.push_back(std::move(tree));
    }
    if (model->trees_.empty()) throw format_error("forest json: no trees");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("forest json: ") + e.what());
  }
}

}  // namespace tedkit
