#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <json.hpp>

#include "tedkit/matrix.hpp"

namespace tedkit {

// Row-wise argmax; ties go to the lowest class id.
std::vector<int> argmax_rows(const Matrix& scores);

// Common fit/predict contract for the two learners. Class ids must be dense
// 0..K-1 at fit time; predictions are always ids seen in fit. Fitted models
// are immutable and safe for concurrent prediction.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void fit(const Matrix& x, const std::vector<int>& y, std::uint64_t seed) = 0;
  virtual Matrix predict_proba(const Matrix& x) const = 0;
  std::vector<int> predict(const Matrix& x) const { return argmax_rows(predict_proba(x)); }

  virtual std::size_t class_count() const = 0;
  virtual std::size_t feature_count() const = 0;
  virtual nlohmann::json to_json() const = 0;
};

// Builds a fresh, unfitted learner; the harness seeds it at fit time.
using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

}  // namespace tedkit
