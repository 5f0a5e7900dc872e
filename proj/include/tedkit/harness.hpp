#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tedkit/classifier.hpp"
#include "tedkit/dataset.hpp"
#include "tedkit/pipeline.hpp"

namespace tedkit {

struct SplitSpec {
  double train_fraction = 0.9;
  std::uint64_t seed = 0;
};

// Seeded uniform shuffle, then the first floor(train_fraction * n) rows.
// The two halves partition the dataset and share its vocabularies.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitSpec& spec);

// Per-test-instance truth and prediction, kept in memory for audits.
struct PredictionRecord {
  int y_true = -1;
  int y_pred = -1;
  int e_true = -1;
  int e_pred = -1;
};

struct ExperimentReport {
  Mode mode = Mode::baseline;
  double y_accuracy = 0.0;
  std::optional<double> e_accuracy;
  std::optional<double> ye_accuracy;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  bool derived_y = false;
  std::vector<PredictionRecord> predictions;

  // Timing is volatile; exclude it when byte-stable output is needed.
  nlohmann::json to_json(bool include_runtime = true) const;
};

// Baseline protocol: split, fit on (X, Y), report test Y accuracy. The
// dataset must not carry explanations.
ExperimentReport run_baseline(const Dataset& dataset, const ClassifierFactory& make_learner,
                              const SplitSpec& spec);

// TED protocol: split, fit the codec on the training half only, learn the
// composite classes, decode test predictions into (Y, E) and score each
// side. With derive_y_from_e, Y is rescored from the predicted explanation
// through the codec's functional map.
ExperimentReport run_ted(const Dataset& dataset, const ClassifierFactory& make_learner,
                         const SplitSpec& spec, bool derive_y_from_e);

struct MetricStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

struct AggregateReport {
  Mode mode = Mode::baseline;
  std::vector<ExperimentReport> runs;  // in seed order
  MetricStats y;
  std::optional<MetricStats> e;
  std::optional<MetricStats> ye;

  nlohmann::json to_json(bool include_runtime = true) const;
};

// One experiment per seed (the seed drives both the split and the learner),
// aggregated into mean and sample standard deviation per metric. Requires at
// least two seeds.
AggregateReport run_repeated(const Dataset& dataset, const ClassifierFactory& make_learner,
                             Mode mode, std::span<const std::uint64_t> seeds,
                             bool derive_y_from_e = false);

}  // namespace tedkit
