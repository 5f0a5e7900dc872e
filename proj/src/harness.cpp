#include "tedkit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "tedkit/codec.hpp"
#include "tedkit/errors.hpp"
#include "tedkit/rng.hpp"

namespace tedkit {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MetricStats stats_over(const std::vector<double>& values) {
  MetricStats s;
  double sum = std::accumulate(values.begin(), values.end(), 0.0);
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

}  // namespace

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must be in (0, 1)");
  }
  if (dataset.size() < 10) {
    throw std::invalid_argument("split: dataset has " + std::to_string(dataset.size()) +
                                " instances, need at least 10");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  // Nudge keeps exact products (0.9 * 4520) from flooring one short.
  auto train_n = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(dataset.size()) + 1e-9));
  std::span<const std::size_t> train_idx(order.data(), train_n);
  std::span<const std::size_t> test_idx(order.data() + train_n, dataset.size() - train_n);
  return {dataset.subset(train_idx), dataset.subset(test_idx)};
}

ExperimentReport run_baseline(const Dataset& dataset, const ClassifierFactory& make_learner,
                              const SplitSpec& spec) {
  if (dataset.has_explanations()) {
    throw state_error("baseline protocol expects a dataset without explanations");
  }
  auto start = Clock::now();
  auto [train, test] = split_dataset(dataset, spec);

  // Train on dense class ids over the labels the training half observed.
  std::vector<bool> observed(dataset.label_names().size(), false);
  for (int id : train.labels()) observed[id] = true;
  std::vector<int> to_class(observed.size(), -1);
  std::vector<int> to_label;
  for (std::size_t id = 0; id < observed.size(); ++id) {
    if (observed[id]) {
      to_class[id] = static_cast<int>(to_label.size());
      to_label.push_back(static_cast<int>(id));
    }
  }
  std::vector<int> targets(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) targets[i] = to_class[train.labels()[i]];

  auto learner = make_learner();
  learner->fit(train.features(), targets, spec.seed);
  std::vector<int> predictions = learner->predict(test.features());

  ExperimentReport report;
  report.mode = Mode::baseline;
  report.seed = spec.seed;
  std::size_t hits = 0;
  report.predictions.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    PredictionRecord rec;
    rec.y_true = test.labels()[i];
    rec.y_pred = to_label[predictions[i]];
    if (rec.y_pred == rec.y_true) ++hits;
    report.predictions.push_back(rec);
  }
  report.y_accuracy = static_cast<double>(hits) / static_cast<double>(test.size());
  report.runtime_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_ted(const Dataset& dataset, const ClassifierFactory& make_learner,
                         const SplitSpec& spec, bool derive_y_from_e) {
  if (!dataset.has_explanations()) {
    throw state_error("ted protocol expects a dataset with explanations");
  }
  auto start = Clock::now();
  auto [train, test] = split_dataset(dataset, spec);

  // The codec sees only the training half; unseen test pairs stay
  // unreachable and score as misses.
  CodecTable codec = fit_codec(train);
  if (derive_y_from_e && !codec.explanation_to_label) {
    throw state_error("derive_y_from_e: explanations do not determine labels");
  }
  std::vector<int> targets(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    targets[i] = encode(codec, train.labels()[i], train.explanations()[i]);
  }

  auto learner = make_learner();
  learner->fit(train.features(), targets, spec.seed);
  std::vector<int> predictions = learner->predict(test.features());

  ExperimentReport report;
  report.mode = Mode::ted;
  report.seed = spec.seed;
  report.derived_y = derive_y_from_e;
  std::size_t y_hits = 0;
  std::size_t e_hits = 0;
  std::size_t ye_hits = 0;
  report.predictions.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto [y_pred, e_pred] = decode(codec, predictions[i]);
    if (derive_y_from_e) y_pred = derive_label(codec, e_pred);
    PredictionRecord rec;
    rec.y_true = test.labels()[i];
    rec.y_pred = y_pred;
    rec.e_true = test.explanations()[i];
    rec.e_pred = e_pred;
    report.predictions.push_back(rec);
    bool y_ok = rec.y_pred == rec.y_true;
    bool e_ok = rec.e_pred == rec.e_true;
    if (y_ok) ++y_hits;
    if (e_ok) ++e_hits;
    if (y_ok && e_ok) ++ye_hits;
  }
  auto n = static_cast<double>(test.size());
  report.y_accuracy = y_hits / n;
  report.e_accuracy = e_hits / n;
  report.ye_accuracy = ye_hits / n;
  report.runtime_seconds = seconds_since(start);
  return report;
}

AggregateReport run_repeated(const Dataset& dataset, const ClassifierFactory& make_learner,
                             Mode mode, std::span<const std::uint64_t> seeds,
                             bool derive_y_from_e) {
  if (seeds.size() < 2) throw std::invalid_argument("run_repeated: need at least 2 seeds");

  AggregateReport aggregate;
  aggregate.mode = mode;
  for (std::uint64_t seed : seeds) {
    SplitSpec spec{0.9, seed};
    aggregate.runs.push_back(mode == Mode::baseline
                                 ? run_baseline(dataset, make_learner, spec)
                                 : run_ted(dataset, make_learner, spec, derive_y_from_e));
  }

  std::vector<double> y_values;
  std::vector<double> e_values;
  std::vector<double> ye_values;
  for (const auto& run : aggregate.runs) {
    y_values.push_back(run.y_accuracy);
    if (run.e_accuracy) e_values.push_back(*run.e_accuracy);
    if (run.ye_accuracy) ye_values.push_back(*run.ye_accuracy);
  }
  aggregate.y = stats_over(y_values);
  if (e_values.size() == aggregate.runs.size()) aggregate.e = stats_over(e_values);
  if (ye_values.size() == aggregate.runs.size()) aggregate.ye = stats_over(ye_values);
  return aggregate;
}

nlohmann::json ExperimentReport::to_json(bool include_runtime) const {
  nlohmann::json j{
      {"mode", mode_name(mode)},
      {"seed", seed},
      {"derived_y", derived_y},
      {"y_accuracy", y_accuracy},
  };
  if (e_accuracy) j["e_accuracy"] = *e_accuracy;
  if (ye_accuracy) j["ye_accuracy"] = *ye_accuracy;
  if (include_runtime) j["runtime_seconds"] = runtime_seconds;
  return j;
}

nlohmann::json AggregateReport::to_json(bool include_runtime) const {
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& run : runs) runs_json.push_back(run.to_json(include_runtime));
  nlohmann::json j{
      {"mode", mode_name(mode)},
      {"y", {{"mean", y.mean}, {"stddev", y.stddev}}},
      {"runs", runs_json},
  };
  if (e) j["e"] = {{"mean", e->mean}, {"stddev", e->stddev}};
  if (ye) j["ye"] = {{"mean", ye->mean}, {"stddev", ye->stddev}};
  return j;
}

}  // namespace tedkit
