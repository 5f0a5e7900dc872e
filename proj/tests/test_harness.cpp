#include <doctest.h>

#include <set>

#include "tedkit/errors.hpp"
#include "tedkit/forest.hpp"
#include "tedkit/harness.hpp"
#include "tedkit/loan.hpp"
#include "tedkit/rng.hpp"
#include "tedkit/tictactoe.hpp"

using namespace tedkit;

namespace {

ClassifierFactory small_forest(std::size_t trees = 15) {
  return [trees]() -> std::unique_ptr<Classifier> {
    ForestConfig config;
    config.n_trees = trees;
    return std::make_unique<ForestClassifier>(config);
  };
}

// Labels depend on the first feature only; explanations constant.
Dataset constant_explanation_dataset(std::size_t n) {
  Dataset d({"u", "v"}, true);
  auto rng = make_rng(123);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double u = dist(rng);
    double v = dist(rng);
    double row[] = {u, v};
    d.add(row, u < 0.33 ? "low" : u < 0.66 ? "mid" : "high", "only");
  }
  return d;
}

}  // namespace

TEST_CASE("split produces the documented sizes and a clean partition") {
  auto ttt = ttt::build_dataset(false);
  auto [train, test] = split_dataset(ttt, {0.9, 3});
  CHECK(train.size() == 4068);
  CHECK(test.size() == 452);

  // partition: row multisets match the full dataset
  auto loan_data = loan::generate_synthetic(100, 2);
  auto [ltrain, ltest] = split_dataset(loan_data, {0.9, 1});
  REQUIRE(ltrain.size() + ltest.size() == loan_data.size());
  auto key = [](const Dataset& d, std::size_t i) {
    std::string k;
    for (double v : d.features().row(i)) k += std::to_string(v) + ",";
    k += d.label_names()[d.labels()[i]];
    return k;
  };
  std::multiset<std::string> whole;
  std::multiset<std::string> halves;
  for (std::size_t i = 0; i < loan_data.size(); ++i) whole.insert(key(loan_data, i));
  for (std::size_t i = 0; i < ltrain.size(); ++i) halves.insert(key(ltrain, i));
  for (std::size_t i = 0; i < ltest.size(); ++i) halves.insert(key(ltest, i));
  CHECK(whole == halves);
}

TEST_CASE("split is seed-deterministic and validates inputs") {
  auto data = loan::generate_synthetic(50, 4);
  auto [a_train, a_test] = split_dataset(data, {0.8, 7});
  auto [b_train, b_test] = split_dataset(data, {0.8, 7});
  CHECK(a_train.features() == b_train.features());
  CHECK(a_test.labels() == b_test.labels());

  auto [c_train, c_test] = split_dataset(data, {0.8, 8});
  CHECK(c_train.features() != a_train.features());

  auto tiny = loan::generate_synthetic(9, 1);
  CHECK_THROWS_AS(split_dataset(tiny, {0.9, 1}), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(data, {0.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(data, {1.0, 1}), std::invalid_argument);
}

TEST_CASE("protocol runs refuse mixed-mode datasets") {
  auto with_e = loan::generate_synthetic(100, 5);
  CHECK_THROWS_AS(run_baseline(with_e, small_forest(), {0.9, 1}), state_error);
  CHECK_THROWS_AS(run_ted(with_e.without_explanations(), small_forest(), {0.9, 1}, false),
                  state_error);
}

TEST_CASE("derive_y_from_e requires a functional codec") {
  auto ttt = ttt::build_dataset(true);
  CHECK_THROWS_AS(run_ted(ttt, small_forest(5), {0.9, 1}, true), state_error);
}

TEST_CASE("reported accuracies match an independent recount") {
  auto data = loan::generate_synthetic(300, 6);  // 30-instance test split
  auto report = run_ted(data, small_forest(), {0.9, 2}, false);
  REQUIRE(report.predictions.size() == 30);

  std::size_t y_hits = 0;
  std::size_t e_hits = 0;
  std::size_t ye_hits = 0;
  for (const auto& rec : report.predictions) {
    if (rec.y_pred == rec.y_true) ++y_hits;
    if (rec.e_pred == rec.e_true) ++e_hits;
    if (rec.y_pred == rec.y_true && rec.e_pred == rec.e_true) ++ye_hits;
  }
  CHECK(report.y_accuracy == static_cast<double>(y_hits) / 30.0);
  CHECK(report.e_accuracy == static_cast<double>(e_hits) / 30.0);
  CHECK(report.ye_accuracy == static_cast<double>(ye_hits) / 30.0);
  CHECK(*report.ye_accuracy <= std::min(report.y_accuracy, *report.e_accuracy));

  auto baseline = run_baseline(data.without_explanations(), small_forest(), {0.9, 2});
  std::size_t base_hits = 0;
  for (const auto& rec : baseline.predictions) {
    if (rec.y_pred == rec.y_true) ++base_hits;
  }
  CHECK(baseline.y_accuracy == static_cast<double>(base_hits) / 30.0);
  CHECK_FALSE(baseline.e_accuracy.has_value());
}

TEST_CASE("the codec never sees the test half") {
  auto data = loan::generate_synthetic(200, 9);
  auto [train, test] = split_dataset(data, {0.9, 5});
  auto train_codec = fit_codec(train);

  // appending the test rows after the training rows must not disturb any
  // training-pair composite id
  Dataset combined(data.feature_names(), true);
  for (const Dataset* part : {&train, &test}) {
    for (std::size_t i = 0; i < part->size(); ++i) {
      combined.add(part->features().row(i), part->label_names()[part->labels()[i]],
                   part->explanation_names()[part->explanations()[i]]);
    }
  }
  auto full_codec = fit_codec(combined);
  auto index_of = [](const std::vector<std::string>& names, const std::string& name) {
    return static_cast<int>(std::find(names.begin(), names.end(), name) - names.begin());
  };
  for (const auto& [pair, composite] : train_codec.pair_to_composite) {
    // vocab ids differ between the two datasets; compare pairs by name
    std::pair<int, int> same_pair{
        index_of(full_codec.label_names, train_codec.label_names[pair.first]),
        index_of(full_codec.explanation_names, train_codec.explanation_names[pair.second])};
    auto it = full_codec.pair_to_composite.find(same_pair);
    REQUIRE(it != full_codec.pair_to_composite.end());
    CHECK(it->second == composite);
  }
}

TEST_CASE("a constant explanation reduces ted to the baseline protocol") {
  auto data = constant_explanation_dataset(150);
  auto ted = run_ted(data, small_forest(), {0.9, 4}, false);
  auto baseline = run_baseline(data.without_explanations(), small_forest(), {0.9, 4});
  CHECK(*ted.e_accuracy == 1.0);
  CHECK(ted.y_accuracy == baseline.y_accuracy);
  CHECK(*ted.ye_accuracy == ted.y_accuracy);
}

TEST_CASE("run_repeated aggregates per-seed runs") {
  auto data = loan::generate_synthetic(200, 12);

  std::vector<std::uint64_t> one_seed = {3};
  CHECK_THROWS_AS(run_repeated(data, small_forest(), Mode::ted, one_seed, true),
                  std::invalid_argument);

  std::vector<std::uint64_t> repeated = {5, 5};
  auto twice = run_repeated(data, small_forest(), Mode::ted, repeated, true);
  CHECK(twice.y.stddev == 0.0);
  CHECK(twice.runs[0].y_accuracy == twice.runs[1].y_accuracy);

  std::vector<std::uint64_t> seeds = {1, 2, 3, 4};
  auto agg = run_repeated(data.without_explanations(), small_forest(), Mode::baseline, seeds);
  REQUIRE(agg.runs.size() == 4);
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& run : agg.runs) {
    lo = std::min(lo, run.y_accuracy);
    hi = std::max(hi, run.y_accuracy);
  }
  CHECK(agg.y.mean >= lo);
  CHECK(agg.y.mean <= hi);
  CHECK(agg.y.stddev >= 0.0);
  CHECK_FALSE(agg.e.has_value());

  auto j = agg.to_json(false);
  CHECK(j["runs"].size() == 4);
  CHECK_FALSE(j["runs"][0].contains("runtime_seconds"));
  CHECK(agg.runs[0].to_json(true).contains("runtime_seconds"));
}
