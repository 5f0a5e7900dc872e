#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tedkit/loan.hpp"

using namespace tedkit::loan;

namespace {

// Independent restatement of the two rules: good requires the branch's
// thresholds, otherwise the explanation names the failed conditions.
std::pair<std::string, std::string> oracle_rule(int trades, int ere, int nfrb) {
  if (trades >= 23) {
    bool ere_bad = ere < 70;
    bool nfrb_bad = nfrb > 63;
    if (!ere_bad && !nfrb_bad) return {"good", "GoodRule1"};
    if (ere_bad && nfrb_bad) return {"delinquent", "HiTrades_BothViolated"};
    return {"delinquent", ere_bad ? "HiTrades_EREViolated" : "HiTrades_NFRBViolated"};
  }
  bool ere_bad = ere < 76;
  bool nfrb_bad = nfrb > 78;
  if (!ere_bad && !nfrb_bad) return {"good", "GoodRule2"};
  if (ere_bad && nfrb_bad) return {"delinquent", "LoTrades_BothViolated"};
  return {"delinquent", ere_bad ? "LoTrades_EREViolated" : "LoTrades_NFRBViolated"};
}

LoanRecord record_of(int trades, int ere, int nfrb) {
  LoanRecord r;
  r.num_satisfactory_trades = trades;
  r.external_risk_estimate = ere;
  r.net_fraction_revolving_burden = nfrb;
  return r;
}

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("rule_label handles the canonical cases") {
  auto good1 = rule_label(record_of(25, 75, 50));
  CHECK(good1 == RuleOutcome{Label::good, Explanation::good_rule1});

  // boundary equality on both rule-2 literals
  auto good2 = rule_label(record_of(22, 76, 78));
  CHECK(good2 == RuleOutcome{Label::good, Explanation::good_rule2});

  // both rule-1 conditions fail by one
  auto both = rule_label(record_of(23, 69, 64));
  CHECK(both == RuleOutcome{Label::delinquent, Explanation::hi_trades_both_violated});
}

TEST_CASE("rule_label agrees with an independent restatement on a boundary grid") {
  const int trades_values[] = {0, 5, 21, 22, 23, 24, 60};
  const int ere_values[] = {30, 68, 69, 70, 71, 75, 76, 77, 99};
  const int nfrb_values[] = {0, 62, 63, 64, 77, 78, 79, 200};
  for (int trades : trades_values) {
    for (int ere : ere_values) {
      for (int nfrb : nfrb_values) {
        auto outcome = rule_label(record_of(trades, ere, nfrb));
        auto [label, explanation] = oracle_rule(trades, ere, nfrb);
        CHECK(label_name(outcome.label) == label);
        CHECK(explanation_name(outcome.explanation) == explanation);
      }
    }
  }
}

TEST_CASE("the two good rules are mutually exclusive") {
  // the branches partition on trades, so a record can satisfy at most one
  for (int trades : {22, 23}) {
    auto outcome = rule_label(record_of(trades, 90, 10));
    CHECK(outcome.label == Label::good);
    CHECK(outcome.explanation ==
          (trades >= 23 ? Explanation::good_rule1 : Explanation::good_rule2));
  }
}

TEST_CASE("explanations map onto labels functionally") {
  for (int e = 0; e < kExplanationCount; ++e) {
    auto explanation = static_cast<Explanation>(e);
    bool good = explanation == Explanation::good_rule1 || explanation == Explanation::good_rule2;
    CHECK(label_for_explanation(explanation) == (good ? Label::good : Label::delinquent));
  }
}

TEST_CASE("noise fields never influence the outcome") {
  LoanRecord r = record_of(23, 70, 63);
  auto base = rule_label(r);
  r.noise = {99, 0, 42, 7, 100};
  CHECK(rule_label(r) == base);
}

TEST_CASE("generation is deterministic per seed, down to the file bytes") {
  auto a = generate_synthetic(500, 7);
  auto b = generate_synthetic(500, 7);
  CHECK(a.features() == b.features());
  CHECK(a.labels() == b.labels());
  CHECK(a.explanations() == b.explanations());

  auto dir = std::filesystem::temp_directory_path();
  a.write_csv(dir / "tedkit_loan_a.csv");
  b.write_csv(dir / "tedkit_loan_b.csv");
  CHECK(file_bytes(dir / "tedkit_loan_a.csv") == file_bytes(dir / "tedkit_loan_b.csv"));
  std::filesystem::remove(dir / "tedkit_loan_a.csv");
  std::filesystem::remove(dir / "tedkit_loan_b.csv");

  CHECK(generate_synthetic(500, 8).features() != a.features());
  CHECK_THROWS_AS(generate_synthetic(0, 7), std::invalid_argument);
}

TEST_CASE("every explanation class covers at least 1% at n=10000") {
  auto dataset = generate_synthetic(10000, 7);
  REQUIRE(dataset.explanation_names().size() == 8);
  std::map<int, int> counts;
  for (int e : dataset.explanations()) ++counts[e];
  for (const auto& [e, count] : counts) CHECK(count >= 100);
  CHECK(counts.size() == 8);
}

TEST_CASE("generated labels are consistent with the rules by construction") {
  auto dataset = generate_synthetic(3000, 9);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto row = dataset.features().row(i);
    auto outcome = rule_label(record_of(static_cast<int>(row[0]), static_cast<int>(row[1]),
                                        static_cast<int>(row[2])));
    CHECK(dataset.label_names()[dataset.labels()[i]] == label_name(outcome.label));
    CHECK(dataset.explanation_names()[dataset.explanations()[i]] ==
          explanation_name(outcome.explanation));
  }
}

TEST_CASE("relabeling restores exactly the injected flips") {
  auto dataset = generate_synthetic(400, 13);

  auto [same, zero_flips] = relabel_for_consistency(dataset);
  CHECK(zero_flips == 0);
  CHECK(same.labels() == dataset.labels());
  CHECK(same.explanations() == dataset.explanations());

  // rebuild with k labels flipped at known indices
  std::vector<std::size_t> flipped = {3, 17, 42, 118, 256, 399};
  tedkit::Dataset corrupted(dataset.feature_names(), true);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    std::string label = dataset.label_names()[dataset.labels()[i]];
    if (std::find(flipped.begin(), flipped.end(), i) != flipped.end()) {
      label = label == "good" ? "delinquent" : "good";
    }
    corrupted.add(dataset.features().row(i), label,
                  dataset.explanation_names()[dataset.explanations()[i]]);
  }
  auto [restored, flips] = relabel_for_consistency(corrupted);
  CHECK(flips == flipped.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(restored.label_names()[restored.labels()[i]] ==
          dataset.label_names()[dataset.labels()[i]]);
  }

  tedkit::Dataset wrong_columns({"a", "b"}, false);
  double row[] = {1.0, 2.0};
  wrong_columns.add(row, "good");
  CHECK_THROWS_AS(relabel_for_consistency(wrong_columns), std::invalid_argument);
}
