#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "tedkit/dataset.hpp"

namespace tedkit::loan {

// The three fields the rules read, plus noise fields with no label influence.
struct LoanRecord {
  int num_satisfactory_trades = 0;     // 0..60
  int external_risk_estimate = 0;      // 0..100
  int net_fraction_revolving_burden = 0;  // 0..200
  std::array<int, 5> noise{};
};

enum class Label { good, delinquent };

enum class Explanation {
  good_rule1,
  good_rule2,
  hi_trades_ere_violated,
  hi_trades_nfrb_violated,
  hi_trades_both_violated,
  lo_trades_ere_violated,
  lo_trades_nfrb_violated,
  lo_trades_both_violated,
};
inline constexpr int kExplanationCount = 8;

struct RuleOutcome {
  Label label = Label::delinquent;
  Explanation explanation = Explanation::hi_trades_both_violated;
  friend bool operator==(const RuleOutcome&, const RuleOutcome&) = default;
};

const char* label_name(Label label);
const char* explanation_name(Explanation explanation);
Label label_for_explanation(Explanation explanation);

// Trades >= 23 selects the rule-1 thresholds (ERE >= 70, NFRB <= 63),
// otherwise rule-2 (ERE >= 76, NFRB <= 78). Both satisfied -> good with the
// branch's rule id; otherwise delinquent naming the violated conditions.
RuleOutcome rule_label(const LoanRecord& record);

// n records with fields drawn from seeded distributions, labels and
// explanations assigned by rule_label. Feature columns:
// trades, ere, nfrb, n0..n4.
Dataset generate_synthetic(std::size_t n, std::uint64_t seed);

// Replaces every instance's label and explanation with the rule outcome for
// its record fields; second element counts the labels that changed.
std::pair<Dataset, std::size_t> relabel_for_consistency(const Dataset& dataset);

}  // namespace tedkit::loan
