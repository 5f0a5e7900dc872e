#include "tedkit/loan.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tedkit/rng.hpp"

namespace tedkit::loan {
namespace {

constexpr int kRule1Trades = 23;  // >= selects rule 1, <= 22 selects rule 2
constexpr int kRule1Ere = 70;
constexpr int kRule1Nfrb = 63;
constexpr int kRule2Ere = 76;
constexpr int kRule2Nfrb = 78;

int draw_clamped_normal(std::mt19937_64& rng, double mean, double sd, int lo, int hi) {
  std::normal_distribution<double> dist(mean, sd);
  long v = std::lround(dist(rng));
  return static_cast<int>(std::clamp<long>(v, lo, hi));
}

}  // namespace

const char* label_name(Label label) {
  return label == Label::good ? "good" : "delinquent";
}

const char* explanation_name(Explanation explanation) {
  switch (explanation) {
    case Explanation::good_rule1: return "GoodRule1";
    case Explanation::good_rule2: return "GoodRule2";
    case Explanation::hi_trades_ere_violated: return "HiTrades_EREViolated";
    case Explanation::hi_trades_nfrb_violated: return "HiTrades_NFRBViolated";
    case Explanation::hi_trades_both_violated: return "HiTrades_BothViolated";
    case Explanation::lo_trades_ere_violated: return "LoTrades_EREViolated";
    case Explanation::lo_trades_nfrb_violated: return "LoTrades_NFRBViolated";
    case Explanation::lo_trades_both_violated: return "LoTrades_BothViolated";
  }
  throw std::invalid_argument("bad explanation value");
}

Label label_for_explanation(Explanation explanation) {
  return explanation == Explanation::good_rule1 || explanation == Explanation::good_rule2
             ? Label::good
             : Label::delinquent;
}

RuleOutcome rule_label(const LoanRecord& record) {
  bool hi_trades = record.num_satisfactory_trades >= kRule1Trades;
  int ere_floor = hi_trades ? kRule1Ere : kRule2Ere;
  int nfrb_ceil = hi_trades ? kRule1Nfrb : kRule2Nfrb;

  bool ere_ok = record.external_risk_estimate >= ere_floor;
  bool nfrb_ok = record.net_fraction_revolving_burden <= nfrb_ceil;

  if (ere_ok && nfrb_ok) {
    return {Label::good, hi_trades ? Explanation::good_rule1 : Explanation::good_rule2};
  }
  Explanation e;
  if (!ere_ok && !nfrb_ok) {
    e = hi_trades ? Explanation::hi_trades_both_violated : Explanation::lo_trades_both_violated;
  } else if (!ere_ok) {
    e = hi_trades ? Explanation::hi_trades_ere_violated : Explanation::lo_trades_ere_violated;
  } else {
    e = hi_trades ? Explanation::hi_trades_nfrb_violated : Explanation::lo_trades_nfrb_violated;
  }
  return {Label::delinquent, e};
}

Dataset generate_synthetic(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_synthetic: n must be at least 1");

  Dataset dataset({"trades", "ere", "nfrb", "n0", "n1", "n2", "n3", "n4"}, true);
  dataset.set_task("loan");
  dataset.set_generator_seed(seed);

  auto rng = make_rng(seed);
  std::uniform_int_distribution<int> noise_dist(0, 100);

  for (std::size_t i = 0; i < n; ++i) {
    LoanRecord record;
    record.num_satisfactory_trades = draw_clamped_normal(rng, 21.0, 8.0, 0, 60);
    record.external_risk_estimate = draw_clamped_normal(rng, 72.0, 10.0, 30, 99);
    record.net_fraction_revolving_burden = draw_clamped_normal(rng, 55.0, 30.0, 0, 200);
    for (int& v : record.noise) v = noise_dist(rng);

    RuleOutcome outcome = rule_label(record);
    double row[8] = {static_cast<double>(record.num_satisfactory_trades),
                     static_cast<double>(record.external_risk_estimate),
                     static_cast<double>(record.net_fraction_revolving_burden),
                     static_cast<double>(record.noise[0]),
                     static_cast<double>(record.noise[1]),
                     static_cast<double>(record.noise[2]),
                     static_cast<double>(record.noise[3]),
                     static_cast<double>(record.noise[4])};
    dataset.add(row, label_name(outcome.label), explanation_name(outcome.explanation));
  }
  return dataset;
}

std::pair<Dataset, std::size_t> relabel_for_consistency(const Dataset& dataset) {
  const auto& names = dataset.feature_names();
  auto column = [&](const char* name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw std::invalid_argument(std::string("relabel_for_consistency: missing column '") +
                                  name + "'");
    }
    return static_cast<std::size_t>(it - names.begin());
  };
  std::size_t trades_col = column("trades");
  std::size_t ere_col = column("ere");
  std::size_t nfrb_col = column("nfrb");

  Dataset out(names, true);
  out.set_task(dataset.task());
  if (dataset.generator_seed()) out.set_generator_seed(*dataset.generator_seed());

  std::size_t flips = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto row = dataset.features().row(i);
    LoanRecord record;
    record.num_satisfactory_trades = static_cast<int>(std::lround(row[trades_col]));
    record.external_risk_estimate = static_cast<int>(std::lround(row[ere_col]));
    record.net_fraction_revolving_burden = static_cast<int>(std::lround(row[nfrb_col]));

    RuleOutcome outcome = rule_label(record);
    if (dataset.label_names()[dataset.labels()[i]] != label_name(outcome.label)) ++flips;
    out.add(row, label_name(outcome.label), explanation_name(outcome.explanation));
  }
  return {std::move(out), flips};
}

}  // namespace tedkit::loan
