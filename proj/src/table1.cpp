#include "tedkit/table1.hpp"

#include <cmath>
#include <cstdio>

#include "tedkit/errors.hpp"
#include "tedkit/loan.hpp"
#include "tedkit/tictactoe.hpp"

namespace tedkit {
namespace {

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

ToleranceCheck make_check(std::string name, double value, double lower, double upper) {
  ToleranceCheck check;
  check.name = std::move(name);
  check.value = value;
  check.lower = lower;
  check.upper = upper;
  check.pass = value >= lower && value <= upper;
  return check;
}

}  // namespace

Table1Options Table1Options::from_json(const nlohmann::json& j) {
  Table1Options options;
  if (!j.is_object()) throw std::invalid_argument("options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "ttt_seed") {
        options.ttt_seed = value.get<std::uint64_t>();
      } else if (key == "loan_seeds") {
        options.loan_seeds = value.get<std::vector<std::uint64_t>>();
      } else if (key == "loan_n") {
        options.loan_n = value.get<std::size_t>();
      } else if (key == "loan_gen_seed") {
        options.loan_gen_seed = value.get<std::uint64_t>();
      } else {
        throw std::invalid_argument("unknown option '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("bad value for option '" + key + "'");
    }
  }
  if (options.loan_seeds.size() < 2) {
    throw std::invalid_argument("loan_seeds needs at least 2 seeds");
  }
  return options;
}

Table1Result reproduce_table1(const Table1Options& options) {
  Table1Result result;

  ClassifierFactory make_mlp = [&options]() -> std::unique_ptr<Classifier> {
    return std::make_unique<MlpClassifier>(options.mlp);
  };
  ClassifierFactory make_forest = [&options]() -> std::unique_ptr<Classifier> {
    return std::make_unique<ForestClassifier>(options.forest);
  };

  SplitSpec ttt_spec{0.9, options.ttt_seed};
  result.ttt_baseline = run_baseline(ttt::build_dataset(false), make_mlp, ttt_spec);
  result.ttt_ted = run_ted(ttt::build_dataset(true), make_mlp, ttt_spec, false);

  Dataset loan_data = loan::generate_synthetic(options.loan_n, options.loan_gen_seed);
  result.loan_baseline = run_repeated(loan_data.without_explanations(), make_forest,
                                      Mode::baseline, options.loan_seeds);
  result.loan_ted =
      run_repeated(loan_data, make_forest, Mode::ted, options.loan_seeds, true);

  result.loan_derived_wins = 0;
  for (std::size_t i = 0; i < options.loan_seeds.size(); ++i) {
    if (result.loan_ted.runs[i].y_accuracy >= result.loan_baseline.runs[i].y_accuracy) {
      ++result.loan_derived_wins;
    }
  }

  double ttt_e = result.ttt_ted.e_accuracy.value_or(0.0);
  std::size_t needed_wins = static_cast<std::size_t>(
      std::ceil(0.7 * static_cast<double>(options.loan_seeds.size())));
  result.checks = {
      make_check("ttt_baseline_y", result.ttt_baseline.y_accuracy, 0.940, 0.990),
      make_check("ttt_ted_y", result.ttt_ted.y_accuracy, 0.949, 0.999),
      make_check("ttt_ted_e", ttt_e, 0.938, 0.988),
      make_check("ttt_no_loss", result.ttt_ted.y_accuracy - result.ttt_baseline.y_accuracy,
                 -0.010, 1.0),
      make_check("loan_baseline_y_mean", result.loan_baseline.y.mean, 0.985, 1.0),
      make_check("loan_ted_e_mean", result.loan_ted.e->mean, 0.985, 1.0),
      make_check("loan_derived_wins", static_cast<double>(result.loan_derived_wins),
                 static_cast<double>(needed_wins),
                 static_cast<double>(options.loan_seeds.size())),
  };
  return result;
}

bool Table1Result::all_pass() const {
  for (const auto& check : checks) {
    if (!check.pass) return false;
  }
  return true;
}

nlohmann::json Table1Result::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& check : checks) {
    checks_json.push_back({{"name", check.name},
                           {"value", check.value},
                           {"lower", check.lower},
                           {"upper", check.upper},
                           {"pass", check.pass}});
  }
  return {
      {"tictactoe",
       {{"baseline", ttt_baseline.to_json(false)}, {"ted", ttt_ted.to_json(false)}}},
      {"loan",
       {{"baseline", loan_baseline.to_json(false)},
        {"ted", loan_ted.to_json(false)},
        {"derived_wins", loan_derived_wins}}},
      {"checks", checks_json},
      {"all_pass", all_pass()},
  };
}

std::string Table1Result::to_text() const { return table1_text_from_json(to_json()); }

std::string table1_text_from_json(const nlohmann::json& report) {
  try {
    auto acc = [&](const char* task, const char* mode, const char* metric) {
      return pct(report.at(task).at(mode).at(metric).get<double>());
    };
    auto stat = [&](const char* mode, const char* metric) {
      const auto& s = report.at("loan").at(mode).at(metric);
      return pct(s.at("mean").get<double>()) + " (" + pct(s.at("stddev").get<double>()) + ")";
    };

    std::string text;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s| %-19s| %-24s\n", "", "Tic-Tac-Toe",
                  "Loan Repayment");
    text += buf;
    std::snprintf(buf, sizeof buf, "%-14s| %-8s %-10s| %-12s %-11s\n", "Training input", "Y",
                  "E", "Y", "E");
    text += buf;
    text += std::string(62, '-') + '\n';
    std::snprintf(buf, sizeof buf, "%-14s| %-8s %-10s| %-12s %-11s\n", "X, Y",
                  acc("tictactoe", "baseline", "y_accuracy").c_str(), "NA",
                  stat("baseline", "y").c_str(), "NA");
    text += buf;
    std::snprintf(buf, sizeof buf, "%-14s| %-8s %-10s| %-12s %-11s\n", "X, Y, and E",
                  acc("tictactoe", "ted", "y_accuracy").c_str(),
                  acc("tictactoe", "ted", "e_accuracy").c_str(), stat("ted", "y").c_str(),
                  stat("ted", "e").c_str());
    text += buf;
    text += '\n';
    for (const auto& check : report.at("checks")) {
      std::snprintf(buf, sizeof buf, "[%s] %-22s %.4f in [%.4f, %.4f]\n",
                    check.at("pass").get<bool>() ? "PASS" : "FAIL",
                    check.at("name").get<std::string>().c_str(),
                    check.at("value").get<double>(), check.at("lower").get<double>(),
                    check.at("upper").get<double>());
      text += buf;
    }
    return text;
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("table1 report json: ") + e.what());
  }
}

}  // namespace tedkit
