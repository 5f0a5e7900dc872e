#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tedkit/harness.hpp"

namespace tedkit {

// The bundled benchmark protocol: tic-tac-toe on a single split with the
// MLP (baseline and TED), and the loan task over repeated seeds with the
// forest (TED scored through the derived-Y map).
struct Table1Options {
  std::uint64_t ttt_seed = 1;
  std::vector<std::uint64_t> loan_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t loan_n = 10000;
  std::uint64_t loan_gen_seed = 7;
  MlpConfig mlp;
  ForestConfig forest;

  static Table1Options from_json(const nlohmann::json& j);
};

// One tolerance check with its measured value.
struct ToleranceCheck {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  bool pass = false;
};

struct Table1Result {
  ExperimentReport ttt_baseline;
  ExperimentReport ttt_ted;
  AggregateReport loan_baseline;
  AggregateReport loan_ted;
  std::size_t loan_derived_wins = 0;  // seeds where derived Y >= baseline Y
  std::vector<ToleranceCheck> checks;

  bool all_pass() const;
  // Deterministic for fixed options: no timing fields.
  nlohmann::json to_json() const;
  // Two-row accuracy table plus one pass/fail line per check.
  std::string to_text() const;
};

Table1Result reproduce_table1(const Table1Options& options = {});

// Renders a reproduce_table1 JSON report as the aligned two-row table plus
// one pass/fail line per check.
std::string table1_text_from_json(const nlohmann::json& report);

}  // namespace tedkit
