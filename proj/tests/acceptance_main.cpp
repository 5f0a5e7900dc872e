// Acceptance suite: runs every gate check at its pinned tolerance and prints
// one pass/fail line per criterion. Exit code 0 only when all pass.

#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tedkit/codec.hpp"
#include "tedkit/forest.hpp"
#include "tedkit/harness.hpp"
#include "tedkit/loan.hpp"
#include "tedkit/mlp.hpp"
#include "tedkit/rng.hpp"
#include "tedkit/table1.hpp"
#include "tedkit/tictactoe.hpp"

namespace {

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %-24s %s\n", pass ? "PASS" : "FAIL", index, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// ---- independent tic-tac-toe oracle over plain cell arrays ----------------

using Cells = std::array<int, 9>;  // 0 empty, 1 X, 2 O

constexpr std::array<std::array<int, 3>, 8> kOracleLines = {{{0, 1, 2},
                                                             {3, 4, 5},
                                                             {6, 7, 8},
                                                             {0, 3, 6},
                                                             {1, 4, 7},
                                                             {2, 5, 8},
                                                             {0, 4, 8},
                                                             {2, 4, 6}}};

bool oracle_line(const Cells& cells, int piece) {
  for (const auto& line : kOracleLines) {
    if (cells[line[0]] == piece && cells[line[1]] == piece && cells[line[2]] == piece) {
      return true;
    }
  }
  return false;
}

Cells cells_of(const tedkit::ttt::Board& b) {
  Cells cells{};
  for (int s = 0; s < 9; ++s) {
    if ((b.x_mask >> s) & 1) cells[s] = 1;
    if ((b.o_mask >> s) & 1) cells[s] = 2;
  }
  return cells;
}

std::vector<int> oracle_completions(const Cells& cells, int piece) {
  std::vector<int> squares;
  for (int s = 0; s < 9; ++s) {
    if (cells[s] != 0) continue;
    Cells placed = cells;
    placed[s] = piece;
    if (oracle_line(placed, piece)) squares.push_back(s);
  }
  return squares;
}

bool oracle_threat(const Cells& cells, int piece, int square) {
  Cells placed = cells;
  placed[square] = piece;
  for (const auto& line : kOracleLines) {
    if (line[0] != square && line[1] != square && line[2] != square) continue;
    int own = 0;
    int empty = 0;
    for (int s : line) {
      if (placed[s] == piece) ++own;
      if (placed[s] == 0) ++empty;
    }
    if (own == 2 && empty == 1) return true;
  }
  return false;
}

// ---- independent loan rule oracle ------------------------------------------

std::pair<std::string, std::string> oracle_loan(int trades, int ere, int nfrb) {
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

// ---- criteria ---------------------------------------------------------------

void criterion_1_enumeration() {
  Timer timer;
  // brute force over all 3^9 grids, counting legal non-terminal states
  std::set<std::tuple<std::uint16_t, std::uint16_t, bool>> expected;
  for (int code = 0; code < 19683; ++code) {
    Cells cells{};
    int rest = code;
    for (int s = 8; s >= 0; --s) {
      cells[s] = rest % 3;
      rest /= 3;
    }
    int x_count = 0;
    int o_count = 0;
    int empty = 0;
    for (int v : cells) {
      if (v == 1) ++x_count;
      if (v == 2) ++o_count;
      if (v == 0) ++empty;
    }
    if (empty == 0 || oracle_line(cells, 1) || oracle_line(cells, 2)) continue;
    if (x_count != o_count && x_count != o_count + 1) continue;
    std::uint16_t x_mask = 0;
    std::uint16_t o_mask = 0;
    for (int s = 0; s < 9; ++s) {
      if (cells[s] == 1) x_mask |= 1u << s;
      if (cells[s] == 2) o_mask |= 1u << s;
    }
    expected.emplace(x_mask, o_mask, x_count == o_count);
  }

  auto boards = tedkit::ttt::enumerate_legal_nonterminal();
  std::set<std::tuple<std::uint16_t, std::uint16_t, bool>> produced;
  for (const auto& b : boards) {
    produced.emplace(b.x_mask, b.o_mask, b.side_to_move == tedkit::ttt::Player::x);
  }
  double dt = timer.seconds();
  bool pass = boards.size() == 4520 && expected.size() == 4520 && produced == expected &&
              dt < 1.0;
  report(1, "enumeration_exactness",
         pass, fmt("4520 expected, %zu produced, oracle match=%d, %.2fs (limit 1s)",
                   boards.size(), produced == expected ? 1 : 0, dt));
}

void criterion_5_codec() {
  Timer timer;
  bool pass = true;
  std::string note;
  for (int which = 0; which < 2; ++which) {
    tedkit::Dataset dataset = which == 0 ? tedkit::ttt::build_dataset(true)
                                         : tedkit::loan::generate_synthetic(10000, 7);
    auto codec = tedkit::fit_codec(dataset);

    for (const auto& [pair, composite] : codec.pair_to_composite) {
      if (tedkit::decode(codec, composite) != pair) pass = false;
      if (tedkit::encode(codec, pair.first, pair.second) != composite) pass = false;
    }
    std::set<std::pair<int, int>> distinct;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      distinct.emplace(dataset.labels()[i], dataset.explanations()[i]);
    }
    if (codec.composite_count() != distinct.size()) pass = false;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      int c = tedkit::encode(codec, dataset.labels()[i], dataset.explanations()[i]);
      if (tedkit::decode(codec, c).first != dataset.labels()[i]) pass = false;
    }
    note += fmt("%s: %zu composites; ", which == 0 ? "ttt" : "loan", codec.composite_count());
  }
  double dt = timer.seconds();
  pass = pass && dt < 1.0;
  report(5, "codec_properties", pass, note + fmt("%.2fs (limit 1s)", dt));
}

void criterion_6_rule_oracles() {
  Timer timer;
  bool ttt_ok = true;
  for (const auto& board : tedkit::ttt::enumerate_legal_nonterminal()) {
    auto label = tedkit::ttt::label_move(board);
    Cells cells = cells_of(board);
    int mover = board.side_to_move == tedkit::ttt::Player::x ? 1 : 2;
    int opponent = 3 - mover;
    if (cells[label.square] != 0) ttt_ok = false;

    auto wins = oracle_completions(cells, mover);
    auto blocks = oracle_completions(cells, opponent);
    switch (label.reason) {
      case tedkit::ttt::Reason::win:
        if (wins.empty() || label.square != wins.front()) ttt_ok = false;
        break;
      case tedkit::ttt::Reason::block:
        if (!wins.empty() || blocks.empty() || label.square != blocks.front()) ttt_ok = false;
        break;
      case tedkit::ttt::Reason::threat: {
        if (!wins.empty() || !blocks.empty()) ttt_ok = false;
        if (!oracle_threat(cells, mover, label.square)) ttt_ok = false;
        for (int s = 0; s < label.square; ++s) {
          if (cells[s] == 0 && oracle_threat(cells, mover, s)) ttt_ok = false;
        }
        break;
      }
      case tedkit::ttt::Reason::empty: {
        if (!wins.empty() || !blocks.empty()) ttt_ok = false;
        for (int s = 0; s < 9; ++s) {
          if (cells[s] == 0 && oracle_threat(cells, mover, s)) ttt_ok = false;
        }
        std::vector<int> tier;
        if (cells[4] == 0) {
          tier = {4};
        } else {
          for (int s : {0, 2, 6, 8}) {
            if (cells[s] == 0) tier.push_back(s);
          }
          if (tier.empty()) {
            for (int s : {1, 3, 5, 7}) {
              if (cells[s] == 0) tier.push_back(s);
            }
          }
        }
        if (tier.empty() || label.square != tier.front()) ttt_ok = false;
        break;
      }
    }
  }

  // loan rule sweep, all threshold boundaries included
  const std::array<int, 22> trades = {0,  2,  4,  6,  8,  10, 12, 14, 16, 18, 20,
                                      21, 22, 23, 24, 25, 30, 35, 40, 45, 50, 60};
  const std::array<int, 22> eres = {30, 35, 40, 45, 50, 55, 60, 65, 68, 69, 70,
                                    71, 74, 75, 76, 77, 80, 85, 90, 95, 98, 99};
  const std::array<int, 22> nfrbs = {0,  10, 20, 30, 40, 50, 55, 60, 62, 63, 64,
                                     65, 70, 75, 77, 78, 79, 85, 100, 120, 160, 200};
  std::size_t loan_checked = 0;
  bool loan_ok = true;
  for (int t : trades) {
    for (int e : eres) {
      for (int f : nfrbs) {
        tedkit::loan::LoanRecord record;
        record.num_satisfactory_trades = t;
        record.external_risk_estimate = e;
        record.net_fraction_revolving_burden = f;
        auto outcome = tedkit::loan::rule_label(record);
        auto [label, explanation] = oracle_loan(t, e, f);
        if (tedkit::loan::label_name(outcome.label) != label ||
            tedkit::loan::explanation_name(outcome.explanation) != explanation) {
          loan_ok = false;
        }
        ++loan_checked;
      }
    }
  }
  double dt = timer.seconds();
  bool pass = ttt_ok && loan_ok && loan_checked >= 10000 && dt < 10.0;
  report(6, "rule_oracle_soundness", pass,
         fmt("ttt 4520 positions ok=%d; loan %zu records ok=%d; %.2fs (limit 10s)",
             ttt_ok ? 1 : 0, loan_checked, loan_ok ? 1 : 0, dt));
}

void criterion_7_numerics() {
  Timer timer;

  double worst_gradient = 0.0;
  auto rng = tedkit::make_rng(2024);
  for (int net = 0; net < 20; ++net) {
    std::uniform_int_distribution<std::size_t> features(2, 6);
    std::uniform_int_distribution<std::size_t> hidden(3, 10);
    std::uniform_int_distribution<int> classes(2, 5);
    std::uniform_int_distribution<std::size_t> rows(4, 12);
    std::size_t d = features(rng);
    int k = classes(rng);
    std::size_t n = rows(rng) + static_cast<std::size_t>(k);

    tedkit::Matrix x(n, d);
    std::normal_distribution<double> value(0.0, 1.0);
    for (double& v : x.data()) v = value(rng);
    std::vector<int> y(n);
    std::uniform_int_distribution<int> pick(0, k - 1);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i < static_cast<std::size_t>(k) ? static_cast<int>(i) : pick(rng);
    }
    tedkit::MlpConfig config;
    config.hidden_units = hidden(rng);
    double err = tedkit::mlp_gradient_check(config, x, y, 7000 + net);
    worst_gradient = std::max(worst_gradient, err);
  }
  bool gradients_ok = worst_gradient < 1e-4;

  // softmax rows must sum to one
  double worst_row = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    auto params = tedkit::mlp_init(6, 32, 5, 400 + trial);
    tedkit::Matrix x(50, 6);
    std::normal_distribution<double> value(0.0, 3.0);
    for (double& v : x.data()) v = value(rng);
    tedkit::Matrix proba = tedkit::mlp_forward(params, x);
    for (std::size_t i = 0; i < proba.rows(); ++i) {
      double sum = 0.0;
      for (double p : proba.row(i)) sum += p;
      worst_row = std::max(worst_row, std::abs(sum - 1.0));
    }
  }
  bool softmax_ok = worst_row < 1e-9;

  // forest leaf audit at the protocol's configuration
  auto loan_data = tedkit::loan::generate_synthetic(10000, 7);
  tedkit::ForestClassifier forest;  // 100 trees, min 5 per leaf
  forest.fit(loan_data.features(), loan_data.explanations(), 1);
  std::size_t min_leaf = forest.min_leaf_size();
  bool leaves_ok = min_leaf >= 5;

  double dt = timer.seconds();
  bool pass = gradients_ok && softmax_ok && leaves_ok && dt < 30.0;
  report(7, "numerical_checks", pass,
         fmt("max grad err %.2e (<1e-4); max softmax drift %.1e (<1e-9); min leaf %zu (>=5); "
             "%.1fs (limit 30s)",
             worst_gradient, worst_row, min_leaf, dt));
}

}  // namespace

int main() {
  criterion_1_enumeration();

  tedkit::Table1Options options;
  Timer protocol_timer;
  auto run1 = tedkit::reproduce_table1(options);
  auto run2 = tedkit::reproduce_table1(options);
  double protocol_seconds = protocol_timer.seconds();

  // 2. tic-tac-toe baseline band
  {
    double y = run1.ttt_baseline.y_accuracy;
    double dt = run1.ttt_baseline.runtime_seconds;
    bool pass = y >= 0.940 && y <= 0.990 && dt < 300.0;
    report(2, "ttt_baseline_accuracy", pass,
           fmt("Y %.4f in [0.9400, 0.9900], %.0fs (limit 300s)", y, dt));
  }
  // 3. tic-tac-toe TED bands and the no-loss margin
  {
    double y = run1.ttt_ted.y_accuracy;
    double e = run1.ttt_ted.e_accuracy.value_or(0.0);
    double margin = y - run1.ttt_baseline.y_accuracy;
    double dt = run1.ttt_ted.runtime_seconds;
    bool pass = y >= 0.949 && y <= 0.999 && e >= 0.938 && e <= 0.988 && margin >= -0.010 &&
                dt < 300.0;
    report(3, "ttt_ted_accuracy", pass,
           fmt("Y %.4f in [0.9490, 0.9990], E %.4f in [0.9380, 0.9880], margin %+.4f >= "
               "-0.0100, %.0fs",
               y, e, margin, dt));
  }
  // 4. loan regime on the synthetic substitute
  {
    double base_y = run1.loan_baseline.y.mean;
    double ted_e = run1.loan_ted.e ? run1.loan_ted.e->mean : 0.0;
    std::size_t wins = run1.loan_derived_wins;
    double dt = 0.0;
    for (const auto& run : run1.loan_baseline.runs) dt += run.runtime_seconds;
    for (const auto& run : run1.loan_ted.runs) dt += run.runtime_seconds;
    bool pass = base_y >= 0.985 && ted_e >= 0.985 && wins >= 7 && dt < 300.0;
    report(4, "loan_regime", pass,
           fmt("baseline Y %.4f >= 0.985, TED E %.4f >= 0.985, derived wins %zu/10 >= 7, "
               "%.0fs (limit 300s)",
               base_y, ted_e, wins, dt));
  }

  criterion_5_codec();
  criterion_6_rule_oracles();
  criterion_7_numerics();

  // 8. reproduce-table1 determinism
  {
    std::string a = run1.to_json().dump(2);
    std::string b = run2.to_json().dump(2);
    bool pass = a == b && run1.to_text() == run2.to_text();
    report(8, "reproduce_determinism", pass,
           fmt("two full runs, %zu-byte reports %s (protocol pair took %.0fs)", a.size(),
               pass ? "byte-identical" : "DIFFER", protocol_seconds));
  }

  std::printf("%s (%d criteria failed)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
