#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tedkit/dataset.hpp"

namespace tedkit::ttt {

enum class Player { x, o };

// Occupancy as two 9-bit masks, bit i = square i (row-major, 0 top-left).
struct Board {
  std::uint16_t x_mask = 0;
  std::uint16_t o_mask = 0;
  Player side_to_move = Player::x;

  bool occupied(int square) const {
    return ((x_mask | o_mask) >> square) & 1;
  }
  friend bool operator==(const Board&, const Board&) = default;
};

enum class Reason { win, block, threat, empty };

struct MoveLabel {
  int square = -1;
  Reason reason = Reason::empty;
  friend bool operator==(const MoveLabel&, const MoveLabel&) = default;
};

enum class SquareKind { center, corner, middle };

SquareKind square_kind(int square);
const char* reason_name(Reason reason);

// The eight three-in-a-row masks.
extern const std::array<std::uint16_t, 8> kLineMasks;

// True when `mask` contains a completed line.
bool has_line(std::uint16_t mask);

// Squares where `side` would complete a line, ascending.
std::vector<int> completing_squares(const Board& board, Player side);

// Piece counts valid for side_to_move, planes disjoint, no completed line,
// at least one empty square.
bool is_legal_nonterminal(const Board& board);

// All legal non-terminal positions in lexicographic order of the cell-state
// string (square 0 most significant; empty < X < O). The side to move is
// implied by the piece counts.
std::vector<Board> enumerate_legal_nonterminal();

// Sequential labeling: Win, else Block, else Threat, else Empty with
// center > corners > middles. Ties resolved toward the lowest square index.
// Throws std::invalid_argument for terminal or illegal boards.
MoveLabel label_move(const Board& board);

// 19 binary components: x plane, o plane, X-to-move flag.
std::array<double, 19> featurize(const Board& board);

// One instance per legal non-terminal position, labeled with the preferred
// move square; the rule name rides along as the explanation when requested.
Dataset build_dataset(bool with_explanations);

}  // namespace tedkit::ttt
