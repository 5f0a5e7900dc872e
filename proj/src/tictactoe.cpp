#include "tedkit/tictactoe.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace tedkit::ttt {

const std::array<std::uint16_t, 8> kLineMasks = {
    0b000000111,  // rows
    0b000111000,
    0b111000000,
    0b001001001,  // columns
    0b010010010,
    0b100100100,
    0b100010001,  // diagonals
    0b001010100,
};

SquareKind square_kind(int square) {
  if (square < 0 || square > 8) throw std::invalid_argument("square index out of range");
  if (square == 4) return SquareKind::center;
  if (square % 2 == 0) return SquareKind::corner;
  return SquareKind::middle;
}

const char* reason_name(Reason reason) {
  switch (reason) {
    case Reason::win: return "Win";
    case Reason::block: return "Block";
    case Reason::threat: return "Threat";
    case Reason::empty: return "Empty";
  }
  throw std::invalid_argument("bad reason value");
}

bool has_line(std::uint16_t mask) {
  for (std::uint16_t line : kLineMasks) {
    if ((mask & line) == line) return true;
  }
  return false;
}

std::vector<int> completing_squares(const Board& board, Player side) {
  std::uint16_t own = side == Player::x ? board.x_mask : board.o_mask;
  std::uint16_t free = static_cast<std::uint16_t>(~(board.x_mask | board.o_mask) & 0x1FF);
  std::vector<int> squares;
  for (int s = 0; s < 9; ++s) {
    if (!((free >> s) & 1)) continue;
    if (has_line(static_cast<std::uint16_t>(own | (1u << s)))) squares.push_back(s);
  }
  return squares;
}

bool is_legal_nonterminal(const Board& board) {
  if (board.x_mask & ~0x1FF || board.o_mask & ~0x1FF) return false;
  if (board.x_mask & board.o_mask) return false;
  int x_count = std::popcount(board.x_mask);
  int o_count = std::popcount(board.o_mask);
  if (board.side_to_move == Player::x ? x_count != o_count : x_count != o_count + 1) {
    return false;
  }
  if (has_line(board.x_mask) || has_line(board.o_mask)) return false;
  if ((board.x_mask | board.o_mask) == 0x1FF) return false;
  return true;
}

std::vector<Board> enumerate_legal_nonterminal() {
  std::vector<Board> boards;
  // Base-3 cell states, square 0 as the most significant digit,
  // empty < X < O.
  for (int code = 0; code < 19683; ++code) {
    Board b;
    int rest = code;
    for (int s = 8; s >= 0; --s) {
      int digit = rest % 3;
      rest /= 3;
      if (digit == 1) b.x_mask |= 1u << s;
      if (digit == 2) b.o_mask |= 1u << s;
    }
    int x_count = std::popcount(b.x_mask);
    int o_count = std::popcount(b.o_mask);
    if (x_count == o_count) {
      b.side_to_move = Player::x;
    } else if (x_count == o_count + 1) {
      b.side_to_move = Player::o;
    } else {
      continue;
    }
    if (is_legal_nonterminal(b)) boards.push_back(b);
  }
  return boards;
}

MoveLabel label_move(const Board& board) {
  if (!is_legal_nonterminal(board)) {
    throw std::invalid_argument("label_move: board is terminal or illegal");
  }
  Player mover = board.side_to_move;
  Player opponent = mover == Player::x ? Player::o : Player::x;

  // Rule 1: complete three in a row.
  auto wins = completing_squares(board, mover);
  if (!wins.empty()) return {wins.front(), Reason::win};

  // Rule 2: deny the opponent's completion next turn.
  auto blocks = completing_squares(board, opponent);
  if (!blocks.empty()) return {blocks.front(), Reason::block};

  // Rule 3: create two in a row with an empty third square.
  std::uint16_t own = mover == Player::x ? board.x_mask : board.o_mask;
  std::uint16_t occupied = board.x_mask | board.o_mask;
  for (int s = 0; s < 9; ++s) {
    if ((occupied >> s) & 1) continue;
    std::uint16_t placed = static_cast<std::uint16_t>(own | (1u << s));
    for (std::uint16_t line : kLineMasks) {
      if (!((line >> s) & 1)) continue;
      bool two_own = std::popcount(static_cast<std::uint16_t>(placed & line)) == 2;
      bool third_empty = (line & occupied & ~placed) == 0;
      if (two_own && third_empty) return {s, Reason::threat};
    }
  }

  // Rule 4: any empty square, center > corners > middles.
  static constexpr std::array<int, 9> preference = {4, 0, 2, 6, 8, 1, 3, 5, 7};
  for (int s : preference) {
    if (!((occupied >> s) & 1)) return {s, Reason::empty};
  }
  throw std::invalid_argument("label_move: no empty square");  // unreachable on legal boards
}

std::array<double, 19> featurize(const Board& board) {
  std::array<double, 19> features{};
  for (int s = 0; s < 9; ++s) {
    features[s] = (board.x_mask >> s) & 1 ? 1.0 : 0.0;
    features[9 + s] = (board.o_mask >> s) & 1 ? 1.0 : 0.0;
  }
  features[18] = board.side_to_move == Player::x ? 1.0 : 0.0;
  return features;
}

Dataset build_dataset(bool with_explanations) {
  std::vector<std::string> feature_names;
  feature_names.reserve(19);
  for (int i = 0; i < 19; ++i) feature_names.push_back("f" + std::to_string(i));

  Dataset dataset(std::move(feature_names), with_explanations);
  dataset.set_task("tictactoe");
  for (const Board& board : enumerate_legal_nonterminal()) {
    MoveLabel label = label_move(board);
    auto features = featurize(board);
    dataset.add(features, std::to_string(label.square),
                with_explanations ? reason_name(label.reason) : std::string_view());
  }
  return dataset;
}

}  // namespace tedkit::ttt
