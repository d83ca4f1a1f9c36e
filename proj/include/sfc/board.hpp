#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sfc {

/// One bit per square, a1 = bit 0 ... h8 = bit 63, row-major from rank 1.
using Bitboard = std::uint64_t;

enum class Colour : std::uint8_t { Black = 0, White = 1 };

constexpr Colour other(Colour c) { return c == Colour::Black ? Colour::White : Colour::Black; }

constexpr Bitboard square_bit(int sq) { return Bitboard{1} << sq; }

inline int popcount(Bitboard b) { return std::popcount(b); }

/// A square in 0..63 or the distinguished pass move.
class Move {
public:
    static constexpr int kPassSquare = 64;

    constexpr Move() = default;
    constexpr explicit Move(int square) : square_(square) {}
    static constexpr Move pass() { return Move(kPassSquare); }

    constexpr int square() const { return square_; }
    constexpr bool is_pass() const { return square_ == kPassSquare; }

    /// "a1".."h8", or "pass".
    std::string to_string() const;
    /// Accepts lowercase or uppercase coordinates and "pass"/"PS".
    static std::optional<Move> parse(std::string_view text);

    friend constexpr bool operator==(Move, Move) = default;
    friend constexpr auto operator<=>(Move, Move) = default;

private:
    int square_ = kPassSquare;
};

/// Game-theoretic label from the perspective of the side to move.
enum class Label : std::int8_t { Loss = -1, Draw = 0, Win = 1 };

constexpr Label negate(Label l) { return static_cast<Label>(-static_cast<int>(l)); }
const char* to_string(Label l);

struct Outcome {
    Label label = Label::Draw;
    /// Mover's discs minus opponent's discs at game end, when known.
    std::optional<int> disc_differential;

    static Outcome from_differential(int diff);
    friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Flipping-move mask for `own` against `opp`.
Bitboard move_mask(Bitboard own, Bitboard opp);
/// Discs flipped by `own` placing on `sq`; zero when the move is not a flipping move.
Bitboard flip_mask(Bitboard own, Bitboard opp, int sq);

/// Othello position: occupancy masks plus side to move. Immutable value type.
class Position {
public:
    /// The standard start position.
    Position() : Position(initial()) {}
    /// Standard start: White d4,e5; Black d5,e4; Black to move.
    static Position initial();
    /// Validates the occupancy invariants; throws std::invalid_argument.
    static Position from_masks(Bitboard black, Bitboard white, Colour to_move);
    /// 64 characters of 'X' (black), 'O' (white), '-' (empty) from a1 to h8,
    /// then whitespace and 'X' or 'O' for the side to move.
    static Position parse(std::string_view text);
    std::string to_string() const;
    /// Human-readable 8x8 diagram, rank 8 at the top.
    std::string diagram() const;

    Bitboard black() const { return black_; }
    Bitboard white() const { return white_; }
    Colour to_move() const { return to_move_; }
    Bitboard mover_discs() const { return to_move_ == Colour::Black ? black_ : white_; }
    Bitboard opponent_discs() const { return to_move_ == Colour::Black ? white_ : black_; }
    Bitboard occupied() const { return black_ | white_; }
    Bitboard empty() const { return ~occupied(); }

    int disc_count() const { return popcount(occupied()); }
    int empties() const { return 64 - disc_count(); }

    /// Squares where the mover flips at least one disc.
    Bitboard flipping_moves() const { return move_mask(mover_discs(), opponent_discs()); }
    Bitboard opponent_flipping_moves() const { return move_mask(opponent_discs(), mover_discs()); }

    /// Flipping moves in ascending square order; {Pass} if only the opponent can
    /// move; empty when neither side can move.
    std::vector<Move> legal_moves() const;
    bool is_legal(Move m) const;
    bool is_terminal() const { return flipping_moves() == 0 && opponent_flipping_moves() == 0; }
    /// Mover must pass (no flipping move, but the opponent has one).
    bool must_pass() const { return flipping_moves() == 0 && opponent_flipping_moves() != 0; }

    /// Throws IllegalMove if `m` is not in legal_moves().
    Position apply(Move m) const;
    /// apply() without the legality check; `m` must be legal.
    Position play(Move m) const;

    /// Present only when neither side can move.
    std::optional<Outcome> terminal_outcome() const;

    /// Same discs, other side to move: the mover's and opponent's discs trade roles.
    Position toggled_mover() const;

    friend bool operator==(const Position&, const Position&) = default;

private:
    Position(Bitboard black, Bitboard white, Colour to_move)
        : black_(black), white_(white), to_move_(to_move) {}

    Bitboard black_ = 0;
    Bitboard white_ = 0;
    Colour to_move_ = Colour::Black;
};

struct PositionHash {
    std::size_t operator()(const Position& p) const noexcept;
};

// Free-function spellings of the core operations.
inline Position initial_position() { return Position::initial(); }
inline std::vector<Move> legal_moves(const Position& p) { return p.legal_moves(); }
inline Position apply_move(const Position& p, Move m) { return p.apply(m); }
inline int disc_count(const Position& p) { return p.disc_count(); }
inline std::optional<Outcome> terminal_outcome(const Position& p) { return p.terminal_outcome(); }

/// Replays non-pass moves from `start`, inserting passes where the mover has
/// no flipping move. Throws IllegalMove on the first illegal move.
Position replay(const Position& start, const std::vector<Move>& moves);

}  // namespace sfc
