#include "sfc/board.hpp"

#include <cctype>
#include <stdexcept>

#include "sfc/errors.hpp"

namespace sfc {

namespace {

constexpr Bitboard kNotAFile = 0xfefefefefefefefeULL;
constexpr Bitboard kNotHFile = 0x7f7f7f7f7f7f7f7fULL;

// Eight ray directions. Each shift masks off squares that wrapped around a file edge.
template <int Dir>
constexpr Bitboard shift(Bitboard b) {
    if constexpr (Dir == 1) return (b << 1) & kNotAFile;   // east
    if constexpr (Dir == -1) return (b >> 1) & kNotHFile;  // west
    if constexpr (Dir == 8) return b << 8;                 // north
    if constexpr (Dir == -8) return b >> 8;                // south
    if constexpr (Dir == 9) return (b << 9) & kNotAFile;   // north-east
    if constexpr (Dir == 7) return (b << 7) & kNotHFile;   // north-west
    if constexpr (Dir == -7) return (b >> 7) & kNotAFile;  // south-east
    if constexpr (Dir == -9) return (b >> 9) & kNotHFile;  // south-west
}

template <int Dir>
Bitboard moves_in_direction(Bitboard own, Bitboard opp, Bitboard empty) {
    Bitboard run = shift<Dir>(own) & opp;
    run |= shift<Dir>(run) & opp;
    run |= shift<Dir>(run) & opp;
    run |= shift<Dir>(run) & opp;
    run |= shift<Dir>(run) & opp;
    run |= shift<Dir>(run) & opp;
    return shift<Dir>(run) & empty;
}

template <int Dir>
Bitboard flips_in_direction(Bitboard own, Bitboard opp, Bitboard placed) {
    Bitboard flipped = 0;
    Bitboard cursor = shift<Dir>(placed);
    while (cursor & opp) {
        flipped |= cursor;
        cursor = shift<Dir>(cursor);
    }
    return (cursor & own) ? flipped : 0;
}

}  // namespace

Bitboard move_mask(Bitboard own, Bitboard opp) {
    const Bitboard empty = ~(own | opp);
    return moves_in_direction<1>(own, opp, empty) | moves_in_direction<-1>(own, opp, empty) |
           moves_in_direction<8>(own, opp, empty) | moves_in_direction<-8>(own, opp, empty) |
           moves_in_direction<9>(own, opp, empty) | moves_in_direction<7>(own, opp, empty) |
           moves_in_direction<-7>(own, opp, empty) | moves_in_direction<-9>(own, opp, empty);
}

Bitboard flip_mask(Bitboard own, Bitboard opp, int sq) {
    const Bitboard placed = square_bit(sq);
    if ((own | opp) & placed) return 0;
    return flips_in_direction<1>(own, opp, placed) | flips_in_direction<-1>(own, opp, placed) |
           flips_in_direction<8>(own, opp, placed) | flips_in_direction<-8>(own, opp, placed) |
           flips_in_direction<9>(own, opp, placed) | flips_in_direction<7>(own, opp, placed) |
           flips_in_direction<-7>(own, opp, placed) | flips_in_direction<-9>(own, opp, placed);
}

std::string Move::to_string() const {
    if (is_pass()) return "pass";
    return {static_cast<char>('a' + square_ % 8), static_cast<char>('1' + square_ / 8)};
}

std::optional<Move> Move::parse(std::string_view text) {
    if (text == "pass" || text == "PASS" || text == "PS" || text == "ps") return Move::pass();
    if (text.size() != 2) return std::nullopt;
    const char file = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
    const char rank = text[1];
    if (file < 'a' || file > 'h' || rank < '1' || rank > '8') return std::nullopt;
    return Move((rank - '1') * 8 + (file - 'a'));
}

const char* to_string(Label l) {
    switch (l) {
        case Label::Win: return "Win";
        case Label::Draw: return "Draw";
        case Label::Loss: return "Loss";
    }
    return "?";
}

Outcome Outcome::from_differential(int diff) {
    const Label label = diff > 0 ? Label::Win : (diff < 0 ? Label::Loss : Label::Draw);
    return Outcome{label, diff};
}

Position Position::initial() {
    // d4 = 27, e4 = 28, d5 = 35, e5 = 36
    return Position(square_bit(28) | square_bit(35), square_bit(27) | square_bit(36), Colour::Black);
}

Position Position::from_masks(Bitboard black, Bitboard white, Colour to_move) {
    if (black & white) throw std::invalid_argument("square occupied by both colours");
    const int discs = popcount(black | white);
    if (discs < 4) throw std::invalid_argument("position has fewer than 4 discs");
    return Position(black, white, to_move);
}

Position Position::parse(std::string_view text) {
    Bitboard black = 0;
    Bitboard white = 0;
    int sq = 0;
    std::size_t i = 0;
    for (; i < text.size() && sq < 64; ++i) {
        const char c = text[i];
        if (c == 'X' || c == 'x' || c == '*') {
            black |= square_bit(sq++);
        } else if (c == 'O' || c == 'o') {
            white |= square_bit(sq++);
        } else if (c == '-' || c == '.') {
            ++sq;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            throw std::invalid_argument("bad board character '" + std::string(1, c) + "'");
        }
    }
    if (sq != 64) throw std::invalid_argument("board string has fewer than 64 squares");
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) throw std::invalid_argument("missing side to move");
    Colour mover;
    switch (text[i]) {
        case 'X': case 'x': case '*': mover = Colour::Black; break;
        case 'O': case 'o': mover = Colour::White; break;
        default: throw std::invalid_argument("bad side-to-move character");
    }
    return from_masks(black, white, mover);
}

std::string Position::to_string() const {
    std::string out(66, '-');
    for (int sq = 0; sq < 64; ++sq) {
        if (black_ & square_bit(sq)) out[sq] = 'X';
        else if (white_ & square_bit(sq)) out[sq] = 'O';
    }
    out[64] = ' ';
    out[65] = to_move_ == Colour::Black ? 'X' : 'O';
    return out;
}

std::string Position::diagram() const {
    std::string out = "  a b c d e f g h\n";
    for (int rank = 7; rank >= 0; --rank) {
        out += static_cast<char>('1' + rank);
        for (int file = 0; file < 8; ++file) {
            const int sq = rank * 8 + file;
            out += ' ';
            out += (black_ & square_bit(sq)) ? 'X' : (white_ & square_bit(sq)) ? 'O' : '-';
        }
        out += '\n';
    }
    out += to_move_ == Colour::Black ? "X to move\n" : "O to move\n";
    return out;
}

std::vector<Move> Position::legal_moves() const {
    std::vector<Move> moves;
    Bitboard mask = flipping_moves();
    if (mask == 0) {
        if (opponent_flipping_moves() != 0) moves.push_back(Move::pass());
        return moves;
    }
    moves.reserve(popcount(mask));
    while (mask) {
        moves.emplace_back(std::countr_zero(mask));
        mask &= mask - 1;
    }
    return moves;
}

bool Position::is_legal(Move m) const {
    if (m.is_pass()) return must_pass();
    if (m.square() < 0 || m.square() >= 64) return false;
    return (flipping_moves() & square_bit(m.square())) != 0;
}

Position Position::apply(Move m) const {
    if (!is_legal(m)) {
        throw IllegalMove("illegal move " + m.to_string() + " in " + to_string());
    }
    return play(m);
}

Position Position::play(Move m) const {
    if (m.is_pass()) return Position(black_, white_, other(to_move_));
    const Bitboard own = mover_discs();
    const Bitboard opp = opponent_discs();
    const Bitboard flipped = flip_mask(own, opp, m.square());
    const Bitboard new_own = own | flipped | square_bit(m.square());
    const Bitboard new_opp = opp & ~flipped;
    if (to_move_ == Colour::Black) return Position(new_own, new_opp, Colour::White);
    return Position(new_opp, new_own, Colour::Black);
}

std::optional<Outcome> Position::terminal_outcome() const {
    if (!is_terminal()) return std::nullopt;
    return Outcome::from_differential(popcount(mover_discs()) - popcount(opponent_discs()));
}

Position Position::toggled_mover() const { return Position(black_, white_, other(to_move_)); }

std::size_t PositionHash::operator()(const Position& p) const noexcept {
    std::uint64_t h = p.black() * 0x9e3779b97f4a7c15ULL;
    h ^= (p.white() + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2));
    h ^= static_cast<std::uint64_t>(p.to_move()) * 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
    return static_cast<std::size_t>(h);
}

Position replay(const Position& start, const std::vector<Move>& moves) {
    Position pos = start;
    for (const Move m : moves) {
        if (!m.is_pass() && pos.must_pass()) pos = pos.apply(Move::pass());
        pos = pos.apply(m);
    }
    if (pos.must_pass()) pos = pos.apply(Move::pass());
    return pos;
}

}  // namespace sfc
