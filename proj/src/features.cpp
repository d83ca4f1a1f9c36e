#include "sfc/features.hpp"

#include "sfc/errors.hpp"

namespace sfc::features {

namespace {

constexpr Bitboard kNotAFile = 0xfefefefefefefefeULL;
constexpr Bitboard kNotHFile = 0x7f7f7f7f7f7f7f7fULL;

Bitboard neighbours(Bitboard b) {
    const Bitboard horiz = ((b << 1) & kNotAFile) | ((b >> 1) & kNotHFile);
    const Bitboard row = b | horiz;
    return (horiz | (row << 8) | (row >> 8)) & ~b;
}

// Walks from `corner` in steps of `step` for at most 7 squares while the squares are own.
Bitboard corner_run(Bitboard own, int corner, int step) {
    Bitboard run = 0;
    int sq = corner;
    for (int i = 0; i < 8; ++i, sq += step) {
        if (!(own & square_bit(sq))) break;
        run |= square_bit(sq);
    }
    return run;
}

}  // namespace

const FeatureSetDescriptor& describe() {
    static const FeatureSetDescriptor descriptor{
        "sfc-basic-1",
        {"const", "disc_diff", "mobility_diff", "potential_mobility_diff", "corner_diff",
         "x_square_diff", "c_square_diff", "frontier_diff", "stable_edge_diff", "parity"}};
    return descriptor;
}

Bitboard adjacent_empties(Bitboard discs, Bitboard empty) { return neighbours(discs) & empty; }

Bitboard stable_edge_discs(Bitboard own) {
    // a1 = 0, h1 = 7, a8 = 56, h8 = 63
    return corner_run(own, 0, 1) | corner_run(own, 0, 8) | corner_run(own, 7, -1) |
           corner_run(own, 7, 8) | corner_run(own, 56, 1) | corner_run(own, 56, -8) |
           corner_run(own, 63, -1) | corner_run(own, 63, -8);
}

FeatureVector extract(const Position& p) {
    if (p.is_terminal()) throw TerminalPosition("cannot evaluate terminal position " + p.to_string());

    const Bitboard own = p.mover_discs();
    const Bitboard opp = p.opponent_discs();
    const Bitboard empty = p.empty();
    const auto diff = [](Bitboard a, Bitboard b) { return static_cast<double>(popcount(a) - popcount(b)); };

    FeatureVector x(kCount);
    x[kConst] = 1.0;
    x[kDiscDiff] = diff(own, opp);
    x[kMobilityDiff] = diff(move_mask(own, opp), move_mask(opp, own));
    x[kPotentialMobilityDiff] = diff(adjacent_empties(opp, empty), adjacent_empties(own, empty));
    x[kCornerDiff] = diff(own & kCorners, opp & kCorners);
    x[kXSquareDiff] = diff(own & kXSquares, opp & kXSquares);
    x[kCSquareDiff] = diff(own & kCSquares, opp & kCSquares);
    const Bitboard frontier = neighbours(empty);
    x[kFrontierDiff] = diff(own & frontier, opp & frontier);
    x[kStableEdgeDiff] = diff(stable_edge_discs(own), stable_edge_discs(opp));
    x[kParity] = (p.empties() % 2 == 1) ? 1.0 : -1.0;
    return x;
}

}  // namespace sfc::features
