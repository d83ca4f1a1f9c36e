#pragma once

#include <array>
#include <string>
#include <vector>

#include "sfc/board.hpp"

namespace sfc {

/// Feature values of one position; element 0 is the constant intercept 1.
using FeatureVector = std::vector<double>;

struct FeatureSetDescriptor {
    std::string version;
    std::vector<std::string> names;

    std::size_t size() const { return names.size(); }
    friend bool operator==(const FeatureSetDescriptor&, const FeatureSetDescriptor&) = default;
};

namespace features {

enum Index : int {
    kConst = 0,
    kDiscDiff,
    kMobilityDiff,
    kPotentialMobilityDiff,
    kCornerDiff,
    kXSquareDiff,
    kCSquareDiff,
    kFrontierDiff,
    kStableEdgeDiff,
    kParity,
    kCount
};

inline constexpr Bitboard kCorners = 0x8100000000000081ULL;
// b2, g2, b7, g7
inline constexpr Bitboard kXSquares = 0x0042000000004200ULL;
// a2, b1, g1, h2, a7, b8, g8, h7
inline constexpr Bitboard kCSquares = 0x4281000000008142ULL;

/// Inclusive bound on |value| for each feature, used by property tests.
inline constexpr std::array<double, kCount> kMagnitudeBound = {1, 64, 60, 60, 4, 4, 8, 64, 28, 1};

/// Stable version id and names for the feature set.
const FeatureSetDescriptor& describe();

/// Raw counts from the mover's perspective. Throws TerminalPosition for
/// positions where neither side can move.
FeatureVector extract(const Position& p);

/// Empty squares 8-adjacent to any disc in `discs`.
Bitboard adjacent_empties(Bitboard discs, Bitboard empty);

/// Edge discs of `own` connected to an own corner by an unbroken own run along that edge.
Bitboard stable_edge_discs(Bitboard own);

}  // namespace features

}  // namespace sfc
