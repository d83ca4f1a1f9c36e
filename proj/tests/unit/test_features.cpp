#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "sfc/errors.hpp"
#include "sfc/features.hpp"

using namespace sfc;
namespace f = sfc::features;

TEST_CASE("descriptor") {
    const auto& d = f::describe();
    CHECK(d.size() == 10);
    CHECK(d.names[0] == "const");
    CHECK(d.version == "sfc-basic-1");
    CHECK(f::describe() == d);
}

TEST_CASE("start position features") {
    const FeatureVector x = f::extract(Position::initial());
    REQUIRE(x.size() == 10);
    CHECK(x[f::kConst] == 1.0);
    for (int k = 1; k < f::kParity; ++k) CHECK(x[k] == 0.0);
    // 60 empties: even
    CHECK(x[f::kParity] == -1.0);
}

TEST_CASE("mover holding every corner") {
    const Position start = Position::initial();
    const Position p = Position::from_masks(start.black() | f::kCorners, start.white(), Colour::Black);
    const FeatureVector x = f::extract(p);
    CHECK(x[f::kCornerDiff] == 4.0);
    CHECK(f::extract(p.toggled_mover())[f::kCornerDiff] == -4.0);
    // each corner is a one-disc stable edge run
    CHECK(x[f::kStableEdgeDiff] == 4.0);
}

TEST_CASE("stable edge runs start at an own corner") {
    const Bitboard a1 = square_bit(0), b1 = square_bit(1), c1 = square_bit(2), e1 = square_bit(4);
    CHECK(f::stable_edge_discs(a1 | b1 | c1 | e1) == (a1 | b1 | c1));
    CHECK(f::stable_edge_discs(b1 | c1) == 0);
    // a full first rank counts each square once
    CHECK(popcount(f::stable_edge_discs(0xFFULL)) == 8);
}

TEST_CASE("terminal positions are rejected") {
    const Bitboard black = 0x000000FFFFFFFFFFULL;
    CHECK_THROWS_AS(f::extract(Position::from_masks(black, ~black, Colour::Black)), TerminalPosition);
}

TEST_CASE("difference features are antisymmetric under a role exchange on 10000 positions") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const Position p = testutil::random_midgame(rng, 0, 58);
        const FeatureVector x = f::extract(p);
        const FeatureVector y = f::extract(p.toggled_mover());
        REQUIRE(y[f::kConst] == 1.0);
        for (int k = 1; k < f::kParity; ++k) REQUIRE(y[k] == -x[k]);
        REQUIRE(y[f::kParity] == x[f::kParity]);
    }
}

TEST_CASE("feature values stay within their bounds along random playouts") {
    std::mt19937_64 rng(77);
    for (int game = 0; game < 300; ++game) {
        Position p = Position::initial();
        while (!p.is_terminal()) {
            const FeatureVector x = f::extract(p);
            for (int k = 0; k < f::kCount; ++k) REQUIRE(std::abs(x[k]) <= f::kMagnitudeBound[k]);
            CHECK(x == f::extract(p));
            p = p.apply(testutil::random_move(rng, p));
        }
    }
}
