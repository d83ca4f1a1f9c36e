#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "sfc/board.hpp"
#include "sfc/corpus.hpp"

namespace testutil {

inline sfc::Move random_move(std::mt19937_64& rng, const sfc::Position& p) {
    const auto moves = p.legal_moves();
    std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
    return moves[pick(rng)];
}

/// Uniformly random legal play for `plies` plies (passes count), stopping early at game end.
inline sfc::Position random_playout(std::mt19937_64& rng, int plies) {
    sfc::Position p = sfc::Position::initial();
    for (int i = 0; i < plies && !p.is_terminal(); ++i) p = p.apply(random_move(rng, p));
    return p;
}

/// Non-terminal position reached after a random number of plies in [lo, hi].
inline sfc::Position random_midgame(std::mt19937_64& rng, int lo = 10, int hi = 50) {
    std::uniform_int_distribution<int> plies(lo, hi);
    for (;;) {
        const sfc::Position p = random_playout(rng, plies(rng));
        if (!p.is_terminal()) return p;
    }
}

/// Non-terminal position with between `lo` and `hi` empties.
inline sfc::Position random_with_empties(std::mt19937_64& rng, int lo, int hi) {
    std::uniform_int_distribution<int> target(lo, hi);
    for (;;) {
        const int want = target(rng);
        sfc::Position p = sfc::Position::initial();
        while (!p.is_terminal() && p.empties() > want) p = p.apply(random_move(rng, p));
        if (!p.is_terminal() && p.empties() >= lo && p.empties() <= hi) return p;
    }
}

// Adds a line of play from `start` to the graph, following `choices` (index into
// legal_moves) and then the first legal move until the game ends.
inline void add_line(sfc::GameGraph& g, const sfc::Position& start, const std::vector<std::size_t>& choices) {
    sfc::Position p = start;
    std::size_t node = g.add_node(p);
    std::size_t k = 0;
    while (!p.is_terminal()) {
        const auto moves = p.legal_moves();
        const std::size_t pick = k < choices.size() ? std::min(choices[k], moves.size() - 1) : 0;
        ++k;
        p = p.apply(moves[pick]);
        const std::size_t next = g.add_node(p);
        g.add_edge(node, next);
        node = next;
    }
}

}  // namespace testutil
