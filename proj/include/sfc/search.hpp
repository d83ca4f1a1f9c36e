#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sfc/board.hpp"

namespace sfc {

/// Winning probability of the side to move for a non-terminal position.
using EvalFn = std::function<double(const Position&)>;

struct SearchLimits {
    int max_depth = 4;
    /// Positions with at most this many empty squares are solved exactly.
    int wdl_empties_threshold = 12;
    std::optional<std::uint64_t> node_budget;
};

struct SearchResult {
    Move best_move;
    /// Probability scale; exact results are 1, 1/2 or 0.
    double score = 0.5;
    int depth_reached = 0;
    std::uint64_t nodes = 0;
    bool exact = false;
    std::optional<Label> wdl;
};

struct SearchStats {
    std::uint64_t nodes = 0;
};

/// 1, 1/2, 0 for a won, drawn, lost terminal outcome.
double terminal_value(const Outcome& outcome);

/// Flipping moves ordered for search: `first` (if legal), corners, then
/// ascending opponent mobility after the move. {Pass} when forced.
std::vector<Move> ordered_moves(const Position& p, std::optional<Move> first = std::nullopt);

/// Plain fixed-depth NegaMax on the probability scale (v -> 1 - v).
double negamax_eval(const Position& p, int depth, const EvalFn& eval, SearchStats* stats = nullptr);

/// Fail-soft NegaScout with null-window probes and re-search on fail-high.
/// Equals negamax_eval whenever that value lies inside (alpha, beta).
double negascout(const Position& p, int depth, double alpha, double beta, const EvalFn& eval,
                 SearchStats* stats = nullptr);

/// Depths 1..max_depth with the previous best move searched first. Delegates
/// to the exact solver once empties <= wdl_empties_threshold.
SearchResult iterative_deepening(const Position& p, const SearchLimits& limits, const EvalFn& eval);

struct WdlResult {
    Label label = Label::Draw;
    /// Pass for terminal positions.
    Move best_move;
    std::uint64_t nodes = 0;
};

/// Exact win/draw/loss value under perfect play plus a move achieving it.
/// Throws TooManyEmpties if the position has more than `max_empties` empty squares.
WdlResult solve_wdl_root(const Position& p, int max_empties = 20);
Label solve_wdl(const Position& p, int max_empties = 20);

/// Best-valued moves at the root by exact per-move values (used where ties
/// must be visible, e.g. randomized self-play).
struct RootMoveValue {
    Move move;
    double value;  // probability scale, or 1 / 1/2 / 0 when exact
};
std::vector<RootMoveValue> root_move_values(const Position& p, const SearchLimits& limits, const EvalFn& eval);

}  // namespace sfc
