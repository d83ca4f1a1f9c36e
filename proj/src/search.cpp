#include "sfc/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfc/errors.hpp"
#include "sfc/features.hpp"

namespace sfc {

// Search values are kept centred at 1/2 internally (v - 1/2), so the NegaMax
// negation v -> 1 - v becomes an exact sign flip.

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BudgetExhausted {};

double centred_terminal(const Position& p) {
    const int diff = popcount(p.mover_discs()) - popcount(p.opponent_discs());
    return diff > 0 ? 0.5 : (diff < 0 ? -0.5 : 0.0);
}

int wdl_terminal(const Position& p) {
    const int diff = popcount(p.mover_discs()) - popcount(p.opponent_discs());
    return diff > 0 ? 1 : (diff < 0 ? -1 : 0);
}

class Searcher {
public:
    Searcher(const EvalFn& eval, std::optional<std::uint64_t> budget) : eval_(eval), budget_(budget) {}

    std::uint64_t nodes() const { return nodes_; }

    double negamax(const Position& p, int depth) {
        visit();
        if (p.is_terminal()) return centred_terminal(p);
        if (depth == 0) return eval_(p) - 0.5;
        double best = -kInf;
        for (const Move m : p.legal_moves()) best = std::max(best, -negamax(p.play(m), depth - 1));
        return best;
    }

    double scout(const Position& p, int depth, double alpha, double beta) {
        visit();
        if (p.is_terminal()) return centred_terminal(p);
        if (depth == 0) return eval_(p) - 0.5;
        double best = -kInf;
        bool first = true;
        for (const Move m : ordered_moves(p)) {
            const Position child = p.play(m);
            double v;
            if (first) {
                v = -scout(child, depth - 1, -beta, -alpha);
                first = false;
            } else {
                // null window (alpha, next(alpha)): no value lies strictly inside
                const double probe_hi = std::nextafter(alpha, kInf);
                v = -scout(child, depth - 1, -probe_hi, -alpha);
                if (v > alpha && v < beta) v = -scout(child, depth - 1, -beta, -alpha);
            }
            if (v > best) best = v;
            if (best > alpha) alpha = best;
            if (alpha >= beta) break;
        }
        return best;
    }

    // Root of one iteration: exact value of every move up to the running best.
    std::pair<Move, double> root(const Position& p, int depth, std::optional<Move> first_move) {
        visit();
        const auto moves = ordered_moves(p, first_move);
        double alpha = -1.0;
        const double beta = 1.0;
        Move best_move = moves.front();
        double best = -kInf;
        bool first = true;
        for (const Move m : moves) {
            const Position child = p.play(m);
            double v;
            if (first) {
                v = -scout(child, depth - 1, -beta, -alpha);
                first = false;
            } else {
                const double probe_hi = std::nextafter(alpha, kInf);
                v = -scout(child, depth - 1, -probe_hi, -alpha);
                if (v > alpha && v < beta) v = -scout(child, depth - 1, -beta, -alpha);
            }
            if (v > best) {
                best = v;
                best_move = m;
            }
            if (best > alpha) alpha = best;
        }
        return {best_move, best};
    }

    int wdl(const Position& p, int alpha, int beta) {
        visit();
        const Bitboard own = p.mover_discs();
        const Bitboard opp = p.opponent_discs();
        if (move_mask(own, opp) == 0) {
            if (move_mask(opp, own) == 0) return wdl_terminal(p);
            return -wdl(p.play(Move::pass()), -beta, -alpha);
        }
        int best = -2;
        for (const Move m : ordered_moves(p)) {
            const int v = -wdl(p.play(m), -beta, -alpha);
            if (v > best) best = v;
            if (best > alpha) alpha = best;
            if (alpha >= beta) break;
        }
        return best;
    }

private:
    void visit() {
        if (budget_ && nodes_ >= *budget_) throw BudgetExhausted{};
        ++nodes_;
    }

    const EvalFn& eval_;
    std::optional<std::uint64_t> budget_;
    std::uint64_t nodes_ = 0;
};

Label to_label(int v) { return v > 0 ? Label::Win : (v < 0 ? Label::Loss : Label::Draw); }

}  // namespace

double terminal_value(const Outcome& outcome) {
    switch (outcome.label) {
        case Label::Win: return 1.0;
        case Label::Draw: return 0.5;
        case Label::Loss: return 0.0;
    }
    return 0.5;
}

std::vector<Move> ordered_moves(const Position& p, std::optional<Move> first) {
    const Bitboard own = p.mover_discs();
    const Bitboard opp = p.opponent_discs();
    Bitboard mask = move_mask(own, opp);
    if (mask == 0) {
        if (move_mask(opp, own) != 0) return {Move::pass()};
        return {};
    }
    struct Keyed {
        int key;
        Move move;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(popcount(mask));
    while (mask) {
        const int sq = std::countr_zero(mask);
        mask &= mask - 1;
        int key;
        if (first && first->square() == sq) {
            key = -1000;
        } else if (features::kCorners & square_bit(sq)) {
            key = -100;
        } else {
            const Bitboard flipped = flip_mask(own, opp, sq);
            const Bitboard new_own = own | flipped | square_bit(sq);
            key = popcount(move_mask(opp & ~flipped, new_own));
        }
        keyed.push_back({key, Move(sq)});
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
    std::vector<Move> moves;
    moves.reserve(keyed.size());
    for (const auto& k : keyed) moves.push_back(k.move);
    return moves;
}

double negamax_eval(const Position& p, int depth, const EvalFn& eval, SearchStats* stats) {
    if (depth == 0 && !p.is_terminal()) {
        if (stats) stats->nodes += 1;
        return eval(p);
    }
    Searcher s(eval, std::nullopt);
    const double v = 0.5 + s.negamax(p, depth);
    if (stats) stats->nodes += s.nodes();
    return v;
}

double negascout(const Position& p, int depth, double alpha, double beta, const EvalFn& eval, SearchStats* stats) {
    if (depth == 0 && !p.is_terminal()) {
        if (stats) stats->nodes += 1;
        return eval(p);
    }
    Searcher s(eval, std::nullopt);
    const double v = 0.5 + s.scout(p, depth, alpha - 0.5, beta - 0.5);
    if (stats) stats->nodes += s.nodes();
    return v;
}

WdlResult solve_wdl_root(const Position& p, int max_empties) {
    if (p.empties() > max_empties) {
        throw TooManyEmpties("position has " + std::to_string(p.empties()) + " empties, solver limit is " +
                             std::to_string(max_empties));
    }
    static const EvalFn kNoEval = [](const Position&) { return 0.5; };
    Searcher s(kNoEval, std::nullopt);
    WdlResult result;
    if (p.is_terminal()) {
        result.label = to_label(wdl_terminal(p));
        result.best_move = Move::pass();
        result.nodes = 1;
        return result;
    }
    const auto moves = ordered_moves(p);
    int alpha = -1;
    int best = -2;
    Move best_move = moves.front();
    for (const Move m : moves) {
        const int v = -s.wdl(p.play(m), -1, -alpha);
        if (v > best) {
            best = v;
            best_move = m;
        }
        if (best > alpha) alpha = best;
        if (alpha >= 1) break;
    }
    result.label = to_label(best);
    result.best_move = best_move;
    result.nodes = s.nodes() + 1;
    return result;
}

Label solve_wdl(const Position& p, int max_empties) { return solve_wdl_root(p, max_empties).label; }

SearchResult iterative_deepening(const Position& p, const SearchLimits& limits, const EvalFn& eval) {
    if (p.is_terminal()) throw TerminalPosition("cannot search terminal position " + p.to_string());
    if (limits.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");

    SearchResult result;
    if (p.empties() <= limits.wdl_empties_threshold) {
        const WdlResult solved = solve_wdl_root(p, std::max(limits.wdl_empties_threshold, p.empties()));
        result.best_move = solved.best_move;
        result.score = solved.label == Label::Win ? 1.0 : (solved.label == Label::Draw ? 0.5 : 0.0);
        result.depth_reached = p.empties();
        result.nodes = solved.nodes;
        result.exact = true;
        result.wdl = solved.label;
        return result;
    }

    const auto moves = ordered_moves(p);
    result.best_move = moves.front();
    std::uint64_t total_nodes = 0;
    std::optional<Move> previous_best;
    for (int depth = 1; depth <= limits.max_depth; ++depth) {
        std::optional<std::uint64_t> remaining;
        if (limits.node_budget) {
            if (total_nodes >= *limits.node_budget) break;
            remaining = *limits.node_budget - total_nodes;
        }
        Searcher s(eval, remaining);
        try {
            const auto [move, value] = s.root(p, depth, previous_best);
            total_nodes += s.nodes();
            result.best_move = move;
            result.score = 0.5 + value;
            result.depth_reached = depth;
            previous_best = move;
        } catch (const BudgetExhausted&) {
            total_nodes += s.nodes();
            break;
        }
    }
    result.nodes = std::max<std::uint64_t>(total_nodes, 1);
    if (result.depth_reached == 0) {
        // not even depth 1 fit in the budget: fall back to the static ordering
        result.score = 0.5;
    }
    return result;
}

std::vector<RootMoveValue> root_move_values(const Position& p, const SearchLimits& limits, const EvalFn& eval) {
    if (p.is_terminal()) throw TerminalPosition("cannot search terminal position " + p.to_string());
    std::vector<RootMoveValue> values;
    const bool exact = p.empties() <= limits.wdl_empties_threshold;
    for (const Move m : p.legal_moves()) {
        const Position child = p.play(m);
        double v;
        if (exact) {
            const Label child_label = solve_wdl(child, std::max(limits.wdl_empties_threshold, child.empties()));
            v = terminal_value(Outcome{negate(child_label), std::nullopt});
        } else if (child.is_terminal()) {
            v = 1.0 - terminal_value(*child.terminal_outcome());
        } else if (limits.max_depth <= 1) {
            v = 0.5 - (eval(child) - 0.5);
        } else {
            v = 0.5 - (negascout(child, limits.max_depth - 1, 0.0, 1.0, eval) - 0.5);
        }
        values.push_back({m, v});
    }
    return values;
}

}  // namespace sfc
