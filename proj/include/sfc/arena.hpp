#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sfc/board.hpp"
#include "sfc/search.hpp"

namespace sfc {

struct EngineConfig {
    std::string name;
    EvalFn eval;
    SearchLimits limits;
};

struct GameLog {
    Position opening;
    /// Engine playing the opening's side to move, and its opponent.
    std::string first;
    std::string second;
    std::vector<Move> moves;
    /// Final discs of `first` minus discs of `second`.
    int differential = 0;
};

/// Counts from engine A's perspective.
struct MatchTally {
    std::size_t wins = 0;
    std::size_t draws = 0;
    std::size_t losses = 0;
    std::vector<GameLog> games;

    std::size_t total() const { return wins + draws + losses; }
    void add(Label result_for_a);
    /// The same games seen from engine B.
    MatchTally mirrored() const;
};

/// The `count` book positions whose evaluation is closest to 1/2, keeping only
/// those inside [0.4, 0.6]; ties keep book order. Book positions must have 14
/// discs. Throws InsufficientBalancedOpenings when too few qualify.
std::vector<Position> select_openings(const std::vector<Position>& book, const EvalFn& eval, std::size_t count);

/// Plays `opening` to the end: `first` moves in the opening position.
GameLog play_game(const Position& opening, const EngineConfig& first, const EngineConfig& second);

/// Game and return game with colours reversed; results from a's perspective.
struct PairResult {
    GameLog game1;
    GameLog game2;
    Label a_game1 = Label::Draw;
    Label a_game2 = Label::Draw;
};
PairResult play_pair(const Position& opening, const EngineConfig& a, const EngineConfig& b);

/// (wins + draws / 2) / games.
double winning_percentage(const MatchTally& t);
/// One decimal, rounded half up from the exact count ratio: "61.8%".
std::string format_percentage(std::size_t wins, std::size_t draws, std::size_t losses);

/// Exact two-sided binomial sign test on decisive games (draws dropped).
double sign_test_p_value(std::size_t wins, std::size_t losses);
/// Two-sided normal test of the draws-as-half score against 1/2 with sd 0.5 / sqrt(N).
double score_test_p_value(std::size_t wins, std::size_t draws, std::size_t losses);

struct Significance {
    double p_value = 1.0;  // max of the two tests
    bool significant = false;
    double sign_p = 1.0;
    double score_p = 1.0;
};
Significance significance(const MatchTally& t, double level = 0.05);

struct TournamentRow {
    std::string engine_a;
    std::string engine_b;
    std::string limits;  // e.g. "depth 3 - 1"
    MatchTally tally;
    Significance sig;
    std::string error;  // non-empty when the pairing was aborted
};

struct TournamentReport {
    std::vector<TournamentRow> rows;
    double level = 0.05;

    std::string to_text() const;
    /// "pairing,wins,draws,losses,win_pct,p_value,significant"
    std::string to_csv() const;
};

TournamentReport run_tournament(const std::vector<Position>& openings, const std::vector<EngineConfig>& engines,
                                const std::vector<std::pair<std::string, std::string>>& pairings,
                                double level = 0.05);

}  // namespace sfc
