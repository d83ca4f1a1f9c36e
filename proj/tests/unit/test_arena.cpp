#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sfc/arena.hpp"
#include "sfc/corpus.hpp"
#include "sfc/errors.hpp"
#include "sfc/pipeline.hpp"

using namespace sfc;

namespace {

MatchTally tally(std::size_t w, std::size_t d, std::size_t l) {
    MatchTally t;
    t.wins = w;
    t.draws = d;
    t.losses = l;
    return t;
}

EngineConfig engine(const std::string& name, int depth) {
    static const ModelParams model = heuristic_model();
    SearchLimits limits;
    limits.max_depth = depth;
    limits.wdl_empties_threshold = 8;
    return EngineConfig{name, [](const Position& p) { return evaluate(model, p); }, limits};
}

}  // namespace

TEST_CASE("winning percentages of reference tallies") {
    CHECK(winning_percentage(tally(116, 15, 69)) == doctest::Approx(0.6175));
    CHECK(winning_percentage(tally(112, 15, 73)) == doctest::Approx(0.5975));
    CHECK(winning_percentage(tally(0, 10, 0)) == 0.5);
    CHECK(format_percentage(116, 15, 69) == "61.8%");
    CHECK(format_percentage(112, 15, 73) == "59.8%");
    CHECK(format_percentage(93, 35, 72) == "55.3%");
    CHECK(format_percentage(86, 24, 90) == "49.0%");
    CHECK(format_percentage(93, 33, 74) == "54.8%");
    CHECK(format_percentage(84, 30, 86) == "49.5%");
    CHECK(format_percentage(88, 26, 86) == "50.5%");
    CHECK(format_percentage(0, 0, 3) == "0.0%");
    CHECK(format_percentage(3, 0, 0) == "100.0%");
    CHECK_THROWS_AS(winning_percentage(tally(0, 0, 0)), std::invalid_argument);
}

TEST_CASE("significance of reference tallies") {
    CHECK(significance(tally(116, 15, 69)).significant);
    CHECK(significance(tally(112, 15, 73)).significant);
    CHECK_FALSE(significance(tally(93, 35, 72)).significant);
    const auto balanced = significance(tally(100, 0, 100));
    CHECK(balanced.p_value == 1.0);
    CHECK_FALSE(balanced.significant);
}

TEST_CASE("sign test against the product oracle") {
    for (std::size_t w = 0; w <= 60; w += 3)
        for (std::size_t l = 0; l <= 60; l += 4) CHECK(sign_test_p_value(w, l) == doctest::Approx(oracle::sign_test(w, l)).epsilon(1e-10));
    CHECK(sign_test_p_value(0, 0) == 1.0);
    // z = 2.5 for a 0.625 score over 100 games
    CHECK(score_test_p_value(50, 25, 25) == doctest::Approx(std::erfc(2.5 / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("p-value does not grow as wins replace losses while ahead") {
    for (std::size_t games : {20u, 200u}) {
        for (std::size_t d = 0; d <= games; d += games / 10) {
            const std::size_t decisive = games - d;
            double previous = 2.0;
            for (std::size_t w = (decisive + 1) / 2; w <= decisive; ++w) {
                const double p = significance(tally(w, d, decisive - w)).p_value;
                CHECK(p <= previous);
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
                previous = p;
            }
        }
    }
    // mirrored tallies share a p-value
    CHECK(significance(tally(70, 10, 20)).p_value == significance(tally(20, 10, 70)).p_value);
}

TEST_CASE("tally mirror") {
    MatchTally t = tally(5, 2, 3);
    const MatchTally m = t.mirrored();
    CHECK(m.wins == 3);
    CHECK(m.losses == 5);
    CHECK(m.draws == 2);
    t.add(Label::Win);
    t.add(Label::Draw);
    CHECK(t.total() == 12);
}

TEST_CASE("opening selection") {
    const auto book = pipeline::random_book(14, 30, 1);
    const EvalFn half = [](const Position&) { return 0.5; };
    const auto first = select_openings(book, half, 10);
    REQUIRE(first.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(first[i] == book[i]);
    CHECK(select_openings(book, half, 0).empty());

    const Position lopsided = book[3];
    const EvalFn one_high = [&](const Position& p) { return p == lopsided ? 0.9 : 0.5; };
    const auto picked = select_openings(book, one_high, 29);
    CHECK(std::find(picked.begin(), picked.end(), lopsided) == picked.end());
    CHECK_THROWS_AS(select_openings(book, one_high, 30), InsufficientBalancedOpenings);

    // closest to one half first
    const EvalFn graded = [&](const Position& p) {
        const auto it = std::find(book.begin(), book.end(), p);
        return 0.4 + 0.2 * static_cast<double>(it - book.begin()) / 29.0;
    };
    const auto middle = select_openings(book, graded, 2);
    REQUIRE(middle.size() == 2);
    CHECK(middle[0] == book[14]);
    CHECK(middle[1] == book[15]);

    std::vector<Position> bad{Position::initial()};
    CHECK_THROWS_AS(select_openings(bad, half, 1), std::invalid_argument);
}

TEST_CASE("paired games between identical engines mirror each other") {
    const auto book = pipeline::random_book(14, 5, 2);
    const EngineConfig a = engine("A", 2), b = engine("B", 2);
    for (const auto& opening : book) {
        const PairResult r = play_pair(opening, a, b);
        CHECK(r.game1.moves == r.game2.moves);
        CHECK(r.game1.differential == r.game2.differential);
        CHECK(static_cast<int>(r.a_game1) == -static_cast<int>(r.a_game2));
        CHECK(r.game1.first == "A");
        CHECK(r.game2.first == "B");
    }
    const Bitboard black = 0x000000FFFFFFFFFFULL;
    CHECK_THROWS_AS(play_game(Position::from_masks(black, ~black, Colour::Black), a, b), TerminalPosition);
}

TEST_CASE("tournament bookkeeping") {
    const auto openings = pipeline::random_book(14, 50, 3);
    const std::vector<EngineConfig> engines{engine("D1", 1), engine("D2", 2), engine("D1B", 1)};

    const auto one = run_tournament({openings.front()}, engines, {{"D1", "D2"}});
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].tally.total() == 2);

    const auto self = run_tournament({openings.begin(), openings.begin() + 10}, engines, {{"D1", "D1B"}});
    CHECK(format_percentage(self.rows[0].tally.wins, self.rows[0].tally.draws, self.rows[0].tally.losses) == "50.0%");

    const auto full = run_tournament(openings, engines, pipeline::round_robin(engines));
    REQUIRE(full.rows.size() == 3);
    std::size_t games = 0;
    for (const auto& row : full.rows) {
        CHECK(row.error.empty());
        games += row.tally.total();
        CHECK(row.tally.games.size() == row.tally.total());
        const double pct = winning_percentage(row.tally);
        CHECK(pct >= 0.0);
        CHECK(pct <= 1.0);
        // each engine played each opening once with each colour
        std::map<std::string, int> as_first;
        for (const auto& g : row.tally.games) as_first[g.opening.to_string() + g.first] += 1;
        for (const auto& opening : openings) {
            CHECK(as_first[opening.to_string() + row.engine_a] == 1);
            CHECK(as_first[opening.to_string() + row.engine_b] == 1);
        }
        // B's view is the mirror of A's
        const MatchTally b_view = row.tally.mirrored();
        CHECK(b_view.wins == row.tally.losses);
        CHECK(b_view.draws == row.tally.draws);
    }
    CHECK(games == 300);

    const std::string text = full.to_text();
    CHECK(text.find("Result (W-D-L)") != std::string::npos);
    CHECK(text.find("D1 - D2") != std::string::npos);
    const std::string csv = full.to_csv();
    CHECK(csv.rfind("pairing,wins,draws,losses,win_pct,p_value,significant\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const auto unknown = run_tournament({openings.front()}, engines, {{"D1", "nobody"}});
    CHECK_FALSE(unknown.rows[0].error.empty());
    CHECK_THROWS_AS(run_tournament(openings, {engines[0], engines[0]}, {{"D1", "D1"}}), std::invalid_argument);
}
