#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sfc/corpus.hpp"
#include "sfc/errors.hpp"

using namespace sfc;

namespace {

std::vector<Move> moves_of(std::string_view transcript) {
    std::vector<Move> out;
    for (std::size_t i = 0; i + 1 < transcript.size(); i += 2) out.push_back(*Move::parse(transcript.substr(i, 2)));
    return out;
}

// Random complete game from `start`, returned as the non-pass moves.
std::vector<Move> random_game(std::mt19937_64& rng, Position start = Position::initial()) {
    std::vector<Move> moves;
    Position p = start;
    while (!p.is_terminal()) {
        const Move m = testutil::random_move(rng, p);
        if (!m.is_pass()) moves.push_back(m);
        p = p.apply(m);
    }
    return moves;
}

void check_against_oracle(const GameGraph& labeled) {
    for (std::size_t i = 0; i < labeled.size(); ++i) REQUIRE(labeled.nodes()[i].label == oracle::graph_label(labeled, i));
}

std::map<std::string, NodeLabel> labels_by_position(const GameGraph& g) {
    std::map<std::string, NodeLabel> out;
    for (const auto& n : g.nodes()) out[n.position.to_string()] = n.label;
    return out;
}

}  // namespace

TEST_CASE("game record parsing") {
    CHECK_THROWS_AS(parse_game_line("f5d6"), IncompleteGame);
    try {
        parse_game_line("z9f5");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("offset 0") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_game_line("a1"), IllegalGame);

    std::mt19937_64 rng(1);
    const auto moves = random_game(rng);
    const Position end = replay_game(moves);
    const int diff = popcount(end.black()) - popcount(end.white());
    std::string line;
    for (const Move m : moves) line += m.to_string();
    const GameRecord r = parse_game_line(line + (diff >= 0 ? " +" : " ") + std::to_string(diff));
    CHECK(r.final_differential == diff);
    CHECK(r.moves == moves);
    CHECK_THROWS_AS(parse_game_line(line + " " + std::to_string(diff + 2)), DifferentialMismatch);
    CHECK(parse_game_line(line).final_differential == diff);

    try {
        parse_games("# header\n" + line + "\nf5d6\n");
        FAIL("expected IncompleteGame");
    } catch (const IncompleteGame& e) {
        CHECK(std::string(e.what()).rfind("line 3", 0) == 0);
    }
}

TEST_CASE("a known 60-move game") {
    // a full random line with no passes, checked against the replay
    std::mt19937_64 rng(3);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const auto moves = random_game(rng);
        if (moves.size() != 60) continue;
        const GameRecord r = parse_game_line(serialize_game(GameRecord{moves, popcount(replay_game(moves).black()) -
                                                                                  popcount(replay_game(moves).white())}));
        CHECK(r.moves.size() == 60);
        break;
    }
}

TEST_CASE("serialize and parse round-trip") {
    std::mt19937_64 rng(2);
    std::vector<GameRecord> records;
    for (int i = 0; i < 50; ++i) {
        const auto moves = random_game(rng);
        const Position end = replay_game(moves);
        records.push_back({moves, popcount(end.black()) - popcount(end.white())});
    }
    CHECK(parse_games(serialize_games(records)) == records);
}

TEST_CASE("opening enumeration") {
    CHECK(enumerate_openings(0).size() == 1);
    CHECK(enumerate_openings(1).size() == 4);
    // the four first moves are symmetric, so depth 2 has 12 distinct positions
    CHECK(enumerate_openings(2).size() == 12);
}

TEST_CASE("self-play is deterministic for a seed") {
    const ModelParams model = heuristic_model();
    const EvalFn eval = [&](const Position& p) { return evaluate(model, p); };
    const auto openings = enumerate_openings(1);
    SelfPlayOptions options;
    options.depth = 2;
    options.wdl_empties_threshold = 8;
    options.seed = 42;
    const auto a = selfplay_generate(eval, openings, options);
    const auto b = selfplay_generate(eval, openings, options);
    CHECK(a.size() == 4);
    CHECK(serialize_games(a) == serialize_games(b));
    for (const auto& g : a) CHECK(replay_game(g.moves).is_terminal());
    CHECK(selfplay_generate(eval, enumerate_openings(0), options).size() == 1);
}

TEST_CASE("graph of a single game is a chain") {
    std::mt19937_64 rng(4);
    const auto moves = random_game(rng);
    const Position end = replay_game(moves);
    const GameRecord r{moves, popcount(end.black()) - popcount(end.white())};
    int passes = 0;
    Position p = Position::initial();
    for (const Move m : moves) {
        if (p.must_pass()) {
            p = p.play(Move::pass());
            ++passes;
        }
        p = p.play(m);
    }
    const GameGraph g = build_graph({r});
    CHECK(g.size() == moves.size() + 1 + passes);
    for (const auto& n : g.nodes()) CHECK(n.successors.size() <= 1);

    const GameGraph labeled = propagate_labels(g);
    // walking down the chain, labels alternate unless a pass repeats the mover
    for (const auto& n : labeled.nodes()) {
        REQUIRE(n.label != NodeLabel::Unknown);
        if (!n.successors.empty()) {
            CHECK(static_cast<int>(n.label) == -static_cast<int>(labeled.nodes()[n.successors[0]].label));
        }
    }
}

TEST_CASE("shared prefixes and transpositions are merged") {
    std::mt19937_64 rng(5);
    // two games sharing the first 10 moves
    const auto base = random_game(rng);
    std::vector<Move> prefix(base.begin(), base.begin() + 10);
    const Position mid = replay(Position::initial(), prefix);
    auto tail = random_game(rng, mid);
    std::vector<Move> other = prefix;
    other.insert(other.end(), tail.begin(), tail.end());
    const GameGraph one = build_graph({{base, 0}});
    const GameGraph both = build_graph({{base, 0}, {other, 0}});
    // the 11 positions of the prefix (start included) appear once
    std::size_t shared = 0;
    const GameGraph second = build_graph({{other, 0}});
    for (const auto& n : second.nodes())
        if (one.find(n.position)) ++shared;
    CHECK(shared >= 11);
    CHECK(both.size() == one.size() + second.size() - shared);

    // f5 d6 c3 d3 and c4 ... search all 4-move lines for two that meet
    std::map<std::string, std::vector<Move>> seen;
    std::optional<std::pair<std::vector<Move>, std::vector<Move>>> pair;
    std::function<void(const Position&, std::vector<Move>&)> walk = [&](const Position& p, std::vector<Move>& line) {
        if (pair) return;
        if (line.size() == 4) {
            const auto [it, inserted] = seen.emplace(p.to_string(), line);
            // the lines must still differ one move earlier
            const auto before = [](const std::vector<Move>& l) {
                return replay(Position::initial(), std::vector<Move>(l.begin(), l.end() - 1));
            };
            if (!inserted && !(before(it->second) == before(line))) pair = {it->second, line};
            return;
        }
        for (const Move m : p.legal_moves()) {
            line.push_back(m);
            walk(p.apply(m), line);
            line.pop_back();
        }
    };
    std::vector<Move> line;
    walk(Position::initial(), line);
    REQUIRE(pair.has_value());
    CHECK(pair->first != pair->second);
    const GameGraph t = build_graph({{pair->first, 0}, {pair->second, 0}});
    const auto meet = t.find(replay(Position::initial(), pair->first));
    REQUIRE(meet.has_value());
    CHECK(t.nodes()[*meet].predecessors == 2);
    std::size_t distinct_before = 0;
    for (std::size_t k = 1; k < 4; ++k) {
        const std::vector<Move> a(pair->first.begin(), pair->first.begin() + k);
        const std::vector<Move> b(pair->second.begin(), pair->second.begin() + k);
        distinct_before += replay(Position::initial(), a) == replay(Position::initial(), b) ? 1 : 2;
    }
    CHECK(t.size() == 1 + distinct_before + 1);
}

TEST_CASE("NegaMax rule on a node") {
    std::mt19937_64 rng(6);
    // a root with two observed continuations played out to the end; look for
    // one whose children end up with opposite labels
    for (int attempt = 0; attempt < 5000; ++attempt) {
        const Position p = testutil::random_with_empties(rng, 6, 10);
        const auto moves = p.legal_moves();
        if (moves.size() < 2) continue;
        GameGraph g;
        const std::size_t root = g.add_node(p);
        std::vector<std::size_t> children;
        for (std::size_t k = 0; k < 2; ++k) {
            Position pos = p.apply(moves[k]);
            std::size_t node = g.add_node(pos);
            g.add_edge(root, node);
            children.push_back(node);
            while (!pos.is_terminal()) {
                pos = pos.apply(testutil::random_move(rng, pos));
                const std::size_t next = g.add_node(pos);
                g.add_edge(node, next);
                node = next;
            }
        }
        const GameGraph labeled = propagate_labels(g);
        const NodeLabel a = labeled.nodes()[children[0]].label, b = labeled.nodes()[children[1]].label;
        if (a == b) continue;
        const int expected = std::max(-static_cast<int>(a), -static_cast<int>(b));
        CHECK(static_cast<int>(labeled.nodes()[root].label) == expected);
        CHECK(labeled.nodes()[root].label == oracle::graph_label(labeled, root));
        return;
    }
    FAIL("no suitable position found");
}

TEST_CASE("three overlapping endgame lines match brute-force minimax") {
    std::mt19937_64 rng(7);
    const Position start = testutil::random_with_empties(rng, 8, 8);
    GameGraph g;
    testutil::add_line(g, start, {0, 0, 1});
    testutil::add_line(g, start, {0, 1, 0, 1});
    testutil::add_line(g, start, {1, 0, 0, 2});
    CHECK(g.size() >= 18);
    CHECK(g.size() <= 30);
    const GameGraph labeled = propagate_labels(g);
    check_against_oracle(labeled);
    CHECK(labels_consistent(labeled));
    CHECK(labels_by_position(propagate_labels(labeled)) == labels_by_position(labeled));
}

TEST_CASE("propagation over self-play style games") {
    std::mt19937_64 rng(8);
    std::vector<GameRecord> games;
    const auto base = random_game(rng);
    for (int i = 0; i < 12; ++i) {
        // branch off a shared game at varying depths
        const std::size_t cut = 5 + static_cast<std::size_t>(i) * 4;
        std::vector<Move> prefix(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(std::min(cut, base.size())));
        const Position mid = replay(Position::initial(), prefix);
        if (mid.is_terminal()) continue;
        auto tail = random_game(rng, mid.must_pass() ? mid.play(Move::pass()) : mid);
        prefix.insert(prefix.end(), tail.begin(), tail.end());
        games.push_back({prefix, 0});
    }
    games.push_back({base, 0});
    const GameGraph labeled = propagate_labels(build_graph(games));
    check_against_oracle(labeled);
    CHECK(labels_consistent(labeled));

    // input order does not matter
    auto shuffled = games;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(labels_by_position(propagate_labels(build_graph(shuffled))) == labels_by_position(labeled));

    // repeating an existing line leaves every label where the oracle puts it
    auto enlarged = games;
    enlarged.push_back(games.front());
    const GameGraph relabeled = propagate_labels(build_graph(enlarged));
    check_against_oracle(relabeled);
    CHECK(labels_by_position(relabeled) == labels_by_position(labeled));

    // a new game extends the graph; labels still equal the oracle on the larger graph
    enlarged.push_back({random_game(rng), 0});
    check_against_oracle(propagate_labels(build_graph(enlarged)));
}

TEST_CASE("examples from a labeled graph") {
    std::mt19937_64 rng(9);
    const auto moves = random_game(rng);
    const GameGraph labeled = propagate_labels(build_graph({{moves, 0}}));
    std::size_t non_terminal = 0;
    for (const auto& n : labeled.nodes()) non_terminal += n.terminal_differential ? 0 : 1;
    const auto examples = extract_examples(labeled);
    CHECK(examples.size() == non_terminal);
    for (const auto& e : examples) {
        CHECK(e.n == 1);
        CHECK((e.y == 0.0 || e.y == 0.5 || e.y == 1.0));
        CHECK(e.x.size() == 10);
    }
    CHECK(std::is_sorted(examples.begin(), examples.end(),
                         [](const LabeledExample& a, const LabeledExample& b) { return a.discs < b.discs; }));
}

TEST_CASE("draw expansion") {
    const FeatureVector x(10, 0.0);
    const LabeledExample win{x, 1.0, 1, 10}, loss{x, 0.0, 1, 10}, draw{x, 0.5, 1, 10};

    const auto logit = expand_draws({draw, win, loss}, ModelKind::Logistic);
    REQUIRE(logit.size() == 3);
    CHECK(logit[0].y == 50.0);
    CHECK(logit[0].n == 100);
    CHECK(logit[1].y == 99.0);
    CHECK(logit[2].y == 1.0);

    const auto qda = expand_draws({win, win, win, draw}, ModelKind::QDA);
    CHECK(qda.size() == 8);
    CHECK(std::count_if(qda.begin(), qda.end(), [](const auto& e) { return e.is_win(); }) == 7);
    CHECK(std::count_if(qda.begin(), qda.end(), [](const auto& e) { return e.is_loss(); }) == 1);
}

TEST_CASE("phase buckets") {
    std::vector<LabeledExample> examples;
    for (int discs = 4; discs <= 63; ++discs) examples.push_back({FeatureVector(10, 0.0), discs % 2 ? 1.0 : 0.0, 1, discs});

    const auto plain = bucket_by_phase(examples, 4, 0);
    CHECK(plain.buckets.size() == 15);
    CHECK(plain.buckets.front().lo == 4);
    CHECK(plain.buckets.back().hi == 64);
    std::size_t total = 0;
    for (const auto& b : plain.buckets) total += b.examples.size();
    CHECK(total == examples.size());

    const auto wide = bucket_by_phase(examples, 4, 2);
    int containing = 0;
    for (const auto& b : wide.buckets) {
        const bool has = std::any_of(b.examples.begin(), b.examples.end(), [](const auto& e) { return e.discs == 20; });
        CHECK(has == (b.lo - 2 <= 20 && 20 <= b.hi + 2));
        containing += has;
    }
    CHECK(containing == 2);  // 16..19 widened to 14..21, and 20..23

    const std::string csv = bucket_report_csv(plain);
    CHECK(csv.rfind("bucket_lo,bucket_hi,examples,wins,draws,losses\n", 0) == 0);
}

TEST_CASE("labeled examples CSV round-trip") {
    std::mt19937_64 rng(10);
    const auto moves = random_game(rng);
    const auto examples = extract_examples(propagate_labels(build_graph({{moves, 0}})));
    const std::string csv = examples_to_csv(examples);
    CHECK(csv.rfind("discs,y,n,f0,", 0) == 0);
    CHECK(examples_from_csv(csv) == examples);
    CHECK_THROWS_AS(examples_from_csv("discs,y,n\n1,2\n"), FormatError);
}
