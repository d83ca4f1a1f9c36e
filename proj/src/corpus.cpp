#include "sfc/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "sfc/errors.hpp"
#include "sfc/features.hpp"

namespace sfc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Rethrows `e` as the same error type with a line prefix.
template <typename Fn>
auto with_line(std::size_t line_no, Fn&& fn) {
    const std::string prefix = "line " + std::to_string(line_no) + ": ";
    try {
        return fn();
    } catch (const ParseError& e) {
        throw ParseError(prefix + e.what());
    } catch (const IllegalGame& e) {
        throw IllegalGame(prefix + e.what());
    } catch (const IncompleteGame& e) {
        throw IncompleteGame(prefix + e.what());
    } catch (const DifferentialMismatch& e) {
        throw DifferentialMismatch(prefix + e.what());
    } catch (const FormatError& e) {
        throw FormatError(prefix + e.what());
    }
}

int black_minus_white(const Position& p) { return popcount(p.black()) - popcount(p.white()); }

}  // namespace

// ---------------------------------------------------------------------------
// Game records

Position replay_game(const std::vector<Move>& moves) {
    Position pos = Position::initial();
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (pos.must_pass()) pos = pos.play(Move::pass());
        if (moves[i].is_pass() || !pos.is_legal(moves[i])) {
            throw IllegalGame("move " + std::to_string(i + 1) + " (" + moves[i].to_string() + ") is illegal");
        }
        pos = pos.play(moves[i]);
    }
    if (!pos.is_terminal()) {
        throw IncompleteGame("game ends after " + std::to_string(moves.size()) + " moves in a non-terminal position");
    }
    return pos;
}

GameRecord parse_game_line(std::string_view line) {
    line = trim(line);
    const std::size_t space = line.find_first_of(" \t");
    const std::string_view transcript = line.substr(0, space);
    std::optional<int> given;
    if (space != std::string_view::npos) {
        std::string_view rest = trim(line.substr(space));
        if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
        if (ec != std::errc() || ptr != rest.data() + rest.size()) {
            throw ParseError("bad final differential '" + std::string(trim(line.substr(space))) + "'");
        }
        given = value;
    }

    GameRecord record;
    for (std::size_t offset = 0; offset < transcript.size(); offset += 2) {
        const auto move = offset + 1 < transcript.size() ? Move::parse(transcript.substr(offset, 2)) : std::nullopt;
        if (!move || move->is_pass()) {
            throw ParseError("bad coordinate at offset " + std::to_string(offset));
        }
        record.moves.push_back(*move);
    }
    const Position end = replay_game(record.moves);
    record.final_differential = black_minus_white(end);
    if (given && *given != record.final_differential) {
        throw DifferentialMismatch("stated differential " + std::to_string(*given) + ", replay gives " +
                                   std::to_string(record.final_differential));
    }
    return record;
}

std::vector<GameRecord> parse_games(std::string_view text) {
    std::vector<GameRecord> records;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        records.push_back(with_line(line_no, [&] { return parse_game_line(body); }));
    }
    return records;
}

std::string serialize_game(const GameRecord& record) {
    std::string out;
    out.reserve(record.moves.size() * 2 + 5);
    for (const Move m : record.moves) out += m.to_string();
    char buf[16];
    std::snprintf(buf, sizeof buf, " %+d", record.final_differential);
    out += buf;
    return out;
}

std::string serialize_games(const std::vector<GameRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += serialize_game(r);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Self-play

std::vector<std::vector<Move>> enumerate_openings(int length) {
    if (length < 0) throw std::invalid_argument("opening length must be non-negative");
    std::vector<std::pair<Position, std::vector<Move>>> level{{Position::initial(), {}}};
    for (int ply = 0; ply < length; ++ply) {
        std::vector<std::pair<Position, std::vector<Move>>> next;
        std::unordered_map<Position, bool, PositionHash> seen;
        for (const auto& [pos, line] : level) {
            Position base = pos;
            if (base.must_pass()) base = base.play(Move::pass());
            for (const Move m : base.legal_moves()) {
                if (m.is_pass()) continue;
                const Position child = base.play(m);
                if (seen.emplace(child, true).second) {
                    auto extended = line;
                    extended.push_back(m);
                    next.emplace_back(child, std::move(extended));
                }
            }
        }
        level = std::move(next);
    }
    std::vector<std::vector<Move>> openings;
    openings.reserve(level.size());
    for (auto& entry : level) openings.push_back(std::move(entry.second));
    return openings;
}

ModelParams heuristic_model() {
    LogisticModel m;
    // const, disc, mobility, potential mobility, corner, x-square, c-square, frontier, stable edge, parity
    m.beta = {0.0, 0.02, 0.12, 0.04, 0.9, -0.45, -0.12, -0.05, 0.25, 0.1};
    m.iterations = 1;
    return ModelParams::logistic(std::move(m));
}

std::vector<GameRecord> selfplay_generate(const EvalFn& eval, const std::vector<std::vector<Move>>& openings,
                                          const SelfPlayOptions& options) {
    SearchLimits limits;
    limits.max_depth = options.depth;
    limits.wdl_empties_threshold = options.wdl_empties_threshold;

    std::vector<GameRecord> games;
    games.reserve(openings.size());
    for (std::size_t index = 0; index < openings.size(); ++index) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(index)};
        std::mt19937_64 rng(seq);

        GameRecord record;
        Position pos = Position::initial();
        for (const Move m : openings[index]) {
            if (pos.must_pass()) pos = pos.play(Move::pass());
            pos = pos.apply(m);
            record.moves.push_back(m);
        }
        while (!pos.is_terminal()) {
            if (pos.must_pass()) {
                pos = pos.play(Move::pass());
                continue;
            }
            const auto values = root_move_values(pos, limits, eval);
            double best = values.front().value;
            for (const auto& v : values) best = std::max(best, v.value);
            std::vector<Move> tied;
            for (const auto& v : values)
                if (v.value == best) tied.push_back(v.move);
            std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
            const Move chosen = tied[pick(rng)];
            pos = pos.play(chosen);
            record.moves.push_back(chosen);
        }
        record.final_differential = black_minus_white(pos);
        games.push_back(std::move(record));
    }
    return games;
}

// ---------------------------------------------------------------------------
// Game graph and NegaMax labeling

const char* to_string(NodeLabel l) {
    switch (l) {
        case NodeLabel::Win: return "Win";
        case NodeLabel::Draw: return "Draw";
        case NodeLabel::Loss: return "Loss";
        case NodeLabel::Unknown: return "Unknown";
    }
    return "?";
}

std::size_t GameGraph::add_node(const Position& p) {
    const auto [it, inserted] = index_.emplace(p, nodes_.size());
    if (inserted) {
        GraphNode node;
        node.position = p;
        if (const auto outcome = p.terminal_outcome()) {
            node.terminal_differential = outcome->disc_differential;
            node.label = static_cast<NodeLabel>(outcome->label);
        }
        nodes_.push_back(std::move(node));
    }
    return it->second;
}

void GameGraph::add_edge(std::size_t from, std::size_t to) {
    auto& succ = nodes_[from].successors;
    if (std::find(succ.begin(), succ.end(), to) != succ.end()) return;
    succ.push_back(to);
    ++nodes_[to].predecessors;
}

std::optional<std::size_t> GameGraph::find(const Position& p) const {
    const auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

GameGraph build_graph(const std::vector<GameRecord>& records) {
    GameGraph graph;
    for (const auto& record : records) {
        Position pos = Position::initial();
        std::size_t node = graph.add_node(pos);
        const auto step = [&](Move m) {
            pos = pos.apply(m);
            const std::size_t next = graph.add_node(pos);
            graph.add_edge(node, next);
            node = next;
        };
        for (const Move m : record.moves) {
            if (pos.must_pass()) step(Move::pass());
            step(m);
        }
        if (pos.must_pass()) step(Move::pass());
    }
    return graph;
}

namespace {

NodeLabel negamax_of_successors(const GameGraph& graph, const GraphNode& node) {
    NodeLabel best = NodeLabel::Unknown;
    for (const std::size_t s : node.successors) {
        const NodeLabel child = graph.nodes()[s].label;
        if (child == NodeLabel::Unknown) continue;
        const auto value = static_cast<NodeLabel>(-static_cast<int>(child));
        if (best == NodeLabel::Unknown || static_cast<int>(value) > static_cast<int>(best)) best = value;
    }
    return best;
}

}  // namespace

GameGraph propagate_labels(GameGraph graph) {
    auto& nodes = graph.nodes();
    // Disc count never decreases along an edge and only pass edges keep it, so
    // visiting in decreasing (discs, must-pass-last) order sees successors first.
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto rank = [&](std::size_t i) {
        const Position& p = nodes[i].position;
        return std::pair{p.disc_count(), p.must_pass() ? 0 : 1};
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rank(a) > rank(b); });
    for (const std::size_t i : order) {
        if (nodes[i].terminal_differential) continue;
        nodes[i].label = negamax_of_successors(graph, nodes[i]);
    }
    return graph;
}

bool labels_consistent(const GameGraph& graph) {
    for (const auto& node : graph.nodes()) {
        if (node.terminal_differential) {
            if (node.label != static_cast<NodeLabel>(Outcome::from_differential(*node.terminal_differential).label))
                return false;
            continue;
        }
        if (node.label != negamax_of_successors(graph, node)) return false;
    }
    return true;
}

std::vector<LabeledExample> extract_examples(const GameGraph& graph) {
    std::vector<const GraphNode*> labeled;
    for (const auto& node : graph.nodes()) {
        if (node.terminal_differential || node.label == NodeLabel::Unknown) continue;
        labeled.push_back(&node);
    }
    std::sort(labeled.begin(), labeled.end(), [](const GraphNode* a, const GraphNode* b) {
        const Position& p = a->position;
        const Position& q = b->position;
        return std::tuple{p.disc_count(), p.black(), p.white(), p.to_move()} <
               std::tuple{q.disc_count(), q.black(), q.white(), q.to_move()};
    });
    std::vector<LabeledExample> examples;
    examples.reserve(labeled.size());
    for (const GraphNode* node : labeled) {
        LabeledExample e;
        e.x = features::extract(node->position);
        e.n = 1;
        e.y = node->label == NodeLabel::Win ? 1.0 : (node->label == NodeLabel::Loss ? 0.0 : 0.5);
        e.discs = node->position.disc_count();
        examples.push_back(std::move(e));
    }
    return examples;
}

std::vector<LabeledExample> expand_draws(std::vector<LabeledExample> examples, ModelKind kind) {
    if (kind == ModelKind::Logistic) {
        for (auto& e : examples)
            if (e.is_draw()) e.y = 0.5 * e.n;
        return clamp_boundary_labels(std::move(examples));
    }
    std::vector<LabeledExample> out;
    out.reserve(examples.size() * 2);
    for (auto& e : examples) {
        if (e.is_win() || e.is_loss()) {
            out.push_back(e);
            out.push_back(std::move(e));
        } else {
            LabeledExample won = e;
            won.y = won.n;
            LabeledExample lost = std::move(e);
            lost.y = 0.0;
            out.push_back(std::move(won));
            out.push_back(std::move(lost));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Phase buckets

PhaseBuckets bucket_by_phase(const std::vector<LabeledExample>& examples, int width, int overlap) {
    if (width < 1) throw std::invalid_argument("bucket width must be at least 1");
    if (overlap < 0) throw std::invalid_argument("bucket overlap must be non-negative");
    PhaseBuckets result;
    result.width = width;
    result.overlap = overlap;
    for (int lo = 4; lo <= 64; lo += width) {
        PhaseBucket bucket;
        bucket.lo = lo;
        bucket.hi = lo + width - 1;
        const bool last = bucket.hi >= 63;
        if (last) bucket.hi = 64;
        for (const auto& e : examples) {
            if (e.discs < bucket.lo - overlap || e.discs > bucket.hi + overlap) continue;
            bucket.examples.push_back(e);
            if (e.is_draw()) ++bucket.draws;
            else if (e.is_win()) ++bucket.wins;
            else if (e.is_loss()) ++bucket.losses;
        }
        result.buckets.push_back(std::move(bucket));
        if (last) break;
    }
    return result;
}

std::string bucket_report_csv(const PhaseBuckets& buckets) {
    std::ostringstream out;
    out << "bucket_lo,bucket_hi,examples,wins,draws,losses\n";
    for (const auto& b : buckets.buckets) {
        out << b.lo << ',' << b.hi << ',' << b.examples.size() << ',' << b.wins << ',' << b.draws << ',' << b.losses
            << '\n';
    }
    return out.str();
}

std::string examples_to_csv(const std::vector<LabeledExample>& examples) {
    const std::size_t n = examples.empty() ? features::describe().size() : examples.front().x.size();
    std::string out = "discs,y,n";
    for (std::size_t j = 0; j < n; ++j) out += ",f" + std::to_string(j);
    out += '\n';
    for (const auto& e : examples) {
        if (e.x.size() != n) throw DimensionMismatch("examples have differing feature counts");
        out += std::to_string(e.discs);
        out += ',';
        out += format_double(e.y);
        out += ',';
        out += std::to_string(e.n);
        for (const double v : e.x) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<LabeledExample> examples_from_csv(std::string_view text) {
    std::vector<LabeledExample> examples;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    const auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return cells;
    };
    const auto number = [&](std::string_view cell) {
        double v = 0.0;
        const std::string s(cell);
        char* end = nullptr;
        v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) {
            throw FormatError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
        }
        return v;
    };
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (columns == 0) {
            if (cells.size() < 4 || cells[0] != "discs" || cells[1] != "y" || cells[2] != "n") {
                throw FormatError("line 1: expected header 'discs,y,n,f0,...'");
            }
            for (std::size_t j = 3; j < cells.size(); ++j) {
                if (cells[j] != "f" + std::to_string(j - 3)) throw FormatError("bad feature column name");
            }
            columns = cells.size();
            continue;
        }
        if (cells.size() != columns) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                              " columns, found " + std::to_string(cells.size()));
        }
        LabeledExample e;
        e.discs = static_cast<int>(number(cells[0]));
        e.y = number(cells[1]);
        e.n = static_cast<int>(number(cells[2]));
        if (e.n < 1 || e.y < 0.0 || e.y > e.n) {
            throw FormatError("line " + std::to_string(line_no) + ": need 0 <= y <= n, n >= 1");
        }
        e.x.reserve(columns - 3);
        for (std::size_t j = 3; j < columns; ++j) e.x.push_back(number(cells[j]));
        examples.push_back(std::move(e));
    }
    if (columns == 0) throw FormatError("missing CSV header");
    return examples;
}

}  // namespace sfc
