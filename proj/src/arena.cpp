#include "sfc/arena.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sfc/errors.hpp"

namespace sfc {

void MatchTally::add(Label result_for_a) {
    switch (result_for_a) {
        case Label::Win: ++wins; break;
        case Label::Draw: ++draws; break;
        case Label::Loss: ++losses; break;
    }
}

MatchTally MatchTally::mirrored() const {
    MatchTally m;
    m.wins = losses;
    m.draws = draws;
    m.losses = wins;
    m.games = games;
    return m;
}

std::vector<Position> select_openings(const std::vector<Position>& book, const EvalFn& eval, std::size_t count) {
    if (count == 0) return {};
    struct Candidate {
        double distance;
        std::size_t index;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < book.size(); ++i) {
        if (book[i].disc_count() != 14) {
            throw std::invalid_argument("book position " + std::to_string(i) + " has " +
                                        std::to_string(book[i].disc_count()) + " discs, expected 14");
        }
        if (book[i].is_terminal()) continue;
        const double v = eval(book[i]);
        if (v < 0.4 || v > 0.6) continue;
        candidates.push_back({std::abs(v - 0.5), i});
    }
    if (candidates.size() < count) {
        throw InsufficientBalancedOpenings("need " + std::to_string(count) + " openings evaluated in [0.4, 0.6], found " +
                                           std::to_string(candidates.size()));
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    candidates.resize(count);
    // keep the chosen openings in book order
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
    std::vector<Position> chosen;
    chosen.reserve(count);
    for (const auto& c : candidates) chosen.push_back(book[c.index]);
    return chosen;
}

GameLog play_game(const Position& opening, const EngineConfig& first, const EngineConfig& second) {
    if (opening.is_terminal()) throw TerminalPosition("opening is already terminal");
    GameLog log;
    log.opening = opening;
    log.first = first.name;
    log.second = second.name;
    const Colour first_colour = opening.to_move();
    Position pos = opening;
    while (!pos.is_terminal()) {
        if (pos.must_pass()) {
            pos = pos.play(Move::pass());
            continue;
        }
        const EngineConfig& engine = pos.to_move() == first_colour ? first : second;
        const SearchResult r = iterative_deepening(pos, engine.limits, engine.eval);
        pos = pos.apply(r.best_move);
        log.moves.push_back(r.best_move);
    }
    const int black_minus_white = popcount(pos.black()) - popcount(pos.white());
    log.differential = first_colour == Colour::Black ? black_minus_white : -black_minus_white;
    return log;
}

PairResult play_pair(const Position& opening, const EngineConfig& a, const EngineConfig& b) {
    PairResult r;
    r.game1 = play_game(opening, a, b);
    r.game2 = play_game(opening, b, a);
    r.a_game1 = Outcome::from_differential(r.game1.differential).label;
    r.a_game2 = negate(Outcome::from_differential(r.game2.differential).label);
    return r;
}

double winning_percentage(const MatchTally& t) {
    if (t.total() == 0) throw std::invalid_argument("winning percentage of an empty tally");
    return (static_cast<double>(t.wins) + 0.5 * static_cast<double>(t.draws)) / static_cast<double>(t.total());
}

std::string format_percentage(std::size_t wins, std::size_t draws, std::size_t losses) {
    const std::size_t games = wins + draws + losses;
    if (games == 0) return "-";
    // tenths of a percent = (2w + d) * 1000 / (2N), rounded half up in integers
    const std::size_t numerator = (2 * wins + draws) * 1000;
    const std::size_t denominator = 2 * games;
    const std::size_t tenths = (2 * numerator + denominator) / (2 * denominator);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

double sign_test_p_value(std::size_t wins, std::size_t losses) {
    const std::size_t m = wins + losses;
    if (m == 0) return 1.0;
    const std::size_t k = std::min(wins, losses);
    // P(X <= k) for X ~ Bin(m, 1/2), summed in log space
    const double log_half_m = static_cast<double>(m) * std::log(0.5);
    double tail = 0.0;
    for (std::size_t i = 0; i <= k; ++i) {
        const double log_choose = std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(i) + 1.0) -
                                  std::lgamma(static_cast<double>(m - i) + 1.0);
        tail += std::exp(log_choose + log_half_m);
    }
    return std::min(1.0, 2.0 * tail);
}

double score_test_p_value(std::size_t wins, std::size_t draws, std::size_t losses) {
    const std::size_t games = wins + draws + losses;
    if (games == 0) return 1.0;
    const double n = static_cast<double>(games);
    const double score = (static_cast<double>(wins) + 0.5 * static_cast<double>(draws)) / n;
    const double z = (score - 0.5) / (0.5 / std::sqrt(n));
    return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

Significance significance(const MatchTally& t, double level) {
    if (t.total() == 0) throw std::invalid_argument("significance of an empty tally");
    Significance s;
    s.sign_p = sign_test_p_value(t.wins, t.losses);
    s.score_p = score_test_p_value(t.wins, t.draws, t.losses);
    s.p_value = std::max(s.sign_p, s.score_p);
    s.significant = s.p_value < level;
    return s;
}

namespace {

std::string limits_label(const SearchLimits& a, const SearchLimits& b) {
    std::string out = "depth " + std::to_string(a.max_depth) + " - " + std::to_string(b.max_depth);
    if (a.node_budget || b.node_budget) {
        const auto budget = [](const SearchLimits& l) {
            return l.node_budget ? std::to_string(*l.node_budget) : std::string("inf");
        };
        out += ", nodes " + budget(a) + " - " + budget(b);
    }
    return out;
}

std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, p < 1e-4 ? "%.2e" : "%.4f", p);
    return buf;
}

}  // namespace

TournamentReport run_tournament(const std::vector<Position>& openings, const std::vector<EngineConfig>& engines,
                                const std::vector<std::pair<std::string, std::string>>& pairings, double level) {
    if (openings.empty()) throw std::invalid_argument("tournament needs at least one opening");
    if (engines.size() < 2) throw std::invalid_argument("tournament needs at least two engines");
    std::map<std::string, const EngineConfig*> by_name;
    for (const auto& e : engines) {
        if (!by_name.emplace(e.name, &e).second) throw std::invalid_argument("duplicate engine name '" + e.name + "'");
    }

    TournamentReport report;
    report.level = level;
    for (const auto& [name_a, name_b] : pairings) {
        TournamentRow row;
        row.engine_a = name_a;
        row.engine_b = name_b;
        const auto ia = by_name.find(name_a);
        const auto ib = by_name.find(name_b);
        if (ia == by_name.end() || ib == by_name.end()) {
            row.error = "unknown engine in pairing " + name_a + " - " + name_b;
            report.rows.push_back(std::move(row));
            continue;
        }
        const EngineConfig& a = *ia->second;
        const EngineConfig& b = *ib->second;
        row.limits = limits_label(a.limits, b.limits);
        try {
            for (const auto& opening : openings) {
                PairResult pair = play_pair(opening, a, b);
                row.tally.add(pair.a_game1);
                row.tally.add(pair.a_game2);
                row.tally.games.push_back(std::move(pair.game1));
                row.tally.games.push_back(std::move(pair.game2));
            }
            row.sig = significance(row.tally, level);
        } catch (const Error& e) {
            row.error = e.what();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string TournamentReport::to_text() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %-22s %-24s %-12s %-10s %s\n", "Pairing", "Search", "Result (W-D-L)",
                  "Win Pct", "p-value", "Significant");
    out << line;
    for (const auto& r : rows) {
        const std::string pairing = r.engine_a + " - " + r.engine_b;
        if (!r.error.empty()) {
            std::snprintf(line, sizeof line, "%-22s aborted: %s\n", pairing.c_str(), r.error.c_str());
            out << line;
            continue;
        }
        const std::string result =
            std::to_string(r.tally.wins) + " - " + std::to_string(r.tally.draws) + " - " + std::to_string(r.tally.losses);
        std::snprintf(line, sizeof line, "%-22s %-22s %-24s %-12s %-10s %s\n", pairing.c_str(), r.limits.c_str(),
                      result.c_str(), format_percentage(r.tally.wins, r.tally.draws, r.tally.losses).c_str(),
                      format_p(r.sig.p_value).c_str(), r.sig.significant ? "yes" : "no");
        out << line;
    }
    return out.str();
}

std::string TournamentReport::to_csv() const {
    std::ostringstream out;
    out << "pairing,wins,draws,losses,win_pct,p_value,significant\n";
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        std::string pct = format_percentage(r.tally.wins, r.tally.draws, r.tally.losses);
        pct.pop_back();  // drop '%'
        char p[32];
        std::snprintf(p, sizeof p, "%.6g", r.sig.p_value);
        out << r.engine_a << '-' << r.engine_b << ',' << r.tally.wins << ',' << r.tally.draws << ',' << r.tally.losses
            << ',' << pct << ',' << p << ',' << (r.sig.significant ? "true" : "false") << '\n';
    }
    return out.str();
}

}  // namespace sfc
