// sfc: self-play corpus generation, labeling, model fitting and matches.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfc/arena.hpp"
#include "sfc/corpus.hpp"
#include "sfc/errors.hpp"
#include "sfc/estimators.hpp"
#include "sfc/features.hpp"
#include "sfc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sfc;

namespace {

struct GenerateArgs {
    int opening_length = 4;
    int depth = 4;
    int wdl_empties = 12;
    std::uint64_t seed = 0;
    std::string models;
    std::size_t max_games = 0;
    std::string out;
};

struct LabelArgs {
    std::string in;
    std::string out;
};

struct TrainArgs {
    std::string kind = "logit";
    std::string in;
    std::string out;
    int width = 4;
    int overlap = 2;
    double tol = 1e-8;
    int max_iter = 50;
    std::string report;
};

struct EvalArgs {
    std::string models;
    std::string in;
    std::string out;
};

struct CurveArgs {
    std::string models;
    std::string feature;
    double lo = -8.0;
    double hi = 8.0;
    double step = 0.25;
    std::string out;
};

struct TournamentArgs {
    std::vector<std::string> engines;
    std::string openings;
    std::size_t pairs = 50;
    bool no_select = false;
    std::string select_with;
    double level = 0.05;
    std::string csv;
    std::string games;
};

struct BookArgs {
    int discs = 14;
    std::size_t count = 500;
    std::uint64_t seed = 0;
    std::string out;
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        pipeline::write_file(path, text);
    }
}

std::optional<fs::path> optional_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

int run_generate(const GenerateArgs& a) {
    pipeline::GenerateConfig config;
    config.opening_length = a.opening_length;
    config.selfplay.depth = a.depth;
    config.selfplay.wdl_empties_threshold = a.wdl_empties;
    config.selfplay.seed = a.seed;
    config.models = optional_path(a.models);
    config.max_games = a.max_games;
    const auto games = pipeline::generate(config);
    pipeline::write_file(a.out, serialize_games(games));
    std::cerr << "wrote " << games.size() << " games to " << a.out << "\n";
    return 0;
}

int run_label(const LabelArgs& a) {
    const auto games = parse_games(pipeline::read_file(a.in));
    pipeline::LabelStats stats;
    const auto examples = pipeline::label(games, &stats);
    pipeline::write_file(a.out, examples_to_csv(examples));
    std::cerr << stats.games << " games, " << stats.nodes << " positions, " << stats.labeled << " labeled, "
              << stats.examples << " examples written to " << a.out << "\n";
    return 0;
}

int run_train(const TrainArgs& a) {
    pipeline::TrainConfig config;
    config.kind = parse_kind(a.kind);
    config.width = a.width;
    config.overlap = a.overlap;
    config.tol = a.tol;
    config.max_iter = a.max_iter;
    const auto examples = examples_from_csv(pipeline::read_file(a.in));
    const auto result = pipeline::train(examples, config);
    pipeline::write_models(result.models, a.out);
    for (const auto& f : result.fits) {
        std::cerr << "bucket " << f.lo << "-" << f.hi << ": " << f.examples << " examples, "
                  << (f.fitted ? "fitted" : "not fitted (" + f.note + ")") << "\n";
    }
    if (!a.report.empty()) {
        pipeline::write_file(a.report, bucket_report_csv(bucket_by_phase(examples, a.width, a.overlap)));
    }
    std::cerr << "wrote " << result.models.size() << " models to " << a.out << "\n";
    return 0;
}

int run_eval(const EvalArgs& a) {
    const PhaseTable table = PhaseTable::load(a.models);
    if (table.empty()) throw IoError("no model files under " + a.models);
    const auto positions = pipeline::parse_positions(pipeline::read_file(a.in));
    std::string out = "position,discs,probability\n";
    char buf[64];
    for (const auto& p : positions) {
        std::snprintf(buf, sizeof buf, ",%d,%.10f\n", p.disc_count(), table.evaluate(p));
        out += p.to_string() + buf;
    }
    emit(a.out, out);
    return 0;
}

int run_curve(const CurveArgs& a) {
    if (!(a.step > 0) || a.hi < a.lo) throw std::invalid_argument("curve needs step > 0 and min <= max");
    const auto steps = static_cast<long>((a.hi - a.lo) / a.step + 1e-9);
    std::string out;
    char buf[128];
    if (a.models.empty()) {
        out = "score,probability\n";
        for (long i = 0; i <= steps; ++i) {
            const double s = a.lo + static_cast<double>(i) * a.step;
            std::snprintf(buf, sizeof buf, "%.6g,%.10f\n", s, win_probability(s));
            out += buf;
        }
        emit(a.out, out);
        return 0;
    }
    const PhaseTable table = PhaseTable::load(a.models);
    const auto& names = features::describe().names;
    std::size_t index = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == a.feature) index = i;
    if (index == names.size() || index == features::kConst) {
        throw std::invalid_argument("--feature must name a non-constant feature");
    }
    // other features held at zero, intercept at one
    out = "bucket_lo,bucket_hi,feature_value,score,probability\n";
    for (const auto& m : table.models()) {
        for (long i = 0; i <= steps; ++i) {
            FeatureVector x(names.size(), 0.0);
            x[features::kConst] = 1.0;
            x[index] = a.lo + static_cast<double>(i) * a.step;
            const double s = m.score(x);
            std::snprintf(buf, sizeof buf, "%d,%d,%.6g,%.10g,%.10f\n", m.bucket_lo, m.bucket_hi, x[index], s,
                          win_probability(s));
            out += buf;
        }
    }
    emit(a.out, out);
    return 0;
}

int run_tournament(const TournamentArgs& a) {
    std::vector<EngineConfig> engines;
    for (const auto& path : a.engines) engines.push_back(pipeline::make_engine(pipeline::load_engine_spec(path)));
    auto book = pipeline::parse_positions(pipeline::read_file(a.openings));
    std::vector<Position> openings;
    if (a.no_select) {
        if (book.size() < a.pairs) throw InsufficientData("book has fewer than --pairs positions");
        openings.assign(book.begin(), book.begin() + static_cast<std::ptrdiff_t>(a.pairs));
    } else {
        const EngineConfig* selector = &engines.front();
        for (const auto& e : engines)
            if (e.name == a.select_with) selector = &e;
        if (!a.select_with.empty() && selector->name != a.select_with) {
            throw std::invalid_argument("--select-with names no engine: " + a.select_with);
        }
        openings = select_openings(book, selector->eval, a.pairs);
    }
    const auto report = run_tournament(openings, engines, pipeline::round_robin(engines), a.level);
    std::cout << report.to_text();
    if (!a.csv.empty()) pipeline::write_file(a.csv, report.to_csv());
    if (!a.games.empty()) {
        std::string text;
        for (const auto& row : report.rows) {
            for (const auto& g : row.tally.games) {
                text += g.opening.to_string() + " " + g.first + " " + g.second + " ";
                for (const auto& m : g.moves) text += m.to_string();
                text += " " + std::to_string(g.differential) + "\n";
            }
        }
        pipeline::write_file(a.games, text);
    }
    for (const auto& row : report.rows) {
        if (!row.error.empty()) {
            std::cerr << "pairing " << row.engine_a << " - " << row.engine_b << " aborted: " << row.error << "\n";
            return 1;
        }
    }
    return 0;
}

int run_book(const BookArgs& a) {
    const auto book = pipeline::random_book(a.discs, a.count, a.seed);
    emit(a.out, pipeline::serialize_positions(book));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-play training and evaluation of Othello evaluation functions"};
    app.require_subcommand(1);
    app.set_config();

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Play self-play games from all openings of a given length");
    generate->add_option("--opening-length", gen.opening_length, "Moves in each enumerated opening")
        ->check(CLI::Range(0, 20))
        ->capture_default_str();
    generate->add_option("--depth", gen.depth, "Search depth for both sides")->check(CLI::Range(1, 20))->capture_default_str();
    generate->add_option("--wdl-empties", gen.wdl_empties, "Exact solve at or below this many empties")
        ->check(CLI::Range(0, 20))
        ->capture_default_str();
    generate->add_option("--seed", gen.seed, "Tie-break seed")->capture_default_str();
    generate->add_option("--models", gen.models, "Model directory (built-in heuristic if omitted)");
    generate->add_option("--max-games", gen.max_games, "Keep only the first N openings (0 = all)")->capture_default_str();
    generate->add_option("--out", gen.out, "Game file to write")->required();

    LabelArgs lab;
    auto* label = app.add_subcommand("label", "Label positions by propagating results through the game graph");
    label->add_option("--in", lab.in, "Game file")->required()->check(CLI::ExistingFile);
    label->add_option("--out", lab.out, "Labeled-example CSV to write")->required();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Fit one model per disc-count bucket");
    train->add_option("--kind", tr.kind, "Model kind")
        ->check(CLI::IsMember({"logit", "fisher", "qda"}))
        ->capture_default_str();
    train->add_option("--in", tr.in, "Labeled-example CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--out", tr.out, "Output model directory")->required();
    train->add_option("--width", tr.width, "Bucket width in discs")->check(CLI::Range(1, 61))->capture_default_str();
    train->add_option("--overlap", tr.overlap, "Extra discs on each side of a bucket's training range")
        ->check(CLI::Range(0, 60))
        ->capture_default_str();
    train->add_option("--tol", tr.tol, "Logistic convergence tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    train->add_option("--max-iter", tr.max_iter, "Logistic iteration cap")->check(CLI::Range(1, 10000))->capture_default_str();
    train->add_option("--report", tr.report, "Write per-bucket counts CSV");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Winning probability of each position in a file");
    eval->add_option("--models", ev.models, "Model directory or file")->required()->check(CLI::ExistingPath);
    eval->add_option("--in", ev.in, "Position file")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", ev.out, "CSV output (stdout if omitted)");

    CurveArgs cv;
    auto* curve = app.add_subcommand("curve", "Score-to-probability CSV, or probability along one feature per bucket");
    curve->add_option("--models", cv.models, "Model directory; omit for the bare logistic link")->check(CLI::ExistingPath);
    curve->add_option("--feature", cv.feature, "Feature to vary (with --models)");
    curve->add_option("--min", cv.lo, "First value")->capture_default_str();
    curve->add_option("--max", cv.hi, "Last value")->capture_default_str();
    curve->add_option("--step", cv.step, "Increment")->capture_default_str();
    curve->add_option("--out", cv.out, "CSV output (stdout if omitted)");

    TournamentArgs tn;
    auto* tournament = app.add_subcommand("tournament", "Paired-game round robin between engines");
    tournament->add_option("--engines", tn.engines, "Engine config files")
        ->required()
        ->delimiter(',')
        ->expected(2, 64)
        ->check(CLI::ExistingFile);
    tournament->add_option("--openings", tn.openings, "Position file with 14-disc openings")
        ->required()
        ->check(CLI::ExistingFile);
    tournament->add_option("--pairs", tn.pairs, "Openings to play, each twice with colours reversed")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
    tournament->add_flag("--no-select", tn.no_select, "Use the first --pairs openings as given");
    tournament->add_option("--select-with", tn.select_with, "Engine whose evaluation picks balanced openings (default first)");
    tournament->add_option("--level", tn.level, "Significance level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    tournament->add_option("--csv", tn.csv, "Also write the report as CSV");
    tournament->add_option("--games", tn.games, "Write every game played");

    BookArgs bk;
    auto* book = app.add_subcommand("book", "Random distinct positions with a given disc count");
    book->add_option("--discs", bk.discs, "Disc count")->check(CLI::Range(5, 64))->capture_default_str();
    book->add_option("--count", bk.count, "Positions to produce")->check(CLI::Range(1, 1000000))->capture_default_str();
    book->add_option("--seed", bk.seed, "Random seed")->capture_default_str();
    book->add_option("--out", bk.out, "Position file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    std::cerr << "# " << chosen->get_name() << "\n" << chosen->config_to_str(true, false);
    // stages without randomness run with seed 0
    const std::uint64_t seed = *generate ? gen.seed : (*book ? bk.seed : 0);
    std::cerr << "# seed = " << seed << "\n";

    try {
        if (*generate) return run_generate(gen);
        if (*label) return run_label(lab);
        if (*train) return run_train(tr);
        if (*eval) return run_eval(ev);
        if (*curve) return run_curve(cv);
        if (*tournament) return run_tournament(tn);
        if (*book) return run_book(bk);
    } catch (const sfc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
