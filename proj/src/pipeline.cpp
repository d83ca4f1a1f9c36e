#include "sfc/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "sfc/errors.hpp"

namespace sfc::pipeline {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& key) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw FormatError("bad value '" + std::string(text) + "' for " + key);
    }
    return value;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

EvalFn evaluator(const std::optional<std::filesystem::path>& models) {
    if (!models) {
        auto model = std::make_shared<ModelParams>(heuristic_model());
        return [model](const Position& p) { return evaluate(*model, p); };
    }
    auto table = std::make_shared<PhaseTable>(PhaseTable::load(*models));
    if (table->empty()) throw IoError("no model files under " + models->string());
    return [table](const Position& p) { return table->evaluate(p); };
}

std::vector<GameRecord> generate(const GenerateConfig& config) {
    auto openings = enumerate_openings(config.opening_length);
    if (config.max_games != 0 && openings.size() > config.max_games) openings.resize(config.max_games);
    return selfplay_generate(evaluator(config.models), openings, config.selfplay);
}

std::vector<LabeledExample> label(const std::vector<GameRecord>& games, LabelStats* stats) {
    const GameGraph graph = propagate_labels(build_graph(games));
    auto examples = extract_examples(graph);
    if (stats) {
        stats->games = games.size();
        stats->nodes = graph.size();
        stats->labeled = static_cast<std::size_t>(std::count_if(
            graph.nodes().begin(), graph.nodes().end(), [](const GraphNode& n) { return n.label != NodeLabel::Unknown; }));
        stats->examples = examples.size();
    }
    return examples;
}

ModelParams fit_bucket(std::span<const LabeledExample> examples, const TrainConfig& config, int lo, int hi) {
    const auto expanded = expand_draws(std::vector<LabeledExample>(examples.begin(), examples.end()), config.kind);
    if (config.kind == ModelKind::Logistic) {
        return ModelParams::logistic(fit_logistic(expanded, config.tol, config.max_iter), lo, hi);
    }
    const bool pooled = config.kind == ModelKind::Fisher;
    return ModelParams::gaussian(config.kind, fit_gaussian(expanded, pooled), lo, hi);
}

TrainResult train(const std::vector<LabeledExample>& examples, const TrainConfig& config) {
    const PhaseBuckets buckets = bucket_by_phase(examples, config.width, config.overlap);
    const std::size_t count = buckets.buckets.size();
    std::vector<std::optional<ModelParams>> fitted(count);
    TrainResult result;
    result.fits.resize(count);
    std::optional<std::string> first_failure;
    for (std::size_t i = 0; i < count; ++i) {
        const PhaseBucket& b = buckets.buckets[i];
        BucketFit& fit = result.fits[i];
        fit.lo = b.lo;
        fit.hi = b.hi;
        fit.examples = b.examples.size();
        try {
            fitted[i] = fit_bucket(b.examples, config, b.lo, b.hi);
            fit.fitted = true;
        } catch (const Error& e) {
            fit.note = e.what();
            if (!first_failure) first_failure = "bucket " + std::to_string(b.lo) + "-" + std::to_string(b.hi) + ": " + e.what();
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (fitted[i]) {
            result.models.push_back(*fitted[i]);
            continue;
        }
        std::optional<std::size_t> donor;
        for (std::size_t d = 1; d < count && !donor; ++d) {
            if (i >= d && fitted[i - d]) donor = i - d;
            else if (i + d < count && fitted[i + d]) donor = i + d;
        }
        if (!donor) throw InsufficientData("no bucket could be fitted; " + *first_failure);
        ModelParams borrowed = *fitted[*donor];
        borrowed.bucket_lo = result.fits[i].lo;
        borrowed.bucket_hi = result.fits[i].hi;
        result.models.push_back(std::move(borrowed));
        result.fits[i].note += "; using bucket " + std::to_string(result.fits[*donor].lo) + "-" +
                               std::to_string(result.fits[*donor].hi);
    }
    return result;
}

std::string model_filename(const ModelParams& model) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%02d_%02d.model", kind_tag(model.kind), model.bucket_lo, model.bucket_hi);
    return buf;
}

void write_models(const std::vector<ModelParams>& models, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& m : models) save_model(m, dir / model_filename(m));
}

std::vector<Position> random_book(int discs, std::size_t count, std::uint64_t seed) {
    if (discs < 5 || discs > 64) throw std::invalid_argument("book disc count must be in [5, 64]");
    std::mt19937_64 rng(seed);
    std::vector<Position> book;
    std::unordered_set<Position, PositionHash> seen;
    const std::size_t max_attempts = 100 * count + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && book.size() < count; ++attempt) {
        Position pos = Position::initial();
        while (pos.disc_count() < discs && !pos.is_terminal()) {
            const auto moves = pos.legal_moves();
            std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
            pos = pos.play(moves[pick(rng)]);
        }
        if (pos.disc_count() != discs || pos.is_terminal()) continue;
        if (seen.insert(pos).second) book.push_back(pos);
    }
    if (book.size() < count) {
        throw InsufficientData("found only " + std::to_string(book.size()) + " distinct positions with " +
                               std::to_string(discs) + " discs");
    }
    return book;
}

std::vector<Position> parse_positions(std::string_view text) {
    std::vector<Position> positions;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            positions.push_back(Position::parse(line));
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return positions;
}

std::string serialize_positions(const std::vector<Position>& positions) {
    std::string out;
    for (const auto& p : positions) out += p.to_string() + "\n";
    return out;
}

EngineSpec parse_engine_spec(std::string_view text, const std::filesystem::path& base_dir) {
    EngineSpec spec;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw FormatError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "name") {
            spec.name = std::string(value);
        } else if (key == "models") {
            const std::filesystem::path p(value);
            spec.models = p.is_absolute() ? p : base_dir / p;
        } else if (key == "depth") {
            spec.limits.max_depth = parse_number<int>(value, key);
        } else if (key == "wdl_empties") {
            spec.limits.wdl_empties_threshold = parse_number<int>(value, key);
        } else if (key == "node_budget") {
            const auto budget = parse_number<std::uint64_t>(value, key);
            if (budget == 0) spec.limits.node_budget.reset();
            else spec.limits.node_budget = budget;
        } else {
            throw FormatError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (spec.name.empty()) throw FormatError("engine config has no name");
    if (spec.limits.max_depth < 1) throw FormatError("engine depth must be at least 1");
    return spec;
}

EngineSpec load_engine_spec(const std::filesystem::path& path) {
    try {
        return parse_engine_spec(read_file(path), path.parent_path());
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

EngineConfig make_engine(const EngineSpec& spec) { return EngineConfig{spec.name, evaluator(spec.models), spec.limits}; }

std::vector<std::pair<std::string, std::string>> round_robin(const std::vector<EngineConfig>& engines) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < engines.size(); ++i)
        for (std::size_t j = i + 1; j < engines.size(); ++j) pairs.emplace_back(engines[i].name, engines[j].name);
    return pairs;
}

}  // namespace sfc::pipeline
