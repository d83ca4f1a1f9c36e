#pragma once

// File-level stages shared by the command-line tool, the python module and the
// acceptance run: generate -> label -> train -> eval / tournament.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfc/arena.hpp"
#include "sfc/corpus.hpp"
#include "sfc/estimators.hpp"

namespace sfc::pipeline {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Phase-table evaluator from a model directory, or the built-in heuristic.
EvalFn evaluator(const std::optional<std::filesystem::path>& models);

struct GenerateConfig {
    int opening_length = 4;
    SelfPlayOptions selfplay;
    std::optional<std::filesystem::path> models;
    /// Truncates the opening list; 0 keeps all.
    std::size_t max_games = 0;
};

std::vector<GameRecord> generate(const GenerateConfig& config);

struct LabelStats {
    std::size_t games = 0;
    std::size_t nodes = 0;
    std::size_t labeled = 0;
    std::size_t examples = 0;
};

std::vector<LabeledExample> label(const std::vector<GameRecord>& games, LabelStats* stats = nullptr);

struct TrainConfig {
    ModelKind kind = ModelKind::Logistic;
    int width = 4;
    int overlap = 2;
    double tol = 1e-8;
    int max_iter = 50;
};

struct BucketFit {
    int lo = 4;
    int hi = 64;
    std::size_t examples = 0;
    bool fitted = false;
    /// Fit failure reason and the bucket whose model was borrowed.
    std::string note;
};

struct TrainResult {
    std::vector<ModelParams> models;
    std::vector<BucketFit> fits;
};

/// Expands draws for `kind` and fits one model serving discs [lo, hi].
ModelParams fit_bucket(std::span<const LabeledExample> examples, const TrainConfig& config, int lo, int hi);

/// One model per phase bucket. A bucket whose fit fails reuses the model of
/// the nearest bucket that fitted (lower bucket on ties); throws the first
/// failure when no bucket fits.
TrainResult train(const std::vector<LabeledExample>& examples, const TrainConfig& config);

std::string model_filename(const ModelParams& model);
void write_models(const std::vector<ModelParams>& models, const std::filesystem::path& dir);

/// Distinct positions with `discs` discs reached by uniformly random play.
std::vector<Position> random_book(int discs, std::size_t count, std::uint64_t seed);

/// One position per line in Position::to_string() form; '#' comments allowed.
std::vector<Position> parse_positions(std::string_view text);
std::string serialize_positions(const std::vector<Position>& positions);

/// key = value lines: name, models (relative to the file), depth, wdl_empties,
/// node_budget. Without `models` the engine uses the built-in heuristic.
struct EngineSpec {
    std::string name;
    std::optional<std::filesystem::path> models;
    SearchLimits limits;
};

EngineSpec parse_engine_spec(std::string_view text, const std::filesystem::path& base_dir);
EngineSpec load_engine_spec(const std::filesystem::path& path);
EngineConfig make_engine(const EngineSpec& spec);

/// Every unordered pair of engines, in list order.
std::vector<std::pair<std::string, std::string>> round_robin(const std::vector<EngineConfig>& engines);

}  // namespace sfc::pipeline
