#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sfc/board.hpp"
#include "sfc/estimators.hpp"
#include "sfc/search.hpp"

namespace sfc {

/// A finished game: non-pass moves from the standard start and the final
/// disc differential, Black minus White.
struct GameRecord {
    std::vector<Move> moves;
    int final_differential = 0;

    friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

/// One game per line: "f5d6c3... +16". The differential is optional and is
/// recomputed by replay; a given value must agree. Errors name the 1-based
/// line and, for bad coordinates, the character offset.
std::vector<GameRecord> parse_games(std::string_view text);
GameRecord parse_game_line(std::string_view line);
std::string serialize_games(const std::vector<GameRecord>& records);
std::string serialize_game(const GameRecord& record);

/// Replays a move list from the start; throws IllegalGame or IncompleteGame.
Position replay_game(const std::vector<Move>& moves);

/// All positions reachable by `length` non-pass moves from the start, one move
/// sequence per distinct position (first in ascending move order wins).
std::vector<std::vector<Move>> enumerate_openings(int length);

struct SelfPlayOptions {
    int depth = 4;
    int wdl_empties_threshold = 12;
    std::uint64_t seed = 0;
};

/// Plays one game per opening with both sides searching to a fixed depth; ties
/// among equally valued moves are broken by a generator seeded from
/// (seed, opening index).
std::vector<GameRecord> selfplay_generate(const EvalFn& eval, const std::vector<std::vector<Move>>& openings,
                                          const SelfPlayOptions& options);

/// Hand-weighted logistic evaluator used to bootstrap self-play before any model exists.
ModelParams heuristic_model();

enum class NodeLabel : std::int8_t { Loss = -1, Draw = 0, Win = 1, Unknown = 2 };

const char* to_string(NodeLabel l);

struct GraphNode {
    Position position;
    NodeLabel label = NodeLabel::Unknown;
    /// Indices into GameGraph::nodes(); deduplicated, in first-seen order.
    std::vector<std::size_t> successors;
    std::size_t predecessors = 0;
    /// Mover-perspective differential for terminal nodes.
    std::optional<int> terminal_differential;
};

/// Positions of all games merged by (occupancy, mover); edges are observed moves.
class GameGraph {
public:
    /// Adds a node if new; returns its index.
    std::size_t add_node(const Position& p);
    void add_edge(std::size_t from, std::size_t to);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    std::vector<GraphNode>& nodes() { return nodes_; }
    std::optional<std::size_t> find(const Position& p) const;
    std::size_t size() const { return nodes_.size(); }

private:
    std::vector<GraphNode> nodes_;
    std::unordered_map<Position, std::size_t, PositionHash> index_;
};

/// Every position of every game becomes a node (pass states included);
/// terminal nodes are labeled from their final disc differential.
GameGraph build_graph(const std::vector<GameRecord>& records);

/// NegaMax over observed edges, leaves to root: a node takes the best negated
/// label among its labeled successors.
GameGraph propagate_labels(GameGraph graph);

/// True when every labeled non-terminal node equals the NegaMax of its labeled successors.
bool labels_consistent(const GameGraph& graph);

/// One example per labeled non-terminal node: Win (1, 1), Loss (0, 1),
/// Draw (0.5, 1). Sorted by disc count then position for determinism.
std::vector<LabeledExample> extract_examples(const GameGraph& graph);

/// Logistic: draws become y = n/2, then boundary clamping. Gaussian kinds:
/// wins and losses doubled, each draw emitted once as a win and once as a loss.
std::vector<LabeledExample> expand_draws(std::vector<LabeledExample> examples, ModelKind kind);

struct PhaseBucket {
    /// Inclusive disc-count range this bucket's model serves.
    int lo = 4;
    int hi = 7;
    /// Examples with discs in [lo - overlap, hi + overlap].
    std::vector<LabeledExample> examples;
    std::size_t wins = 0;
    std::size_t draws = 0;
    std::size_t losses = 0;
};

struct PhaseBuckets {
    int width = 4;
    int overlap = 2;
    std::vector<PhaseBucket> buckets;
};

/// Buckets [4, 4 + width - 1], [4 + width, ...] up to 64 (the last bucket
/// absorbs the remainder). Each training set is widened by `overlap` discs.
PhaseBuckets bucket_by_phase(const std::vector<LabeledExample>& examples, int width, int overlap);

/// "bucket_lo,bucket_hi,examples,wins,draws,losses" with a header line.
std::string bucket_report_csv(const PhaseBuckets& buckets);

/// Labeled-example interchange: header "discs,y,n,f0,...,f{n-1}".
std::string examples_to_csv(const std::vector<LabeledExample>& examples);
std::vector<LabeledExample> examples_from_csv(std::string_view text);

}  // namespace sfc
