#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sfc/arena.hpp"
#include "sfc/corpus.hpp"
#include "sfc/errors.hpp"
#include "sfc/estimators.hpp"
#include "sfc/features.hpp"
#include "sfc/pipeline.hpp"
#include "sfc/search.hpp"

namespace py = pybind11;
using namespace sfc;

namespace {

Move parse_move(const std::string& text) {
    const auto m = Move::parse(text);
    if (!m) throw py::value_error("not a move: " + text);
    return *m;
}

std::vector<std::string> move_names(const std::vector<Move>& moves) {
    std::vector<std::string> out;
    for (const Move m : moves) out.push_back(m.to_string());
    return out;
}

LabeledExample make_example(FeatureVector x, double y, int n, int discs) { return LabeledExample{std::move(x), y, n, discs}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Othello evaluation-function training: board, models, search and match play";

    auto error = py::register_exception<Error>(m, "SfcError", PyExc_RuntimeError);
    py::register_exception<IllegalMove>(m, "IllegalMove", error.ptr());
    py::register_exception<TerminalPosition>(m, "TerminalPosition", error.ptr());
    py::register_exception<InsufficientData>(m, "InsufficientData", error.ptr());

    py::enum_<Label>(m, "Label").value("LOSS", Label::Loss).value("DRAW", Label::Draw).value("WIN", Label::Win);
    py::enum_<ModelKind>(m, "ModelKind")
        .value("QDA", ModelKind::QDA)
        .value("FISHER", ModelKind::Fisher)
        .value("LOGISTIC", ModelKind::Logistic);

    py::class_<Position>(m, "Position")
        .def(py::init<>())
        .def_static("initial", &Position::initial)
        .def_static("parse", [](const std::string& s) { return Position::parse(s); })
        .def("__str__", &Position::to_string)
        .def("__repr__", [](const Position& p) { return "Position('" + p.to_string() + "')"; })
        .def("__eq__", [](const Position& a, const Position& b) { return a == b; })
        .def("__hash__", [](const Position& p) { return PositionHash{}(p); })
        .def("diagram", &Position::diagram)
        .def("legal_moves", [](const Position& p) { return move_names(p.legal_moves()); })
        .def("apply", [](const Position& p, const std::string& move) { return p.apply(parse_move(move)); })
        .def("is_terminal", &Position::is_terminal)
        .def("disc_count", &Position::disc_count)
        .def("empties", &Position::empties)
        .def("toggled_mover", &Position::toggled_mover)
        .def("outcome", [](const Position& p) -> std::optional<std::pair<Label, int>> {
            const auto out = p.terminal_outcome();
            if (!out) return std::nullopt;
            return std::pair{out->label, out->disc_differential.value_or(0)};
        });

    m.def("feature_names", [] { return features::describe().names; });
    m.def("extract_features", &features::extract, py::arg("position"));

    py::class_<LabeledExample>(m, "LabeledExample")
        .def(py::init(&make_example), py::arg("x"), py::arg("y"), py::arg("n") = 1, py::arg("discs") = 0)
        .def_readwrite("x", &LabeledExample::x)
        .def_readwrite("y", &LabeledExample::y)
        .def_readwrite("n", &LabeledExample::n)
        .def_readwrite("discs", &LabeledExample::discs);

    py::class_<ModelParams>(m, "Model")
        .def_readonly("kind", &ModelParams::kind)
        .def_readonly("bucket_lo", &ModelParams::bucket_lo)
        .def_readonly("bucket_hi", &ModelParams::bucket_hi)
        .def("score", &ModelParams::score, py::arg("x"))
        .def("evaluate", [](const ModelParams& mp, const Position& p) { return evaluate(mp, p); })
        .def("coefficients", [](const ModelParams& mp) -> std::optional<std::vector<double>> {
            if (const auto* l = std::get_if<LogisticModel>(&mp.payload)) return l->beta;
            return std::nullopt;
        })
        .def("serialize", &serialize_model)
        .def_static("parse", &parse_model);

    m.def("win_probability", &win_probability, py::arg("score"));
    m.def("logit", &logit, py::arg("p"));
    m.def(
        "fit_logistic",
        [](const std::vector<LabeledExample>& data, double tol, int max_iter) {
            return ModelParams::logistic(fit_logistic(data, tol, max_iter));
        },
        py::arg("examples"), py::arg("tol") = 1e-8, py::arg("max_iter") = 50);
    m.def(
        "fit_gaussian",
        [](const std::vector<LabeledExample>& data, ModelKind kind) {
            if (kind == ModelKind::Logistic) throw py::value_error("use fit_logistic for logistic models");
            return ModelParams::gaussian(kind, fit_gaussian(data, kind == ModelKind::Fisher));
        },
        py::arg("examples"), py::arg("kind"));
    m.def("heuristic_model", &heuristic_model);

    py::class_<SearchResult>(m, "SearchResult")
        .def_property_readonly("best_move", [](const SearchResult& r) { return r.best_move.to_string(); })
        .def_readonly("score", &SearchResult::score)
        .def_readonly("depth_reached", &SearchResult::depth_reached)
        .def_readonly("nodes", &SearchResult::nodes)
        .def_readonly("exact", &SearchResult::exact)
        .def_readonly("wdl", &SearchResult::wdl);

    m.def(
        "search",
        [](const Position& p, int depth, int wdl_empties, std::optional<std::filesystem::path> models) {
            SearchLimits limits;
            limits.max_depth = depth;
            limits.wdl_empties_threshold = wdl_empties;
            const EvalFn eval = pipeline::evaluator(models);
            py::gil_scoped_release release;
            return iterative_deepening(p, limits, eval);
        },
        py::arg("position"), py::arg("depth") = 4, py::arg("wdl_empties") = 12, py::arg("models") = py::none());
    m.def("solve_wdl", [](const Position& p) { return solve_wdl(p); }, py::arg("position"));

    m.def(
        "generate",
        [](int opening_length, int depth, int wdl_empties, std::uint64_t seed) {
            pipeline::GenerateConfig config;
            config.opening_length = opening_length;
            config.selfplay.depth = depth;
            config.selfplay.wdl_empties_threshold = wdl_empties;
            config.selfplay.seed = seed;
            return serialize_games(pipeline::generate(config));
        },
        py::arg("opening_length") = 4, py::arg("depth") = 4, py::arg("wdl_empties") = 12, py::arg("seed") = 0,
        "Self-play games in the text game format");
    m.def(
        "label", [](const std::string& games) { return pipeline::label(parse_games(games)); }, py::arg("games"),
        "Labeled examples from games in the text game format");
    m.def(
        "train",
        [](const std::vector<LabeledExample>& examples, ModelKind kind, int width, int overlap) {
            pipeline::TrainConfig config;
            config.kind = kind;
            config.width = width;
            config.overlap = overlap;
            return pipeline::train(examples, config).models;
        },
        py::arg("examples"), py::arg("kind"), py::arg("width") = 4, py::arg("overlap") = 2);
    m.def("write_models", &pipeline::write_models, py::arg("models"), py::arg("directory"));

    m.def("format_percentage", &format_percentage, py::arg("wins"), py::arg("draws"), py::arg("losses"));
    m.def(
        "significance",
        [](std::size_t w, std::size_t d, std::size_t l, double level) {
            MatchTally t;
            t.wins = w;
            t.draws = d;
            t.losses = l;
            const Significance s = significance(t, level);
            return py::dict(py::arg("p_value") = s.p_value, py::arg("significant") = s.significant,
                            py::arg("sign_p") = s.sign_p, py::arg("score_p") = s.score_p);
        },
        py::arg("wins"), py::arg("draws"), py::arg("losses"), py::arg("level") = 0.05);
}
