#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sfc/board.hpp"
#include "sfc/features.hpp"
#include "sfc/linalg.hpp"

namespace sfc {

/// One observation of the generalized binomial model: y successes out of n
/// trials at feature vector x. discs is the game-phase measure.
struct LabeledExample {
    FeatureVector x;
    double y = 0.0;
    int n = 1;
    int discs = 0;

    bool is_win() const { return y == static_cast<double>(n); }
    bool is_loss() const { return y == 0.0; }
    bool is_draw() const { return 2.0 * y == static_cast<double>(n); }

    friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

enum class ModelKind { QDA, Fisher, Logistic };

/// "QDA", "FISHER", "LOGIT" as written in model file headers.
const char* kind_tag(ModelKind kind);
/// Accepts the header tags and the CLI spellings qda / fisher / logit.
ModelKind parse_kind(std::string_view text);

/// Class-conditional Gaussian moments over the non-intercept features.
///
/// Features that are constant over the whole training sample carry no
/// information and would make the covariance singular; they keep their mean
/// but get zero rows and columns in the stored inverses, and the log-
/// determinants are taken over the remaining subspace.
struct GaussianClassStats {
    linalg::Vector mu_w, mu_l;
    linalg::Matrix sigma_w, sigma_l;
    linalg::Matrix inv_w, inv_l;
    double logdet_w = 0.0;
    double logdet_l = 0.0;
    std::size_t count_w = 0;
    std::size_t count_l = 0;
    bool pooled = false;

    std::size_t dim() const { return mu_w.size(); }

    /// Builds stats from given moments, computing inverses and log-determinants
    /// (ridge fallback on factorization failure). `active` lists the modeled
    /// coordinates; empty means all.
    static GaussianClassStats from_moments(linalg::Vector mu_w, linalg::Vector mu_l, linalg::Matrix sigma_w,
                                           linalg::Matrix sigma_l, std::size_t count_w, std::size_t count_l,
                                           bool pooled, std::vector<std::size_t> active = {});
};

/// ML estimates (divide by class count). Examples must be plain wins (y = n)
/// or losses (y = 0); run expand_draws first. The intercept x[0] is ignored.
/// Throws InsufficientData with fewer than two examples per class.
GaussianClassStats fit_gaussian(std::span<const LabeledExample> examples, bool pooled);

/// Quadratic discriminant with equal class priors.
double qda_score(const GaussianClassStats& stats, const FeatureVector& x);
/// Fisher's linear discriminant; throws RequiresPooled for unpooled stats.
double fisher_score(const GaussianClassStats& stats, const FeatureVector& x);

/// 1 / (1 + exp(-score)), evaluated without overflow and kept strictly
/// inside (0, 1).
double win_probability(double score);
/// log(t / (1 - t)); throws DomainError outside (0, 1).
double logit(double t);

/// y = 0 -> (1, 100), y = n -> (99, 100); interior labels with n = 1 (draws)
/// are rescaled to n = 100. Everything else is left alone.
std::vector<LabeledExample> clamp_boundary_labels(std::vector<LabeledExample> examples);

struct LogisticModel {
    linalg::Vector beta;
    int iterations = 0;
    double final_log_likelihood = 0.0;
};

/// Per-example state of the last accepted IRLS iteration.
struct IrlsWorkspace {
    linalg::Vector pi;
    linalg::Vector delta;
    linalg::Vector z;
    std::vector<double> log_likelihood_trace;
};

struct IrlsOptions {
    double tol = 1e-8;
    int max_iter = 50;
    /// Starting probabilities; empty selects (y + 1/2) / (n + 1).
    linalg::Vector start_pi;
};

struct LogisticFit {
    LogisticModel model;
    IrlsWorkspace workspace;
    bool converged = false;
    int step_halvings = 0;
};

/// Starting probability (y + 1/2) / (n + 1) of one example.
inline double irls_start_probability(const LabeledExample& e) { return (e.y + 0.5) / (e.n + 1.0); }

/// Log-likelihood sum(y log pi + (n - y) log(1 - pi)) with pi = sigmoid(x . beta).
double log_likelihood(std::span<const LabeledExample> examples, std::span<const double> beta);

/// Newton-Raphson / IRLS maximum likelihood fit with step halving.
/// Non-intercept columns that are constant over the sample get a zero
/// coefficient and are left out of the solve.
LogisticFit fit_logistic_traced(std::span<const LabeledExample> examples, const IrlsOptions& options = {});
LogisticModel fit_logistic(std::span<const LabeledExample> examples, double tol = 1e-8, int max_iter = 50);

double logistic_score(const LogisticModel& model, const FeatureVector& x);

/// A fitted model of any kind plus the feature set and disc-count bucket it was trained for.
struct ModelParams {
    ModelKind kind = ModelKind::Logistic;
    std::variant<GaussianClassStats, LogisticModel> payload;
    std::string feature_version;
    int bucket_lo = 4;
    int bucket_hi = 64;

    /// Length of the feature vectors this model accepts (intercept included).
    std::size_t feature_count() const;
    /// Discriminant or linear predictor on the logit scale.
    double score(const FeatureVector& x) const;

    static ModelParams logistic(LogisticModel m, int lo = 4, int hi = 64);
    static ModelParams gaussian(ModelKind kind, GaussianClassStats s, int lo = 4, int hi = 64);
};

/// P(W | x) for a position. Throws FeatureVersionMismatch or TerminalPosition.
double evaluate(const ModelParams& model, const Position& p);

std::string serialize_model(const ModelParams& model);
/// Throws FormatError on a bad header, wrong kind/version, or wrong value count.
ModelParams parse_model(const std::string& text);
void save_model(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_model(const std::filesystem::path& path);

/// Models indexed by disc-count bucket. Lookups outside all buckets use the
/// nearest bucket.
class PhaseTable {
public:
    PhaseTable() = default;
    explicit PhaseTable(std::vector<ModelParams> models);
    /// Loads every *.model file in `dir` (or the single file `dir`).
    static PhaseTable load(const std::filesystem::path& dir);

    const ModelParams& for_discs(int discs) const;
    double evaluate(const Position& p) const;
    const std::vector<ModelParams>& models() const { return models_; }
    bool empty() const { return models_.empty(); }

private:
    std::vector<ModelParams> models_;
};

}  // namespace sfc
