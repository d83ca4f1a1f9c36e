#include "sfc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "sfc/errors.hpp"

namespace sfc {

using linalg::Matrix;
using linalg::Vector;

namespace {

constexpr double kMinProbability = std::numeric_limits<double>::min();
const double kMaxProbability = std::nextafter(1.0, 0.0);

// log(1 + exp(t)) without overflow
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

void check_feature_count(std::size_t expected, const FeatureVector& x) {
    if (x.size() != expected) {
        throw FeatureVersionMismatch("model expects " + std::to_string(expected) + " features, got " +
                                     std::to_string(x.size()));
    }
}

std::span<const double> non_intercept(const FeatureVector& x) { return std::span<const double>(x).subspan(1); }

// Inverse and log-determinant of the `active` principal submatrix, embedded
// back into full size with zeros elsewhere.
std::pair<Matrix, double> restricted_inverse(const Matrix& sigma, const std::vector<std::size_t>& active) {
    const std::size_t k = active.size();
    Matrix sub(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) sub(a, b) = sigma(active[a], active[b]);
    const auto factor = linalg::spd_factor_with_fallback(sub);
    const Matrix sub_inv = linalg::inverse(factor);
    Matrix inv(sigma.rows(), sigma.cols());
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) inv(active[a], active[b]) = sub_inv(a, b);
    return {std::move(inv), linalg::log_det(factor)};
}

}  // namespace

const char* kind_tag(ModelKind kind) {
    switch (kind) {
        case ModelKind::QDA: return "QDA";
        case ModelKind::Fisher: return "FISHER";
        case ModelKind::Logistic: return "LOGIT";
    }
    return "?";
}

ModelKind parse_kind(std::string_view text) {
    if (text == "QDA" || text == "qda") return ModelKind::QDA;
    if (text == "FISHER" || text == "fisher") return ModelKind::Fisher;
    if (text == "LOGIT" || text == "logit" || text == "LOG" || text == "log") return ModelKind::Logistic;
    throw FormatError("unknown model kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Gaussian discriminants

GaussianClassStats GaussianClassStats::from_moments(Vector mu_w, Vector mu_l, Matrix sigma_w, Matrix sigma_l,
                                                    std::size_t count_w, std::size_t count_l, bool pooled,
                                                    std::vector<std::size_t> active) {
    const std::size_t d = mu_w.size();
    if (mu_l.size() != d || sigma_w.rows() != d || sigma_w.cols() != d || sigma_l.rows() != d ||
        sigma_l.cols() != d) {
        throw DimensionMismatch("inconsistent Gaussian moment dimensions");
    }
    if (active.empty()) {
        active.resize(d);
        for (std::size_t i = 0; i < d; ++i) active[i] = i;
    }
    GaussianClassStats s;
    s.count_w = count_w;
    s.count_l = count_l;
    s.pooled = pooled;
    std::tie(s.inv_w, s.logdet_w) = restricted_inverse(sigma_w, active);
    if (pooled) {
        s.inv_l = s.inv_w;
        s.logdet_l = s.logdet_w;
    } else {
        std::tie(s.inv_l, s.logdet_l) = restricted_inverse(sigma_l, active);
    }
    s.mu_w = std::move(mu_w);
    s.mu_l = std::move(mu_l);
    s.sigma_w = std::move(sigma_w);
    s.sigma_l = std::move(sigma_l);
    return s;
}

GaussianClassStats fit_gaussian(std::span<const LabeledExample> examples, bool pooled) {
    if (examples.empty()) throw InsufficientData("no examples");
    const std::size_t d = examples.front().x.size() - 1;
    Vector sum_w(d, 0.0), sum_l(d, 0.0);
    std::size_t count_w = 0, count_l = 0;
    Vector lo(d, std::numeric_limits<double>::infinity());
    Vector hi(d, -std::numeric_limits<double>::infinity());
    for (const auto& e : examples) {
        if (e.x.size() != d + 1) throw DimensionMismatch("examples have differing feature counts");
        Vector* sum;
        if (e.is_win()) {
            sum = &sum_w;
            ++count_w;
        } else if (e.is_loss()) {
            sum = &sum_l;
            ++count_l;
        } else {
            throw DomainError("Gaussian fit needs won or lost examples; expand draws first");
        }
        for (std::size_t j = 0; j < d; ++j) {
            (*sum)[j] += e.x[j + 1];
            lo[j] = std::min(lo[j], e.x[j + 1]);
            hi[j] = std::max(hi[j], e.x[j + 1]);
        }
    }
    if (count_w < 2 || count_l < 2) {
        throw InsufficientData("need at least 2 won and 2 lost examples, have " + std::to_string(count_w) + " won, " +
                               std::to_string(count_l) + " lost");
    }
    Vector mu_w(d), mu_l(d);
    for (std::size_t j = 0; j < d; ++j) {
        mu_w[j] = sum_w[j] / static_cast<double>(count_w);
        mu_l[j] = sum_l[j] / static_cast<double>(count_l);
    }

    Matrix scatter_w(d, d), scatter_l(d, d);
    Vector centred(d);
    for (const auto& e : examples) {
        const bool win = e.is_win();
        const Vector& mu = win ? mu_w : mu_l;
        Matrix& scatter = win ? scatter_w : scatter_l;
        for (std::size_t j = 0; j < d; ++j) centred[j] = e.x[j + 1] - mu[j];
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b <= a; ++b) scatter(a, b) += centred[a] * centred[b];
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            scatter_w(b, a) = scatter_w(a, b);
            scatter_l(b, a) = scatter_l(a, b);
        }
    }

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < d; ++j)
        if (hi[j] > lo[j]) active.push_back(j);
    if (active.empty()) throw InsufficientData("every feature is constant over the sample");

    Matrix sigma_w, sigma_l;
    if (pooled) {
        Matrix total(d, d);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) total(a, b) = scatter_w(a, b) + scatter_l(a, b);
        sigma_w = total.scaled(1.0 / static_cast<double>(count_w + count_l));
        sigma_l = sigma_w;
    } else {
        sigma_w = scatter_w.scaled(1.0 / static_cast<double>(count_w));
        sigma_l = scatter_l.scaled(1.0 / static_cast<double>(count_l));
    }
    return GaussianClassStats::from_moments(std::move(mu_w), std::move(mu_l), std::move(sigma_w),
                                            std::move(sigma_l), count_w, count_l, pooled, std::move(active));
}

double qda_score(const GaussianClassStats& s, const FeatureVector& x) {
    check_feature_count(s.dim() + 1, x);
    const auto v = non_intercept(x);
    const std::size_t d = s.dim();

    // -{ 1/2 x (Sw^-1 - Sl^-1) x' + (mu_l Sl^-1 - mu_w Sw^-1) x'
    //    + 1/2 (mu_w Sw^-1 mu_w' - mu_l Sl^-1 mu_l' + log|Sw| - log|Sl|) }
    Matrix diff(d, d);
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) diff(a, b) = s.inv_w(a, b) - s.inv_l(a, b);
    const double quadratic = 0.5 * linalg::quadratic_form(v, diff, v);

    const Vector lw = s.inv_w.multiply(s.mu_w);  // symmetric, so mu_w Sw^-1 = (Sw^-1 mu_w')'
    const Vector ll = s.inv_l.multiply(s.mu_l);
    Vector linear_coef(d);
    for (std::size_t j = 0; j < d; ++j) linear_coef[j] = ll[j] - lw[j];
    const double linear = linalg::dot(linear_coef, v);

    const double constant =
        0.5 * (linalg::dot(s.mu_w, lw) - linalg::dot(s.mu_l, ll) + s.logdet_w - s.logdet_l);
    return -(quadratic + linear + constant);
}

double fisher_score(const GaussianClassStats& s, const FeatureVector& x) {
    if (!s.pooled) throw RequiresPooled("Fisher's discriminant needs pooled covariance");
    check_feature_count(s.dim() + 1, x);
    const auto v = non_intercept(x);
    const std::size_t d = s.dim();
    Vector mean_diff(d), centred(d);
    for (std::size_t j = 0; j < d; ++j) {
        mean_diff[j] = s.mu_w[j] - s.mu_l[j];
        centred[j] = v[j] - 0.5 * (s.mu_l[j] + s.mu_w[j]);
    }
    return linalg::quadratic_form(mean_diff, s.inv_w, centred);
}

// ---------------------------------------------------------------------------
// Logistic link

double win_probability(double score) {
    double p;
    if (score >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-score));
    } else {
        const double e = std::exp(score);
        p = e / (1.0 + e);
    }
    return std::clamp(p, kMinProbability, kMaxProbability);
}

double logit(double t) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("logit argument " + std::to_string(t) + " outside (0, 1)");
    return std::log(t / (1.0 - t));
}

std::vector<LabeledExample> clamp_boundary_labels(std::vector<LabeledExample> examples) {
    for (auto& e : examples) {
        if (e.is_loss()) {
            e.y = 1.0;
            e.n = 100;
        } else if (e.is_win()) {
            e.y = 99.0;
            e.n = 100;
        } else if (e.n == 1) {
            e.y *= 100.0;
            e.n = 100;
        }
    }
    return examples;
}

double log_likelihood(std::span<const LabeledExample> examples, std::span<const double> beta) {
    double total = 0.0;
    for (const auto& e : examples) {
        const double eta = linalg::dot(e.x, beta);
        // log pi = -softplus(-eta), log(1 - pi) = -softplus(eta)
        total -= e.y * softplus(-eta) + (e.n - e.y) * softplus(eta);
    }
    return total;
}

LogisticFit fit_logistic_traced(std::span<const LabeledExample> examples, const IrlsOptions& options) {
    if (examples.empty()) throw InsufficientData("no examples");
    const std::size_t n_features = examples.front().x.size();
    const std::size_t rows = examples.size();

    // Intercept plus every column that varies.
    std::vector<std::size_t> active{0};
    for (std::size_t j = 1; j < n_features; ++j) {
        const double first = examples.front().x[j];
        for (const auto& e : examples) {
            if (e.x.size() != n_features) throw DimensionMismatch("examples have differing feature counts");
            if (e.x[j] != first) {
                active.push_back(j);
                break;
            }
        }
    }
    const std::size_t k = active.size();
    Matrix design(rows, k);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& e = examples[i];
        if (!(e.n > 0) || e.y < 0.0 || e.y > e.n) throw DomainError("example needs 0 <= y <= n and n > 0");
        for (std::size_t c = 0; c < k; ++c) design(i, c) = e.x[active[c]];
    }
    const auto expand = [&](const Vector& reduced) {
        Vector full(n_features, 0.0);
        for (std::size_t c = 0; c < k; ++c) full[active[c]] = reduced[c];
        return full;
    };

    LogisticFit fit;
    IrlsWorkspace& ws = fit.workspace;
    ws.pi.resize(rows);
    ws.delta.resize(rows);
    ws.z.resize(rows);
    if (options.start_pi.empty()) {
        for (std::size_t i = 0; i < rows; ++i) ws.pi[i] = irls_start_probability(examples[i]);
    } else {
        if (options.start_pi.size() != rows) throw DimensionMismatch("start_pi length");
        ws.pi = options.start_pi;
    }

    const auto working_response = [&]() {
        for (std::size_t i = 0; i < rows; ++i) {
            const double pi = ws.pi[i];
            const double n = examples[i].n;
            ws.delta[i] = n * pi * (1.0 - pi);
            ws.z[i] = ws.delta[i] > 0.0 ? logit(pi) + (examples[i].y - n * pi) / ws.delta[i] : 0.0;
        }
    };
    const auto newton_step = [&]() {
        try {
            return linalg::weighted_normal_solve(design, ws.delta, ws.z);
        } catch (const NotPositiveDefinite& e) {
            throw RankDeficient(std::string("design matrix is rank deficient: ") + e.what());
        }
    };

    working_response();
    Vector beta = newton_step();
    double ll = log_likelihood(examples, expand(beta));
    ws.log_likelihood_trace.push_back(ll);
    int iterations = 1;

    while (iterations < options.max_iter) {
        for (std::size_t i = 0; i < rows; ++i) {
            ws.pi[i] = win_probability(linalg::dot(design.row(i), beta));
        }
        working_response();
        Vector candidate = newton_step();
        double candidate_ll = log_likelihood(examples, expand(candidate));
        int halvings = 0;
        const double slack = 1e-12 * std::max(1.0, std::abs(ll));
        while (!(candidate_ll >= ll - slack)) {
            if (halvings == 20) {
                throw Diverged("log-likelihood decreased after 20 step halvings at iteration " +
                               std::to_string(iterations + 1));
            }
            for (std::size_t c = 0; c < k; ++c) candidate[c] = 0.5 * (beta[c] + candidate[c]);
            candidate_ll = log_likelihood(examples, expand(candidate));
            ++halvings;
        }
        fit.step_halvings += halvings;
        double change = 0.0;
        for (std::size_t c = 0; c < k; ++c) change = std::max(change, std::abs(candidate[c] - beta[c]));
        beta = std::move(candidate);
        ll = candidate_ll;
        ws.log_likelihood_trace.push_back(ll);
        ++iterations;
        if (change < options.tol) {
            fit.converged = true;
            break;
        }
    }

    for (std::size_t i = 0; i < rows; ++i) ws.pi[i] = win_probability(linalg::dot(design.row(i), beta));
    for (const double b : beta)
        if (!std::isfinite(b)) throw Diverged("non-finite coefficient");

    fit.model.beta = expand(beta);
    fit.model.iterations = iterations;
    fit.model.final_log_likelihood = ll;
    return fit;
}

LogisticModel fit_logistic(std::span<const LabeledExample> examples, double tol, int max_iter) {
    IrlsOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    return fit_logistic_traced(examples, options).model;
}

double logistic_score(const LogisticModel& model, const FeatureVector& x) {
    check_feature_count(model.beta.size(), x);
    return linalg::dot(x, model.beta);
}

// ---------------------------------------------------------------------------
// Uniform model interface

std::size_t ModelParams::feature_count() const {
    if (const auto* lm = std::get_if<LogisticModel>(&payload)) return lm->beta.size();
    return std::get<GaussianClassStats>(payload).dim() + 1;
}

double ModelParams::score(const FeatureVector& x) const {
    switch (kind) {
        case ModelKind::Logistic: return logistic_score(std::get<LogisticModel>(payload), x);
        case ModelKind::QDA: return qda_score(std::get<GaussianClassStats>(payload), x);
        case ModelKind::Fisher: return fisher_score(std::get<GaussianClassStats>(payload), x);
    }
    return 0.0;
}

ModelParams ModelParams::logistic(LogisticModel m, int lo, int hi) {
    return ModelParams{ModelKind::Logistic, std::move(m), features::describe().version, lo, hi};
}

ModelParams ModelParams::gaussian(ModelKind kind, GaussianClassStats s, int lo, int hi) {
    if (kind == ModelKind::Logistic) throw std::invalid_argument("gaussian payload needs QDA or FISHER kind");
    if (kind == ModelKind::Fisher && !s.pooled) throw RequiresPooled("Fisher model needs pooled covariance");
    return ModelParams{kind, std::move(s), features::describe().version, lo, hi};
}

double evaluate(const ModelParams& model, const Position& p) {
    const auto& descriptor = features::describe();
    if (model.feature_version != descriptor.version) {
        throw FeatureVersionMismatch("model trained on '" + model.feature_version + "', extractor is '" +
                                     descriptor.version + "'");
    }
    return win_probability(model.score(features::extract(p)));
}

// ---------------------------------------------------------------------------
// Model files

namespace {

void put(std::ostringstream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
}

void put_matrix(std::ostringstream& out, const Matrix& m) {
    for (const double v : m.values()) put(out, v);
}

}  // namespace

std::string serialize_model(const ModelParams& model) {
    std::ostringstream out;
    out << "SFC1 " << kind_tag(model.kind) << ' ' << model.feature_version << ' ' << model.feature_count() << ' '
        << model.bucket_lo << ' ' << model.bucket_hi << '\n';
    if (const auto* lm = std::get_if<LogisticModel>(&model.payload)) {
        for (const double b : lm->beta) put(out, b);
    } else {
        const auto& s = std::get<GaussianClassStats>(model.payload);
        for (const double v : s.mu_w) put(out, v);
        for (const double v : s.mu_l) put(out, v);
        put_matrix(out, s.sigma_w);
        put_matrix(out, s.sigma_l);
        put_matrix(out, s.inv_w);
        put_matrix(out, s.inv_l);
        put(out, s.logdet_w);
        put(out, s.logdet_l);
        put(out, static_cast<double>(s.count_w));
        put(out, static_cast<double>(s.count_l));
        put(out, s.pooled ? 1.0 : 0.0);
    }
    return out.str();
}

ModelParams parse_model(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw FormatError("empty model file");
    std::istringstream hs(header);
    std::string magic, kind_text, version;
    long long n = 0;
    int lo = 0, hi = 0;
    if (!(hs >> magic >> kind_text >> version >> n >> lo >> hi) || magic != "SFC1") {
        throw FormatError("bad model header '" + header + "'");
    }
    ModelKind kind;
    try {
        kind = parse_kind(kind_text);
    } catch (const FormatError&) {
        throw FormatError("bad model kind in header '" + header + "'");
    }
    const auto& descriptor = features::describe();
    if (version != descriptor.version) {
        throw FormatError("model feature version '" + version + "' does not match extractor '" +
                          descriptor.version + "'");
    }
    if (n != static_cast<long long>(descriptor.size())) {
        throw FormatError("model has " + std::to_string(n) + " features, feature set has " +
                          std::to_string(descriptor.size()));
    }
    if (lo > hi) throw FormatError("bucket bounds reversed");

    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) throw FormatError("bad coefficient line '" + line + "'");
        values.push_back(v);
    }

    const auto un = static_cast<std::size_t>(n);
    if (kind == ModelKind::Logistic) {
        if (values.size() != un) {
            throw FormatError("logistic model needs " + std::to_string(un) + " coefficients, file has " +
                              std::to_string(values.size()));
        }
        LogisticModel lm;
        lm.beta = std::move(values);
        lm.final_log_likelihood = std::numeric_limits<double>::quiet_NaN();  // not persisted
        return ModelParams{kind, std::move(lm), version, lo, hi};
    }

    const std::size_t d = un - 1;
    const std::size_t expected = 2 * d + 4 * d * d + 5;
    if (values.size() != expected) {
        throw FormatError("Gaussian model needs " + std::to_string(expected) + " values, file has " +
                          std::to_string(values.size()));
    }
    std::size_t at = 0;
    const auto take_vector = [&](std::size_t len) {
        Vector v(values.begin() + static_cast<std::ptrdiff_t>(at), values.begin() + static_cast<std::ptrdiff_t>(at + len));
        at += len;
        return v;
    };
    GaussianClassStats s;
    s.mu_w = take_vector(d);
    s.mu_l = take_vector(d);
    s.sigma_w = Matrix(d, d, take_vector(d * d));
    s.sigma_l = Matrix(d, d, take_vector(d * d));
    s.inv_w = Matrix(d, d, take_vector(d * d));
    s.inv_l = Matrix(d, d, take_vector(d * d));
    s.logdet_w = values[at++];
    s.logdet_l = values[at++];
    s.count_w = static_cast<std::size_t>(values[at++]);
    s.count_l = static_cast<std::size_t>(values[at++]);
    s.pooled = values[at++] != 0.0;
    if (kind == ModelKind::Fisher && !s.pooled) throw FormatError("FISHER model stored without pooled flag");
    return ModelParams{kind, std::move(s), version, lo, hi};
}

void save_model(const ModelParams& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file " + path.string());
    out << serialize_model(model);
    if (!out) throw IoError("write failed for " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

// ---------------------------------------------------------------------------

PhaseTable::PhaseTable(std::vector<ModelParams> models) : models_(std::move(models)) {
    std::sort(models_.begin(), models_.end(),
              [](const ModelParams& a, const ModelParams& b) { return a.bucket_lo < b.bucket_lo; });
}

PhaseTable PhaseTable::load(const std::filesystem::path& dir) {
    std::vector<ModelParams> models;
    if (std::filesystem::is_regular_file(dir)) {
        models.push_back(load_model(dir));
    } else if (std::filesystem::is_directory(dir)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".model") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) models.push_back(load_model(f));
    } else {
        throw IoError("no model file or directory at " + dir.string());
    }
    if (models.empty()) throw IoError("no *.model files in " + dir.string());
    return PhaseTable(std::move(models));
}

const ModelParams& PhaseTable::for_discs(int discs) const {
    if (models_.empty()) throw std::logic_error("empty phase table");
    const ModelParams* best = &models_.front();
    int best_gap = std::numeric_limits<int>::max();
    for (const auto& m : models_) {
        if (discs >= m.bucket_lo && discs <= m.bucket_hi) return m;
        const int gap = discs < m.bucket_lo ? m.bucket_lo - discs : discs - m.bucket_hi;
        if (gap < best_gap) {
            best_gap = gap;
            best = &m;
        }
    }
    return *best;
}

double PhaseTable::evaluate(const Position& p) const { return sfc::evaluate(for_discs(p.disc_count()), p); }

}  // namespace sfc
