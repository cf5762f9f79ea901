#include "ds/harness.hpp"

#include "ds/calibration.hpp"
#include "ds/dantzig.hpp"
#include "ds/kernels.hpp"
#include "ds/lasso.hpp"
#include "ds/oracles.hpp"
#include "ds/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace ds {

namespace {

constexpr std::uint64_t kCalibStream = 0x9D2C5680CA1B7C3DULL;
constexpr std::uint64_t kTruthStream = 0x5851F42D4C957F2DULL;
constexpr std::uint64_t kNoiseStream = 0x14057B7EF767814FULL;
constexpr std::uint64_t kDesignStream = 0x6C8E9CF570932BD5ULL;

constexpr const char* kCsvHeader =
    "replicate,method,n,p,S,sigma,lambda,rel_l2_error,support_precision,"
    "support_recall,pred_error,runtime_ms,status";

const nlohmann::json& need(const nlohmann::json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError((path.empty() ? std::string() : path + ".") + key + " is missing");
    return *it;
}

template <typename T>
T as(const nlohmann::json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path + " has the wrong type");
    }
}

template <typename T>
T opt(const nlohmann::json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.is_object()) throw ConfigError(path + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return as<T>(*it, path.empty() ? std::string(key) : path + "." + key);
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::ds: return "ds";
        case Method::gds: return "gds";
        case Method::lasso: return "lasso";
        case Method::lasso_constrained: return "lasso_constrained";
        case Method::gauss_lasso: return "gauss_lasso";
        case Method::canonical: return "canonical";
    }
    return "?";
}

Method method_from_string(const std::string& s) {
    if (s == "ds") return Method::ds;
    if (s == "gds" || s == "gauss_dantzig" || s == "gauss-dantzig") return Method::gds;
    if (s == "lasso") return Method::lasso;
    if (s == "lasso_constrained" || s == "lasso-constrained") return Method::lasso_constrained;
    if (s == "gauss_lasso" || s == "gauss-lasso") return Method::gauss_lasso;
    if (s == "canonical") return Method::canonical;
    throw ConfigError("unknown method '" + s + "'");
}

std::string to_string(LambdaMode m) {
    switch (m) {
        case LambdaMode::fixed: return "fixed";
        case LambdaMode::mc_quantile: return "mc_quantile";
        case LambdaMode::t_from_truth: return "t_from_truth";
    }
    return "?";
}

LambdaMode lambda_mode_from_string(const std::string& s) {
    if (s == "fixed") return LambdaMode::fixed;
    if (s == "mc_quantile" || s == "mc-quantile" || s == "mc") return LambdaMode::mc_quantile;
    if (s == "t_from_truth" || s == "t-from-truth") return LambdaMode::t_from_truth;
    throw ConfigError("unknown lambda_mode '" + s + "'");
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t r) {
    return splitmix64(base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(r) + 1));
}

Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("top level must be an object");
    Scenario s;
    s.name = opt<std::string>(j, "name", "", "scenario");
    s.replicates = opt<std::size_t>(j, "replicates", "", std::size_t{1});
    s.seed_base = opt<std::uint64_t>(j, "seed_base", "", std::uint64_t{0});
    s.resample_design = opt<bool>(j, "resample_design", "", false);
    s.output_path = opt<std::string>(j, "output_path", "", "");

    const auto& d = need(j, "design", "");
    try {
        s.design.kind =
            design_kind_from_string(as<std::string>(need(d, "kind", "design"), "design.kind"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("design.kind: ") + e.what());
    }
    if (s.design.kind == DesignKind::file) {
        s.design.path = as<std::string>(need(d, "path", "design"), "design.path");
    } else if (s.design.kind == DesignKind::identity_fourier) {
        s.design.n = as<std::size_t>(need(d, "n", "design"), "design.n");
        s.design.p = 2 * s.design.n;
    } else {
        s.design.n = as<std::size_t>(need(d, "n", "design"), "design.n");
        s.design.p = as<std::size_t>(need(d, "p", "design"), "design.p");
    }
    s.design.seed = opt<std::uint64_t>(d, "seed", "design", std::uint64_t{0});
    s.design.normalize = opt<bool>(d, "normalize", "design", true);

    if (j.contains("signal")) {
        const auto& g = j.at("signal");
        s.signal.sparsity = as<std::size_t>(need(g, "sparsity", "signal"), "signal.sparsity");
        try {
            s.signal.rule = amplitude_rule_from_string(
                opt<std::string>(g, "amplitude_rule", "signal", std::string("gaussian_unit")));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("signal.amplitude_rule: ") + e.what());
        }
        s.signal.amplitude = opt<double>(g, "amplitude", "signal", 1.0);
    }
    if (j.contains("noise")) s.noise.sigma = opt<double>(j.at("noise"), "sigma", "noise", 1.0);

    const auto& v = need(j, "solver", "");
    s.solver.method =
        method_from_string(as<std::string>(need(v, "method", "solver"), "solver.method"));
    s.solver.lambda_mode = lambda_mode_from_string(
        opt<std::string>(v, "lambda_mode", "solver", std::string("fixed")));
    s.solver.lambda_value = opt<double>(v, "lambda_value", "solver", 1.0);
    s.solver.quantile = opt<double>(v, "quantile", "solver", 0.95);
    s.solver.draws = opt<std::size_t>(v, "draws", "solver", std::size_t{100000});
    s.solver.tau = opt<double>(v, "tau", "solver", -1.0);
    s.solver.tol = opt<double>(v, "tol", "solver", 1e-8);
    s.solver.max_iters = opt<std::size_t>(v, "max_iters", "solver", std::size_t{0});
    return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json d{{"kind", to_string(s.design.kind)}, {"n", s.design.n},
                     {"p", s.design.p},                  {"seed", s.design.seed},
                     {"normalize", s.design.normalize}};
    if (s.design.kind == DesignKind::file) d["path"] = s.design.path;
    return nlohmann::json{
        {"name", s.name},
        {"replicates", s.replicates},
        {"seed_base", s.seed_base},
        {"resample_design", s.resample_design},
        {"output_path", s.output_path},
        {"design", d},
        {"signal",
         {{"sparsity", s.signal.sparsity},
          {"amplitude_rule", to_string(s.signal.rule)},
          {"amplitude", s.signal.amplitude}}},
        {"noise", {{"sigma", s.noise.sigma}}},
        {"solver",
         {{"method", to_string(s.solver.method)},
          {"lambda_mode", to_string(s.solver.lambda_mode)},
          {"lambda_value", s.solver.lambda_value},
          {"quantile", s.solver.quantile},
          {"draws", s.solver.draws},
          {"tau", s.solver.tau},
          {"tol", s.solver.tol},
          {"max_iters", s.solver.max_iters}}}};
}

namespace {

DesignMatrix build_design(const Scenario::Design& d, std::uint64_t seed) {
    DesignMatrix X;
    switch (d.kind) {
        case DesignKind::gaussian: X = gen_gaussian(d.n, d.p, seed); break;
        case DesignKind::bernoulli: X = gen_bernoulli(d.n, d.p, seed); break;
        case DesignKind::partial_fourier: X = gen_partial_fourier(d.n, d.p, seed); break;
        case DesignKind::identity_fourier: X = gen_identity_fourier(d.n); break;
        case DesignKind::file: X = design_from_matrix(load_matrix(d.path)); break;
    }
    // bernoulli and the trigonometric designs carry exactly unit columns.
    const bool already_unit = d.kind == DesignKind::bernoulli ||
                              d.kind == DesignKind::partial_fourier ||
                              d.kind == DesignKind::identity_fourier;
    if (d.normalize && !already_unit) X = normalize_columns(X);
    return X;
}

void validate(const Scenario& s) {
    if (s.replicates == 0) throw ConfigError("replicates must be positive");
    if (!(s.noise.sigma >= 0.0)) throw ConfigError("noise.sigma must be nonnegative");
    if (!(s.solver.tol > 0.0)) throw ConfigError("solver.tol must be positive");
    const LambdaMode mode = s.solver.lambda_mode;
    const Method method = s.solver.method;
    if (mode == LambdaMode::t_from_truth && method != Method::lasso_constrained)
        throw ConfigError("solver.lambda_mode t_from_truth requires method lasso_constrained");
    if (mode == LambdaMode::mc_quantile) {
        if (method == Method::lasso_constrained || method == Method::canonical)
            throw ConfigError("solver.lambda_mode mc_quantile does not apply to method " +
                              to_string(method));
        if (!(s.noise.sigma > 0.0))
            throw ConfigError("solver.lambda_mode mc_quantile requires positive noise.sigma");
    }
    if (mode == LambdaMode::fixed && method != Method::canonical &&
        !(s.solver.lambda_value > 0.0) &&
        !(method == Method::lasso_constrained && s.solver.lambda_value == 0.0) &&
        !(method == Method::lasso && s.solver.lambda_value == 0.0))
        throw ConfigError("solver.lambda_value must be positive");
}

// The level a method consumes: the residual-correlation bound for ds/gds and
// the lasso penalty, the budget t for the constrained lasso, the complexity
// penalty for canonical (lambda_value <= 0 means 2 log p).
double resolve_level(const Scenario& s, const DesignMatrix& X, std::uint64_t calib_seed) {
    const auto& v = s.solver;
    switch (v.lambda_mode) {
        case LambdaMode::fixed:
            if (v.method == Method::canonical && v.lambda_value <= 0.0)
                return 2.0 * std::log(static_cast<double>(X.X.cols));
            return v.lambda_value;
        case LambdaMode::mc_quantile:
            return mc_lambda(X, s.noise.sigma, v.quantile, v.draws, calib_seed).lambda_sigma;
        case LambdaMode::t_from_truth:
            return -1.0;  // resolved per replicate from the truth
    }
    return v.lambda_value;
}

Estimate run_method(const Scenario& s, const DesignMatrix& X, const Vector& y, double level,
                    const SparseTruth& truth) {
    const auto& v = s.solver;
    const std::optional<double> tau =
        v.tau < 0.0 ? std::nullopt : std::optional<double>(v.tau);
    DSOptions dso;
    dso.lambda_sigma = level;
    dso.tol_gap = v.tol;
    dso.tol_feas = v.tol;
    dso.max_iters = v.max_iters ? v.max_iters : 100;
    LassoOptions lo;
    lo.tol = v.tol;
    lo.max_iters = v.max_iters ? v.max_iters : 10000;
    switch (v.method) {
        case Method::ds: return solve_ds(X, y, dso);
        case Method::gds: return gauss_dantzig(X, y, dso, tau);
        case Method::lasso:
            lo.lambda = level;
            return solve_lasso_penalized(X, y, lo);
        case Method::lasso_constrained:
            lo.t_budget = v.lambda_mode == LambdaMode::t_from_truth ? norm1(truth.beta) : level;
            return solve_lasso_constrained(X, y, lo);
        case Method::gauss_lasso:
            lo.lambda = level;
            return gauss_lasso(X, y, lo, tau);
        case Method::canonical: return canonical_selection(X, y, s.noise.sigma, level);
    }
    throw std::logic_error("unreachable method");
}

}  // namespace

ResultTable run_scenario(const Scenario& s) {
    validate(s);
    ResultTable result;
    result.scenario = s;

    DesignMatrix base_design;
    double base_level = 0.0;
    if (!s.resample_design) {
        base_design = build_design(s.design, s.design.seed);
        if (s.signal.sparsity > base_design.X.cols) throw ConfigError("signal.sparsity exceeds p");
        if (s.solver.method == Method::canonical && base_design.X.cols > 20)
            throw ConfigError("method canonical requires p <= 20");
        base_level = resolve_level(s, base_design, splitmix64(s.seed_base ^ kCalibStream));
        result.lambda_level = base_level;
    } else if (s.design.kind == DesignKind::file || s.design.kind == DesignKind::identity_fourier) {
        throw ConfigError("resample_design requires a randomized design kind");
    }

    const std::size_t reps = s.replicates;
    result.rows.assign(reps, ReplicateRow{});
    const double nan = std::numeric_limits<double>::quiet_NaN();

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ri = 0; ri < static_cast<std::int64_t>(reps); ++ri) {
        const std::size_t r = static_cast<std::size_t>(ri);
        const std::uint64_t rs = replicate_seed(s.seed_base, r);
        ReplicateRow row;
        row.replicate = r;
        row.method = to_string(s.solver.method);
        row.sparsity = s.signal.sparsity;
        row.sigma = s.noise.sigma;
        try {
            const DesignMatrix* X = &base_design;
            DesignMatrix own;
            double level = base_level;
            if (s.resample_design) {
                own = build_design(s.design, splitmix64(rs ^ kDesignStream));
                if (s.signal.sparsity > own.X.cols)
                    throw std::invalid_argument("sparsity exceeds p");
                level = resolve_level(s, own, splitmix64(rs ^ kCalibStream));
                X = &own;
            }
            row.n = X->X.rows;
            row.p = X->X.cols;
            SparseTruth truth = gen_sparse_truth(X->X.cols, s.signal.sparsity, s.signal.rule,
                                                 s.signal.amplitude, splitmix64(rs ^ kTruthStream));
            Vector y = serial::mat_vec(X->X, truth.beta);
            if (s.noise.sigma > 0.0) {
                Rng noise(splitmix64(rs ^ kNoiseStream));
                for (std::size_t i = 0; i < y.size(); ++i) y[i] += s.noise.sigma * noise.normal();
            }
            const Estimate est = run_method(s, *X, y, level, truth);
            const Metrics m = evaluate(est.beta, truth, *X);
            row.lambda = s.solver.lambda_mode == LambdaMode::t_from_truth ? norm1(truth.beta)
                                                                           : level;
            row.rel_l2_error = m.rel_l2_error;
            row.support_precision = m.support_precision;
            row.support_recall = m.support_recall;
            row.pred_error = m.pred_error;
            row.runtime_ms = est.wall_ms;
            row.status = est.status;
        } catch (...) {
            row.n = s.design.n;
            row.p = s.design.p;
            row.status = "failed";
            row.lambda = nan;
            row.rel_l2_error = row.support_precision = row.support_recall = nan;
            row.pred_error = row.runtime_ms = nan;
        }
        result.rows[r] = std::move(row);
    }

    bool any_ok = false;
    for (const auto& row : result.rows)
        if (row.status == "ok") any_ok = true;
    if (any_ok) result.summary = summarize(result.rows);
    return result;
}

Summary summarize(const std::vector<ReplicateRow>& rows) {
    std::vector<const ReplicateRow*> ok;
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.status == "ok")
            ok.push_back(&r);
        else
            ++failed;
    }
    if (ok.empty()) throw std::runtime_error("summarize: no successful replicates");

    auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[(v.size() - 1) / 2];
    };
    std::vector<double> rel, pred;
    rel.reserve(ok.size());
    pred.reserve(ok.size());
    Summary out;
    out.rows_ok = ok.size();
    out.rows_failed = failed;
    for (const auto* r : ok) {
        rel.push_back(r->rel_l2_error);
        pred.push_back(r->pred_error);
        out.mean_rel_l2 += r->rel_l2_error;
        out.mean_pred_error += r->pred_error;
        out.mean_precision += r->support_precision;
        out.mean_recall += r->support_recall;
        out.mean_runtime_ms += r->runtime_ms;
    }
    const double k = static_cast<double>(ok.size());
    out.mean_rel_l2 /= k;
    out.mean_pred_error /= k;
    out.mean_precision /= k;
    out.mean_recall /= k;
    out.mean_runtime_ms /= k;
    out.median_rel_l2 = median_of(rel);
    out.median_pred_error = median_of(pred);
    if (ok.size() == 1) {
        out.std_rel_l2 = 0.0;
        out.single_sample = true;
    } else {
        double ss = 0.0;
        for (double v : rel) ss += (v - out.mean_rel_l2) * (v - out.mean_rel_l2);
        out.std_rel_l2 = std::sqrt(ss / (k - 1.0));
    }
    return out;
}

std::string to_csv(const std::vector<ReplicateRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.replicate);
        out += ',';
        out += r.method;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.p);
        out += ',';
        out += std::to_string(r.sparsity);
        out += ',';
        out += format_double(r.sigma);
        out += ',';
        out += format_double(r.lambda);
        out += ',';
        out += format_double(r.rel_l2_error);
        out += ',';
        out += format_double(r.support_precision);
        out += ',';
        out += format_double(r.support_recall);
        out += ',';
        out += format_double(r.pred_error);
        out += ',';
        out += format_double(r.runtime_ms);
        out += ',';
        out += r.status;
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::vector<ReplicateRow> rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("csv: unexpected header");
    std::vector<ReplicateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 13) throw std::runtime_error("csv: expected 13 fields");
        ReplicateRow r;
        r.replicate = static_cast<std::size_t>(std::stoull(f[0]));
        r.method = f[1];
        r.n = static_cast<std::size_t>(std::stoull(f[2]));
        r.p = static_cast<std::size_t>(std::stoull(f[3]));
        r.sparsity = static_cast<std::size_t>(std::stoull(f[4]));
        r.sigma = parse_double(f[5]);
        r.lambda = parse_double(f[6]);
        r.rel_l2_error = parse_double(f[7]);
        r.support_precision = parse_double(f[8]);
        r.support_recall = parse_double(f[9]);
        r.pred_error = parse_double(f[10]);
        r.runtime_ms = parse_double(f[11]);
        r.status = f[12];
        rows.push_back(std::move(r));
    }
    return rows;
}

nlohmann::json summary_to_json(const ResultTable& result) {
    nlohmann::json summary;
    if (result.summary) {
        const Summary& s = *result.summary;
        summary = {{"rows_ok", s.rows_ok},
                   {"rows_failed", s.rows_failed},
                   {"median_rel_l2", s.median_rel_l2},
                   {"mean_rel_l2", s.mean_rel_l2},
                   {"std_rel_l2", s.std_rel_l2},
                   {"median_pred_error", s.median_pred_error},
                   {"mean_pred_error", s.mean_pred_error},
                   {"mean_precision", s.mean_precision},
                   {"mean_recall", s.mean_recall},
                   {"mean_runtime_ms", s.mean_runtime_ms},
                   {"single_sample", s.single_sample}};
    } else {
        summary = {{"rows_ok", 0}, {"rows_failed", result.rows.size()}};
    }
    return nlohmann::json{{"scenario", scenario_to_json(result.scenario)},
                          {"lambda_level", result.lambda_level},
                          {"summary", summary}};
}

void write_outputs(const ResultTable& result, const std::string& base_path) {
    {
        std::ofstream f(base_path + ".csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for writing: " + base_path + ".csv");
        f << to_csv(result.rows);
        if (!f) throw std::runtime_error("write failed: " + base_path + ".csv");
    }
    {
        std::ofstream f(base_path + ".summary.json", std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open for writing: " + base_path + ".summary.json");
        f << summary_to_json(result).dump(2) << '\n';
        if (!f) throw std::runtime_error("write failed: " + base_path + ".summary.json");
    }
}

std::string table_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split(line, ',');
        if (f.size() > width.size()) width.resize(f.size(), 0);
        for (std::size_t i = 0; i < f.size(); ++i) width[i] = std::max(width[i], f[i].size());
        cells.push_back(std::move(f));
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            out += row[i];
            if (i + 1 < row.size()) out.append(width[i] - row[i].size(), ' ');
        }
        out += '\n';
    }
    return out;
}

}  // namespace ds
