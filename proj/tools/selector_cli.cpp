// Command-line front end: data generation, single solves, level calibration,
// exhaustive oracles, scenario experiments, and CSV reports.

#include "ds/calibration.hpp"
#include "ds/dantzig.hpp"
#include "ds/designs.hpp"
#include "ds/harness.hpp"
#include "ds/kernels.hpp"
#include "ds/lasso.hpp"
#include "ds/matrix.hpp"
#include "ds/oracles.hpp"
#include "ds/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolverFailure = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ds::ConfigError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ds::ConfigError("cannot write " + path);
    out << text;
}

std::string sidecar_path(const std::string& design_path) { return design_path + ".meta.json"; }

struct LoadedDesign {
    ds::DesignMatrix design;
    json meta;  // null when no sidecar exists
};

LoadedDesign load_design(const std::string& path) {
    LoadedDesign out;
    out.design = ds::design_from_matrix(ds::load_matrix(path));
    out.meta = json();
    std::ifstream meta(sidecar_path(path));
    if (meta) {
        try {
            meta >> out.meta;
        } catch (const json::exception& e) {
            throw ds::ConfigError(sidecar_path(path) + ": " + e.what());
        }
    }
    return out;
}

ds::Vector vector_from_meta(const json& meta, const std::string& key) {
    if (!meta.contains(key)) throw ds::ConfigError("sidecar is missing \"" + key + "\"");
    return meta.at(key).get<ds::Vector>();
}

ds::SparseTruth truth_from_meta(const json& meta, std::size_t p) {
    if (!meta.contains("truth")) throw ds::ConfigError("sidecar is missing \"truth\"");
    const json& t = meta.at("truth");
    ds::SparseTruth truth;
    truth.support = t.at("support").get<ds::IndexSet>();
    const ds::Vector values = t.at("values").get<ds::Vector>();
    if (values.size() != truth.support.size())
        throw ds::ConfigError("sidecar truth support/values length mismatch");
    truth.beta.assign(p, 0.0);
    for (std::size_t k = 0; k < truth.support.size(); ++k) {
        if (truth.support[k] >= p) throw ds::ConfigError("sidecar truth index out of range");
        truth.beta[truth.support[k]] = values[k];
    }
    truth.sparsity = truth.support.size();
    return truth;
}

json estimate_to_json(const ds::Estimate& est) {
    return json{{"beta", est.beta},
                {"objective", est.objective},
                {"feasibility_residual", est.feasibility_residual},
                {"solver", est.solver},
                {"iterations", est.iterations},
                {"wall_ms", est.wall_ms},
                {"status", est.status}};
}

void emit(const json& payload, const std::string& out_path, bool quiet) {
    const std::string text = payload.dump(2) + "\n";
    if (!out_path.empty()) {
        write_file(out_path, text);
        if (!quiet) std::cout << "wrote " << out_path << "\n";
    } else {
        std::cout << text;
    }
}

struct GenArgs {
    std::string kind = "gaussian";
    std::size_t n = 0, p = 0;
    std::size_t sparsity = 0;
    std::string rule = "gaussian_unit";
    double amplitude = 1.0;
    double sigma = 1.0;
    bool no_normalize = false;
};

int run_gen(const GenArgs& a, std::uint64_t seed, const std::string& out, bool quiet) {
    if (out.empty()) throw ds::ConfigError("gen requires --out <design file>");
    const ds::DesignKind kind = ds::design_kind_from_string(a.kind);
    ds::DesignMatrix d;
    switch (kind) {
        case ds::DesignKind::gaussian:
            d = ds::gen_gaussian(a.n, a.p, seed);
            if (!a.no_normalize) d = ds::normalize_columns(d);
            break;
        case ds::DesignKind::bernoulli: d = ds::gen_bernoulli(a.n, a.p, seed); break;
        case ds::DesignKind::partial_fourier: d = ds::gen_partial_fourier(a.n, a.p, seed); break;
        case ds::DesignKind::identity_fourier:
            if (a.p != 0 && a.p != 2 * a.n)
                throw ds::ConfigError("identity_fourier has p = 2n; omit --p or pass 2n");
            d = ds::gen_identity_fourier(a.n);
            break;
        case ds::DesignKind::file: throw ds::ConfigError("gen needs a generator kind, not file");
    }
    const std::size_t p = d.X.cols;
    const ds::SparseTruth truth = ds::gen_sparse_truth(
        p, a.sparsity, ds::amplitude_rule_from_string(a.rule), a.amplitude, ds::mix_seed(seed, 1));
    if (a.sigma < 0.0) throw ds::ConfigError("sigma must be nonnegative");
    ds::Vector y = ds::mat_vec(d.X, truth.beta);
    ds::Rng noise(ds::mix_seed(seed, 2));
    for (auto& v : y) v += a.sigma * noise.normal();

    ds::save_matrix(d.X, out);
    ds::Vector values;
    for (std::size_t idx : truth.support) values.push_back(truth.beta[idx]);
    json meta{{"kind", ds::to_string(kind)},
              {"seed", seed},
              {"n", d.X.rows},
              {"p", p},
              {"normalized", !a.no_normalize},
              {"column_norms", d.column_norms},
              {"sigma", a.sigma},
              {"truth",
               {{"support", truth.support},
                {"values", values},
                {"sparsity", truth.sparsity},
                {"rule", ds::to_string(truth.amplitude_rule)},
                {"amplitude", truth.amplitude}}},
              {"y", y}};
    write_file(sidecar_path(out), meta.dump(2) + "\n");
    if (!quiet)
        std::cout << "wrote " << out << " (" << d.X.rows << "x" << p << ") and "
                  << sidecar_path(out) << "\n";
    return kExitOk;
}

struct SolveArgs {
    std::string design_path;
    std::string method = "ds";
    std::string lambda_mode = "fixed";
    double lambda_sigma = -1.0;
    double quantile = 0.95;
    std::size_t draws = 100000;
    double lambda = -1.0;
    double t_budget = -1.0;
    bool t_from_truth = false;
    double tau = -1.0;
    double sigma = -1.0;
    double tol = 1e-8;
    std::size_t max_iters = 0;
};

int run_solve(const SolveArgs& a, std::uint64_t seed, const std::string& out, bool quiet) {
    LoadedDesign loaded = load_design(a.design_path);
    const ds::DesignMatrix& d = loaded.design;
    if (loaded.meta.is_null())
        throw ds::ConfigError("solve needs the sidecar " + sidecar_path(a.design_path));
    const ds::Vector y = vector_from_meta(loaded.meta, "y");
    if (y.size() != d.X.rows) throw ds::ConfigError("sidecar y length does not match the design");
    double sigma = a.sigma;
    if (sigma <= 0.0 && loaded.meta.contains("sigma"))
        sigma = loaded.meta.at("sigma").get<double>();

    const ds::Method method = ds::method_from_string(a.method);
    const std::optional<double> tau =
        a.tau < 0.0 ? std::nullopt : std::optional<double>(a.tau);

    double level = a.lambda_sigma;
    if (method == ds::Method::ds || method == ds::Method::gds) {
        if (a.lambda_mode == "mc") {
            if (sigma <= 0.0)
                throw ds::ConfigError("calibrated mode needs a positive sigma "
                                      "(sidecar or --sigma)");
            level = ds::mc_lambda(d, sigma, a.quantile, a.draws, seed).lambda_sigma;
        } else if (a.lambda_mode != "fixed") {
            throw ds::ConfigError("unknown --lambda-mode \"" + a.lambda_mode + "\"");
        } else if (level < 0.0) {
            throw ds::ConfigError("--method " + a.method +
                                  " needs --lambda-sigma or --lambda-mode mc");
        }
    }

    ds::Estimate est;
    switch (method) {
        case ds::Method::ds:
        case ds::Method::gds: {
            ds::DSOptions opts;
            opts.lambda_sigma = level;
            opts.tol_gap = a.tol;
            opts.tol_feas = a.tol;
            if (a.max_iters > 0) opts.max_iters = a.max_iters;
            est = method == ds::Method::ds ? ds::solve_ds(d, y, opts)
                                           : ds::gauss_dantzig(d, y, opts, tau);
            break;
        }
        case ds::Method::lasso:
        case ds::Method::gauss_lasso: {
            if (a.lambda < 0.0) throw ds::ConfigError("--method lasso needs --lambda");
            ds::LassoOptions opts;
            opts.lambda = a.lambda;
            opts.tol = a.tol;
            if (a.max_iters > 0) opts.max_iters = a.max_iters;
            est = method == ds::Method::lasso ? ds::solve_lasso_penalized(d, y, opts)
                                              : ds::gauss_lasso(d, y, opts, tau);
            break;
        }
        case ds::Method::lasso_constrained: {
            double t = a.t_budget;
            if (a.t_from_truth) {
                const ds::SparseTruth truth = truth_from_meta(loaded.meta, d.X.cols);
                t = ds::norm1(truth.beta);
            }
            if (t < 0.0)
                throw ds::ConfigError("--method lasso-constrained needs --t-budget or "
                                      "--t-from-truth");
            ds::LassoOptions opts;
            opts.t_budget = t;
            opts.tol = a.tol;
            if (a.max_iters > 0) opts.max_iters = a.max_iters;
            est = ds::solve_lasso_constrained(d, y, opts);
            break;
        }
        case ds::Method::canonical:
            throw ds::ConfigError("use the oracle subcommand for canonical selection");
    }

    json payload = estimate_to_json(est);
    if (method == ds::Method::ds || method == ds::Method::gds) payload["lambda_sigma"] = level;
    emit(payload, out, quiet);
    return est.status == "ok" ? kExitOk : kExitSolverFailure;
}

struct CalibrateArgs {
    std::string design_path;
    double quantile = 0.95;
    std::size_t draws = 100000;
    double sigma = 1.0;
    bool per_column = false;
};

int run_calibrate(const CalibrateArgs& a, std::uint64_t seed, const std::string& out,
                  bool quiet) {
    LoadedDesign loaded = load_design(a.design_path);
    const ds::CalibrationResult r =
        a.per_column ? ds::mc_lambda_per_column(loaded.design, a.sigma, a.quantile, a.draws, seed)
                     : ds::mc_lambda(loaded.design, a.sigma, a.quantile, a.draws, seed);
    json payload{{"lambda_p", r.lambda_p},
                 {"lambda_sigma", r.lambda_sigma},
                 {"quantile", r.quantile},
                 {"draws", r.draws},
                 {"sigma", r.sigma},
                 {"empirical_cdf_at_lambda", r.empirical_cdf_at_lambda}};
    if (r.per_column) payload["per_column"] = *r.per_column;
    emit(payload, out, quiet);
    return kExitOk;
}

struct OracleArgs {
    std::string design_path;
    std::string mode = "ideal-risk";
    double lambda_p = -1.0;
    double sigma = -1.0;
    std::size_t max_p = 20;
};

int run_oracle(const OracleArgs& a, const std::string& out, bool quiet) {
    LoadedDesign loaded = load_design(a.design_path);
    const ds::DesignMatrix& d = loaded.design;
    if (loaded.meta.is_null())
        throw ds::ConfigError("oracle needs the sidecar " + sidecar_path(a.design_path));
    double sigma = a.sigma;
    if (sigma <= 0.0 && loaded.meta.contains("sigma"))
        sigma = loaded.meta.at("sigma").get<double>();
    if (sigma <= 0.0) throw ds::ConfigError("oracle needs a positive sigma (sidecar or --sigma)");

    if (a.mode == "ideal-risk") {
        const ds::SparseTruth truth = truth_from_meta(loaded.meta, d.X.cols);
        const ds::IdealRisk best = ds::ideal_risk(d, truth.beta, sigma, a.max_p);
        const ds::SubsetRisk split = ds::subset_prediction_risk(d, truth.beta, sigma, best.subset);
        emit(json{{"mode", a.mode},
                  {"subset", best.subset},
                  {"risk", best.risk},
                  {"bias_sq", split.bias_sq},
                  {"variance", split.variance},
                  {"ideal_bound", ds::ideal_bound(truth.beta, sigma)},
                  {"sigma", sigma}},
             out, quiet);
        return kExitOk;
    }
    if (a.mode == "canonical") {
        const ds::Vector y = vector_from_meta(loaded.meta, "y");
        if (y.size() != d.X.rows)
            throw ds::ConfigError("sidecar y length does not match the design");
        const double lambda_p =
            a.lambda_p > 0.0 ? a.lambda_p : 2.0 * std::log(static_cast<double>(d.X.cols));
        ds::Estimate est = ds::canonical_selection(d, y, sigma, lambda_p, a.max_p);
        json payload = estimate_to_json(est);
        payload["mode"] = a.mode;
        payload["lambda_p"] = lambda_p;
        payload["subset"] = ds::estimated_support(est.beta);
        emit(payload, out, quiet);
        return kExitOk;
    }
    throw ds::ConfigError("unknown oracle mode \"" + a.mode + "\" (ideal-risk|canonical)");
}

int run_experiment(const std::string& scenario_path, const std::string& out, bool quiet) {
    json j;
    try {
        j = json::parse(read_file(scenario_path));
    } catch (const json::exception& e) {
        throw ds::ConfigError(scenario_path + ": " + e.what());
    }
    ds::Scenario s = ds::scenario_from_json(j);
    ds::ResultTable result = ds::run_scenario(s);
    std::string base = !out.empty() ? out : s.output_path;
    if (base.empty()) base = s.name;
    ds::write_outputs(result, base);
    if (!quiet) {
        std::cout << "wrote " << base << ".csv and " << base << ".summary.json\n";
        std::cout << ds::summary_to_json(result).dump(2) << "\n";
    }
    return kExitOk;
}

int run_report(const std::string& csv_path) {
    const std::string text = read_file(csv_path);
    std::cout << ds::table_from_csv(text);
    const std::vector<ds::ReplicateRow> rows = ds::rows_from_csv(text);
    try {
        const ds::Summary s = ds::summarize(rows);
        std::cout << "\nok " << s.rows_ok << ", failed " << s.rows_failed
                  << ", median rel_l2 " << ds::format_double(s.median_rel_l2) << ", mean "
                  << ds::format_double(s.mean_rel_l2) << ", std "
                  << ds::format_double(s.std_rel_l2) << ", mean pred_error "
                  << ds::format_double(s.mean_pred_error) << "\n";
    } catch (const std::exception& e) {
        std::cout << "\n" << e.what() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse regression toolkit: selector and lasso solvers, calibration, "
                 "oracles, and a scenario harness"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string out;
    int threads = 0;
    bool quiet = false;
    app.add_option("--seed", seed, "Base seed for anything random");
    app.add_option("--out", out, "Output path (file or report base name)");
    app.add_option("--threads", threads, "Worker thread count (0 keeps the default)");
    app.add_flag("--quiet", quiet, "Suppress progress chatter");

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a design, truth, and observations");
    gen_cmd->add_option("--kind", gen.kind, "gaussian|bernoulli|partial_fourier|identity_fourier");
    gen_cmd->add_option("--n", gen.n, "Rows")->required();
    gen_cmd->add_option("--p", gen.p, "Columns (derived for identity_fourier)");
    gen_cmd->add_option("--sparsity", gen.sparsity, "Nonzeros in the truth");
    gen_cmd->add_option("--rule", gen.rule, "gaussian_unit|signed_constant");
    gen_cmd->add_option("--amplitude", gen.amplitude, "Amplitude parameter for the rule");
    gen_cmd->add_option("--sigma", gen.sigma, "Noise level");
    gen_cmd->add_flag("--no-normalize", gen.no_normalize, "Keep raw gaussian column norms");

    SolveArgs solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Run one solver on a generated design");
    solve_cmd->add_option("design", solve.design_path, "Design file from gen")->required();
    solve_cmd->add_option("--method", solve.method, "ds|gds|lasso|lasso-constrained|gauss_lasso");
    solve_cmd->add_option("--lambda-sigma", solve.lambda_sigma, "Residual-correlation bound");
    solve_cmd->add_option("--lambda-mode", solve.lambda_mode, "fixed|mc");
    solve_cmd->add_option("--quantile", solve.quantile, "Calibration quantile for mc mode");
    solve_cmd->add_option("--draws", solve.draws, "Calibration draws for mc mode");
    solve_cmd->add_option("--lambda", solve.lambda, "Penalty for the lasso");
    solve_cmd->add_option("--t-budget", solve.t_budget, "l1 budget for the constrained lasso");
    solve_cmd->add_flag("--t-from-truth", solve.t_from_truth,
                        "Budget from the sidecar truth's l1 norm");
    solve_cmd->add_option("--tau", solve.tau, "Two-stage threshold override");
    solve_cmd->add_option("--sigma", solve.sigma, "Noise level override for mc mode");
    solve_cmd->add_option("--tol", solve.tol, "Solver tolerance");
    solve_cmd->add_option("--max-iters", solve.max_iters, "Iteration cap (0 keeps the default)");

    CalibrateArgs cal;
    CLI::App* cal_cmd = app.add_subcommand("calibrate", "Monte Carlo residual-correlation level");
    cal_cmd->add_option("design", cal.design_path, "Design file")->required();
    cal_cmd->add_option("--quantile", cal.quantile, "Quantile in (0,1)");
    cal_cmd->add_option("--draws", cal.draws, "Noise draws (>= 100)");
    cal_cmd->add_option("--sigma", cal.sigma, "Noise level");
    cal_cmd->add_flag("--per-column", cal.per_column, "Column-normalized levels");

    OracleArgs oracle;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "Exhaustive subset oracles");
    oracle_cmd->add_option("design", oracle.design_path, "Design file from gen")->required();
    oracle_cmd->add_option("--mode", oracle.mode, "ideal-risk|canonical");
    oracle_cmd->add_option("--lambda-p", oracle.lambda_p,
                           "Complexity penalty (canonical; <= 0 means 2 log p)");
    oracle_cmd->add_option("--sigma", oracle.sigma, "Noise level override");
    oracle_cmd->add_option("--max-p", oracle.max_p, "Exhaustive scan cap");

    std::string scenario_path;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "Run a scenario file");
    exp_cmd->add_option("scenario", scenario_path, "Scenario JSON")->required();

    std::string csv_path;
    CLI::App* report_cmd = app.add_subcommand("report", "Print a results CSV as a table");
    report_cmd->add_option("results", csv_path, "CSV written by experiment")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (*gen_cmd) return run_gen(gen, seed, out, quiet);
        if (*solve_cmd) return run_solve(solve, seed, out, quiet);
        if (*cal_cmd) return run_calibrate(cal, seed, out, quiet);
        if (*oracle_cmd) return run_oracle(oracle, out, quiet);
        if (*exp_cmd) return run_experiment(scenario_path, out, quiet);
        if (*report_cmd) return run_report(csv_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
