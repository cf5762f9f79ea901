#pragma once

#include "ds/designs.hpp"
#include "ds/matrix.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ds {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error("config: " + what) {}
};

enum class Method { ds, gds, lasso, lasso_constrained, gauss_lasso, canonical };
enum class LambdaMode { fixed, mc_quantile, t_from_truth };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
std::string to_string(LambdaMode m);
LambdaMode lambda_mode_from_string(const std::string& s);

// One repeated-draw study: the design is held fixed (unless resample_design),
// a fresh sparse truth and noise vector are drawn per replicate, and one
// estimator runs on each draw.
struct Scenario {
    std::string name = "scenario";
    std::size_t replicates = 1;
    std::uint64_t seed_base = 0;
    bool resample_design = false;
    std::string output_path;  // optional; CLI --out overrides

    struct Design {
        DesignKind kind = DesignKind::gaussian;
        std::size_t n = 0, p = 0;
        std::uint64_t seed = 0;
        bool normalize = true;
        std::string path;  // kind == file
    } design;

    struct Signal {
        std::size_t sparsity = 0;
        AmplitudeRule rule = AmplitudeRule::gaussian_unit;
        double amplitude = 1.0;
    } signal;

    struct Noise {
        double sigma = 1.0;
    } noise;

    struct Solver {
        Method method = Method::ds;
        LambdaMode lambda_mode = LambdaMode::fixed;
        double lambda_value = 1.0;  // fixed: the level itself (ds/gds/lasso: the
                                    // residual-correlation bound; lasso_constrained: the
                                    // budget t; canonical: the complexity penalty, with
                                    // values <= 0 meaning the 2*log(p) default)
        double quantile = 0.95;     // mc_quantile
        std::size_t draws = 100000; // mc_quantile
        double tau = -1.0;          // gds / gauss_lasso; < 0 uses the default rule
        double tol = 1e-8;
        std::size_t max_iters = 0;  // 0: per-method default
    } solver;
};

struct ReplicateRow {
    std::size_t replicate = 0;
    std::string method;
    std::size_t n = 0, p = 0, sparsity = 0;
    double sigma = 0.0;
    double lambda = 0.0;  // the level this replicate actually used
    double rel_l2_error = 0.0;
    double support_precision = 0.0;
    double support_recall = 0.0;
    double pred_error = 0.0;
    double runtime_ms = 0.0;
    std::string status = "ok";
};

struct Summary {
    std::size_t rows_ok = 0;
    std::size_t rows_failed = 0;
    double median_rel_l2 = 0.0, mean_rel_l2 = 0.0, std_rel_l2 = 0.0;
    double median_pred_error = 0.0, mean_pred_error = 0.0;
    double mean_precision = 0.0, mean_recall = 0.0;
    double mean_runtime_ms = 0.0;
    bool single_sample = false;
};

struct ResultTable {
    Scenario scenario;
    std::vector<ReplicateRow> rows;  // ordered by replicate index
    double lambda_level = 0.0;       // resolved fixed-design level, 0 if per-replicate
    std::optional<Summary> summary;  // absent when no row is ok
};

// Replicate r of a study with master seed `base`; distinct replicates get
// unrelated generator states, independent of how many run before them.
std::uint64_t replicate_seed(std::uint64_t base, std::size_t r);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

// Runs the study. The design is generated once and the level calibrated once
// (Monte Carlo calibration draws noise under a dedicated sub-seed of
// seed_base); with resample_design both happen per replicate. Replicates run
// in parallel, each from its own counter-derived seed, so the table does not
// depend on the thread count. A replicate that throws is recorded with
// status "failed" and NaN metrics rather than aborting the table.
ResultTable run_scenario(const Scenario& s);

// Statistics over the rows with status "ok". Medians take the lower middle
// value for even counts; std is the sample standard deviation (zero for a
// single row, with single_sample set). Throws "no successful replicates" if
// every row failed.
Summary summarize(const std::vector<ReplicateRow>& rows);

std::string to_csv(const std::vector<ReplicateRow>& rows);
std::vector<ReplicateRow> rows_from_csv(const std::string& text);

nlohmann::json summary_to_json(const ResultTable& result);

// Writes <base>.csv and <base>.summary.json.
void write_outputs(const ResultTable& result, const std::string& base_path);

// Plain-text alignment of a CSV for terminal reports.
std::string table_from_csv(const std::string& text);

}  // namespace ds
