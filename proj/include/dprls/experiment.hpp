#pragma once

// End-to-end runs: simulate -> perturb -> estimate -> diagnose, with traces
// persisted as CSV and summaries as JSON.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dprls/arx_model.hpp"
#include "dprls/privacy.hpp"
#include "dprls/stability.hpp"

namespace dprls {

struct InputSpec {
    double variance = 1.0;
    // Inputs are zeroed from this time index on (u_{i,k} = 0 for k >= zero_after).
    std::optional<std::size_t> zero_after;
};

struct NoiseSpec {
    double variance = 1.0;  // 0 means w_k = 0
};

enum class PrivacyMode {
    none,         // nothing perturbed
    explicit_scales,
    calibrate,    // calibrate_all(rho)
    output_only,  // b0 = C1 d / e, inputs unperturbed
    optimize,     // optimize_noise with the given gamma3
};

std::string_view privacy_mode_name(PrivacyMode m);

struct PrivacyConfig {
    PrivacyMode mode = PrivacyMode::calibrate;
    double epsilon = 0.5;
    double delta_adj = 1.0;
    double rho = 0.5;
    double gamma3 = 1.0;
    std::optional<std::vector<double>> coefficient_bounds;  // defaults to sum_j |b_ij|
    std::vector<double> scales;                             // explicit mode
};

struct ExperimentConfig {
    ArxModel model = ArxModel::example1();
    std::vector<InputSpec> inputs;  // one per participant
    NoiseSpec noise;
    PrivacyConfig privacy;
    std::size_t horizon = 1000;
    std::vector<std::uint64_t> seeds{1};
    double alpha = 1.0;
    double kappa = 1.1;
    std::size_t trace_stride = 100;
    std::string output;

    void validate() const;
};

// Throws ArgumentError on unknown keys, wrong types or invalid values.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct ResolvedPrivacy {
    std::vector<double> scales;  // b0, b1..bm; zero means unperturbed
    std::optional<StabilityCertificate> certificate;
    std::optional<PrivacyConstants> constants;
};

// Throws CalibrationImpossible for calibrated modes on an unstable model.
ResolvedPrivacy resolve_privacy(const ExperimentConfig& config);

inline constexpr int kTraceSchemaVersion = 1;

struct TraceRow {
    std::size_t k = 0;
    double err = 0.0;  // ||theta - theta_k||
    double lambda_min_info = 0.0;
    double r_k = 0.0;
    double s_k = 0.0;
    double gamma1_hat = 0.0;
    double a_bar = 0.0;
    double ratio = 0.0;
};

struct RunSummary {
    std::uint64_t seed = 0;
    std::size_t final_k = 0;
    double final_error = 0.0;
    double gamma1_hat = 0.0;
    double s_k = 0.0;
    double theta_norm = 0.0;
    double bound_thm4 = 0.0;
    std::vector<double> scales;
    std::optional<PrivacyConstants> constants;
    double wall_seconds = 0.0;
    bool failed = false;
    std::string failure;
};

struct RunRecord {
    std::vector<TraceRow> rows;
    RunSummary summary;
};

RunRecord run_seed(const ExperimentConfig& config, const ResolvedPrivacy& privacy, std::uint64_t seed);
std::vector<RunRecord> run(const ExperimentConfig& config);

void write_trace_csv(const std::filesystem::path& path, const RunRecord& record);
nlohmann::json summary_json(const ExperimentConfig& config, const std::vector<RunRecord>& records);
// Writes trace_seed<S>.csv per seed and summary.json into dir.
void persist(const std::filesystem::path& dir, const ExperimentConfig& config, const std::vector<RunRecord>& records);

enum class SweepAxis { epsilon, delta_adj, sigma2 };
std::string_view sweep_axis_name(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view s);
ExperimentConfig with_axis_value(ExperimentConfig config, SweepAxis axis, double value);

struct SweepResult {
    SweepAxis axis = SweepAxis::epsilon;
    std::vector<double> values;
    std::vector<std::vector<RunRecord>> runs;     // [value][seed]
    std::vector<std::size_t> ks;                  // shared trace grid
    std::vector<std::vector<double>> mean_error;  // [value][row]
    std::vector<double> final_mean_error;
    // epsilon and sigma2: error should not increase along the axis; delta:
    // it should not decrease.
    bool expect_non_increasing = true;
    std::size_t inversions = 0;  // adjacent pairs against the expected order
};

SweepResult sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<double>& values);
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result);
nlohmann::json sweep_summary_json(const SweepResult& result);

struct ComparisonRow {
    std::string quantity;
    double computed = 0.0;
    std::optional<double> reference;
    double rel_dev() const;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    const ComparisonRow* find(std::string_view quantity) const;
};

ComparisonTable reproduce_example1();

struct Example2Report {
    ComparisonTable constants;
    SweepResult epsilon_sweep;
};

Example2Report reproduce_example2(std::size_t horizon = 100000, std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});

// Worker count: DPRLS_WORKERS if set and positive, else hardware threads.
unsigned worker_count();
// Runs body(i) for i in [0, n) on a pool; exceptions are rethrown after join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dprls
