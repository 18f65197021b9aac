#include "dprls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <thread>

#include "dprls/error.hpp"
#include "dprls/noise_optimizer.hpp"
#include "dprls/rls.hpp"
#include "dprls/rng.hpp"

namespace dprls {

using nlohmann::json;

// ---- configuration ---------------------------------------------------------

std::string_view privacy_mode_name(PrivacyMode m) {
    switch (m) {
        case PrivacyMode::none: return "none";
        case PrivacyMode::explicit_scales: return "explicit";
        case PrivacyMode::calibrate: return "calibrate";
        case PrivacyMode::output_only: return "output_only";
        case PrivacyMode::optimize: return "optimize";
    }
    return "unknown";
}

namespace {

PrivacyMode parse_mode(const std::string& s) {
    for (auto m : {PrivacyMode::none, PrivacyMode::explicit_scales, PrivacyMode::calibrate, PrivacyMode::output_only,
                   PrivacyMode::optimize})
        if (s == privacy_mode_name(m)) return m;
    throw ArgumentError("config: unknown privacy mode '" + s + "'");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) throw ArgumentError("config: " + where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ArgumentError("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ArgumentError("config: bad value for " + where + "." + key + ": " + e.what());
    }
}

InputSpec parse_input(const json& j, const std::string& where) {
    check_keys(j, {"variance", "zero_after"}, where);
    InputSpec s;
    if (j.contains("variance")) s.variance = get_as<double>(j, "variance", where);
    if (j.contains("zero_after") && !j.at("zero_after").is_null())
        s.zero_after = get_as<std::size_t>(j, "zero_after", where);
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (horizon < 1) throw ArgumentError("config: horizon must be at least 1");
    if (seeds.empty()) throw ArgumentError("config: at least one seed is required");
    if (inputs.size() != model.m())
        throw ArgumentError("config: expected " + std::to_string(model.m()) + " input specs");
    for (const auto& in : inputs)
        if (!(in.variance >= 0.0) || !std::isfinite(in.variance))
            throw ArgumentError("config: input variances must be finite and >= 0");
    if (!(noise.variance >= 0.0) || !std::isfinite(noise.variance))
        throw ArgumentError("config: noise variance must be finite and >= 0");
    if (!(alpha > 0.0)) throw ArgumentError("config: alpha must be positive");
    if (!(kappa > 1.0)) throw ArgumentError("config: kappa must exceed 1");
    if (trace_stride < 1) throw ArgumentError("config: trace_stride must be at least 1");
    const auto& pv = privacy;
    if (pv.mode != PrivacyMode::none && pv.mode != PrivacyMode::explicit_scales) {
        if (!(pv.epsilon > 0.0)) throw ArgumentError("config: epsilon must be positive");
        if (!(pv.delta_adj > 0.0)) throw ArgumentError("config: delta must be positive");
    }
    if (pv.mode == PrivacyMode::calibrate && !(pv.rho > 0.0 && pv.rho < 1.0))
        throw ArgumentError("config: rho must lie in (0, 1)");
    if (pv.mode == PrivacyMode::optimize && !(pv.gamma3 > 0.0))
        throw ArgumentError("config: gamma3 must be positive");
    if (pv.mode == PrivacyMode::explicit_scales) {
        if (pv.scales.size() != model.m() + 1)
            throw ArgumentError("config: explicit privacy needs " + std::to_string(model.m() + 1) + " scales");
        for (double b : pv.scales)
            if (!(b >= 0.0) || !std::isfinite(b)) throw ArgumentError("config: scales must be finite and >= 0");
    }
    if (pv.coefficient_bounds && pv.coefficient_bounds->size() != model.m())
        throw ArgumentError("config: coefficient_bounds needs one entry per participant");
}

ExperimentConfig config_from_json(const json& doc) {
    check_keys(doc, {"model", "inputs", "noise", "privacy", "horizon", "seeds", "alpha", "kappa", "trace_stride",
                     "output"},
               "root");
    ExperimentConfig c;
    if (doc.contains("model")) {
        const json& m = doc.at("model");
        if (m.is_string()) {
            const auto name = m.get<std::string>();
            if (name == "example1") c.model = ArxModel::example1();
            else if (name == "example2") c.model = ArxModel::example2();
            else throw ArgumentError("config: unknown model preset '" + name + "'");
        } else {
            check_keys(m, {"a", "b"}, "model");
            auto a = m.contains("a") ? get_as<std::vector<double>>(m, "a", "model") : std::vector<double>{};
            auto b = get_as<std::vector<std::vector<double>>>(m, "b", "model");
            c.model = ArxModel(std::move(a), std::move(b));
        }
    }
    c.inputs.assign(c.model.m(), InputSpec{});
    if (doc.contains("inputs")) {
        const json& in = doc.at("inputs");
        if (in.is_array()) {
            if (in.size() != c.model.m())
                throw ArgumentError("config: inputs array needs one entry per participant");
            for (std::size_t i = 0; i < in.size(); ++i) c.inputs[i] = parse_input(in[i], "inputs[" + std::to_string(i) + "]");
        } else {
            const InputSpec shared = parse_input(in, "inputs");
            c.inputs.assign(c.model.m(), shared);
        }
    }
    if (doc.contains("noise")) {
        const json& n = doc.at("noise");
        check_keys(n, {"variance"}, "noise");
        if (n.contains("variance")) c.noise.variance = get_as<double>(n, "variance", "noise");
    }
    if (doc.contains("privacy")) {
        const json& p = doc.at("privacy");
        check_keys(p, {"mode", "epsilon", "delta", "rho", "gamma3", "coefficient_bounds", "scales"}, "privacy");
        if (p.contains("mode")) c.privacy.mode = parse_mode(get_as<std::string>(p, "mode", "privacy"));
        if (p.contains("epsilon")) c.privacy.epsilon = get_as<double>(p, "epsilon", "privacy");
        if (p.contains("delta")) c.privacy.delta_adj = get_as<double>(p, "delta", "privacy");
        if (p.contains("rho")) c.privacy.rho = get_as<double>(p, "rho", "privacy");
        if (p.contains("gamma3")) c.privacy.gamma3 = get_as<double>(p, "gamma3", "privacy");
        if (p.contains("coefficient_bounds"))
            c.privacy.coefficient_bounds = get_as<std::vector<double>>(p, "coefficient_bounds", "privacy");
        if (p.contains("scales")) c.privacy.scales = get_as<std::vector<double>>(p, "scales", "privacy");
    }
    if (doc.contains("horizon")) c.horizon = get_as<std::size_t>(doc, "horizon", "root");
    if (doc.contains("seeds")) c.seeds = get_as<std::vector<std::uint64_t>>(doc, "seeds", "root");
    if (doc.contains("alpha")) c.alpha = get_as<double>(doc, "alpha", "root");
    if (doc.contains("kappa")) c.kappa = get_as<double>(doc, "kappa", "root");
    if (doc.contains("trace_stride")) c.trace_stride = get_as<std::size_t>(doc, "trace_stride", "root");
    if (doc.contains("output")) c.output = get_as<std::string>(doc, "output", "root");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ArgumentError("config: " + path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& c) {
    json inputs = json::array();
    for (const auto& in : c.inputs) {
        json j{{"variance", in.variance}};
        if (in.zero_after) j["zero_after"] = *in.zero_after;
        inputs.push_back(j);
    }
    json privacy{{"mode", privacy_mode_name(c.privacy.mode)},
                 {"epsilon", c.privacy.epsilon},
                 {"delta", c.privacy.delta_adj},
                 {"rho", c.privacy.rho},
                 {"gamma3", c.privacy.gamma3}};
    if (c.privacy.coefficient_bounds) privacy["coefficient_bounds"] = *c.privacy.coefficient_bounds;
    if (!c.privacy.scales.empty()) privacy["scales"] = c.privacy.scales;
    return json{{"model", {{"a", c.model.a()}, {"b", c.model.b()}}},
                {"inputs", inputs},
                {"noise", {{"variance", c.noise.variance}}},
                {"privacy", privacy},
                {"horizon", c.horizon},
                {"seeds", c.seeds},
                {"alpha", c.alpha},
                {"kappa", c.kappa},
                {"trace_stride", c.trace_stride},
                {"output", c.output}};
}

ResolvedPrivacy resolve_privacy(const ExperimentConfig& config) {
    const auto& pv = config.privacy;
    const std::size_t m = config.model.m();
    ResolvedPrivacy out;
    switch (pv.mode) {
        case PrivacyMode::none:
            out.scales.assign(m + 1, 0.0);
            return out;
        case PrivacyMode::explicit_scales:
            out.scales = pv.scales;
            return out;
        default:
            break;
    }
    out.certificate = certify(config.model);
    const CoefficientBounds bounds =
        pv.coefficient_bounds ? CoefficientBounds{*pv.coefficient_bounds} : CoefficientBounds::exact(config.model);
    out.constants = constants(*out.certificate, config.model.p(), bounds);
    if (pv.mode == PrivacyMode::calibrate) {
        out.scales = calibrate_all(*out.constants, pv.epsilon, pv.delta_adj, pv.rho).b;
    } else if (pv.mode == PrivacyMode::output_only) {
        out.scales.assign(m + 1, 0.0);
        out.scales[0] = calibrate_b0(*out.constants, pv.epsilon, pv.delta_adj);
    } else {
        NoiseDesignProblem problem;
        problem.p = config.model.p();
        problem.q = config.model.q_list();
        problem.gamma3 = pv.gamma3;
        problem.epsilon = pv.epsilon;
        problem.delta_adj = pv.delta_adj;
        problem.consts = *out.constants;
        out.scales = optimize_noise(problem).b_star;
    }
    return out;
}

// ---- runs ------------------------------------------------------------------

RunRecord run_seed(const ExperimentConfig& config, const ResolvedPrivacy& privacy, std::uint64_t seed) {
    const auto started = std::chrono::steady_clock::now();
    const ArxModel& model = config.model;
    const std::size_t T = config.horizon;
    const std::size_t m = model.m();
    const std::size_t n = model.n();

    std::vector<std::vector<double>> inputs(m, std::vector<double>(T, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        RngStream rng(seed, stream_id::input_signal + i);
        const auto& spec = config.inputs[i];
        const std::size_t stop = spec.zero_after ? std::min(*spec.zero_after, T) : T;
        if (spec.variance > 0.0)
            for (std::size_t k = 0; k < stop; ++k) inputs[i][k] = rng.normal(spec.variance);
    }
    std::vector<double> noise(T, 0.0);
    if (config.noise.variance > 0.0) {
        RngStream rng(seed, stream_id::system_noise);
        for (auto& w : noise) w = rng.normal(config.noise.variance);
    }

    const Trajectory traj = simulate(model, inputs, noise, T);
    const PerturbedTrajectory pert = perturb(traj, privacy.scales, seed);

    RunRecord rec;
    rec.summary.seed = seed;
    rec.summary.scales = privacy.scales;
    rec.summary.constants = privacy.constants;
    rec.summary.theta_norm = model.theta().norm();

    RlsState state = rls_init(n, config.alpha);
    NoiseEnergy energy(model.theta());
    std::vector<double> phi(n), phi_bar(n);
    try {
        for (std::size_t k = 0; k < T; ++k) {
            fill_regressor(model, traj.y, traj.u, static_cast<long>(k), phi);
            fill_regressor(model, pert.y_bar, pert.u_bar, static_cast<long>(k), phi_bar);
            const StepInfo info = rls_step(state, phi_bar, pert.y_bar[k]);
            energy.add(phi, phi_bar);
            const std::size_t done = k + 1;
            if (done % config.trace_stride == 0 || done == T) {
                const ExcitationReport ex = excitation(state, config.kappa);
                TraceRow row;
                row.k = done;
                row.err = (model.theta() - state.theta).norm();
                row.lambda_min_info = ex.lambda_min_info;
                row.r_k = state.r;
                row.s_k = energy.value();
                row.gamma1_hat = ex.gamma1_hat;
                row.a_bar = info.a_bar;
                row.ratio = ex.ratio;
                if (!std::isfinite(row.err)) throw BreakdownError("estimate diverged at k = " + std::to_string(done));
                rec.rows.push_back(row);
            }
        }
    } catch (const NumericError& e) {
        rec.summary.failed = true;
        rec.summary.failure = e.what();
    }

    if (!rec.rows.empty()) {
        const TraceRow& last = rec.rows.back();
        rec.summary.final_k = last.k;
        rec.summary.final_error = last.err;
        rec.summary.gamma1_hat = last.gamma1_hat;
        rec.summary.s_k = last.s_k;
        if (last.gamma1_hat > 0.0)
            rec.summary.bound_thm4 =
                bound_thm4(rec.summary.theta_norm, model.p(), model.q_list(), privacy.scales, last.gamma1_hat).value;
    }
    rec.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

std::vector<RunRecord> run(const ExperimentConfig& config) {
    config.validate();
    const ResolvedPrivacy privacy = resolve_privacy(config);
    std::vector<RunRecord> records(config.seeds.size());
    parallel_for(records.size(), [&](std::size_t s) { records[s] = run_seed(config, privacy, config.seeds[s]); });
    return records;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const RunRecord& record) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << "k,err,lambda_min_info,r_k,s_k,gamma1_hat,a_bar,ratio\n";
    for (const auto& r : record.rows)
        out << r.k << ',' << fmt(r.err) << ',' << fmt(r.lambda_min_info) << ',' << fmt(r.r_k) << ',' << fmt(r.s_k)
            << ',' << fmt(r.gamma1_hat) << ',' << fmt(r.a_bar) << ',' << fmt(r.ratio) << '\n';
}

json summary_json(const ExperimentConfig& config, const std::vector<RunRecord>& records) {
    json runs = json::array();
    for (const auto& rec : records) {
        const auto& s = rec.summary;
        json j{{"seed", s.seed},
               {"final_k", s.final_k},
               {"final_error", s.final_error},
               {"gamma1_hat", s.gamma1_hat},
               {"s_k", s.s_k},
               {"theta_norm", s.theta_norm},
               {"bound_thm4", s.bound_thm4},
               {"scales", s.scales},
               {"wall_seconds", s.wall_seconds},
               {"failed", s.failed}};
        if (s.constants) j["constants"] = {{"c1", s.constants->c1}, {"ci2", s.constants->ci2}};
        if (s.failed) j["failure"] = s.failure;
        runs.push_back(j);
    }
    double mean = 0.0;
    for (const auto& rec : records) mean += rec.summary.final_error;
    if (!records.empty()) mean /= static_cast<double>(records.size());
    return json{{"trace_schema_version", kTraceSchemaVersion},
                {"trace_columns", {"k", "err", "lambda_min_info", "r_k", "s_k", "gamma1_hat", "a_bar", "ratio"}},
                {"config", config_to_json(config)},
                {"mean_final_error", mean},
                {"runs", runs}};
}

void persist(const std::filesystem::path& dir, const ExperimentConfig& config, const std::vector<RunRecord>& records) {
    std::filesystem::create_directories(dir);
    for (const auto& rec : records)
        write_trace_csv(dir / ("trace_seed" + std::to_string(rec.summary.seed) + ".csv"), rec);
    std::ofstream out(dir / "summary.json");
    out << summary_json(config, records).dump(2) << '\n';
}

// ---- sweeps ----------------------------------------------------------------

std::string_view sweep_axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::epsilon: return "epsilon";
        case SweepAxis::delta_adj: return "delta";
        case SweepAxis::sigma2: return "sigma2";
    }
    return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view s) {
    for (auto a : {SweepAxis::epsilon, SweepAxis::delta_adj, SweepAxis::sigma2})
        if (s == sweep_axis_name(a)) return a;
    throw ArgumentError("unknown sweep axis '" + std::string(s) + "' (expected epsilon, delta or sigma2)");
}

ExperimentConfig with_axis_value(ExperimentConfig config, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::epsilon: config.privacy.epsilon = value; break;
        case SweepAxis::delta_adj: config.privacy.delta_adj = value; break;
        case SweepAxis::sigma2:
            for (auto& in : config.inputs) in.variance = value;
            break;
    }
    return config;
}

SweepResult sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<double>& values) {
    if (values.empty()) throw ArgumentError("sweep: no values");
    SweepResult res;
    res.axis = axis;
    res.values = values;
    res.expect_non_increasing = axis != SweepAxis::delta_adj;

    std::vector<ExperimentConfig> configs;
    std::vector<ResolvedPrivacy> privacies;
    for (double v : values) {
        configs.push_back(with_axis_value(config, axis, v));
        configs.back().validate();
        privacies.push_back(resolve_privacy(configs.back()));
    }
    const std::size_t seeds = config.seeds.size();
    res.runs.assign(values.size(), std::vector<RunRecord>(seeds));
    parallel_for(values.size() * seeds, [&](std::size_t job) {
        const std::size_t v = job / seeds, s = job % seeds;
        res.runs[v][s] = run_seed(configs[v], privacies[v], config.seeds[s]);
    });

    for (const auto& row : res.runs.front().front().rows) res.ks.push_back(row.k);
    for (const auto& per_value : res.runs) {
        std::vector<double> mean(res.ks.size(), 0.0);
        std::vector<int> count(res.ks.size(), 0);
        for (const auto& rec : per_value)
            for (std::size_t r = 0; r < std::min(rec.rows.size(), mean.size()); ++r) {
                mean[r] += rec.rows[r].err;
                ++count[r];
            }
        for (std::size_t r = 0; r < mean.size(); ++r) mean[r] = count[r] ? mean[r] / count[r] : NAN;
        res.final_mean_error.push_back(mean.empty() ? NAN : mean.back());
        res.mean_error.push_back(std::move(mean));
    }
    for (std::size_t v = 1; v < values.size(); ++v) {
        const double prev = res.final_mean_error[v - 1], cur = res.final_mean_error[v];
        const bool ok = res.expect_non_increasing ? cur <= prev : cur >= prev;
        if (!ok) ++res.inversions;
    }
    return res;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& res) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << sweep_axis_name(res.axis) << ",seed,k,err\n";
    for (std::size_t v = 0; v < res.values.size(); ++v) {
        for (const auto& rec : res.runs[v])
            for (const auto& row : rec.rows)
                out << fmt(res.values[v]) << ',' << rec.summary.seed << ',' << row.k << ',' << fmt(row.err) << '\n';
        for (std::size_t r = 0; r < res.ks.size(); ++r)
            out << fmt(res.values[v]) << ",mean," << res.ks[r] << ',' << fmt(res.mean_error[v][r]) << '\n';
    }
}

json sweep_summary_json(const SweepResult& res) {
    return json{{"trace_schema_version", kTraceSchemaVersion},
                {"axis", sweep_axis_name(res.axis)},
                {"values", res.values},
                {"final_k", res.ks.empty() ? 0 : res.ks.back()},
                {"final_mean_error", res.final_mean_error},
                {"expected_order", res.expect_non_increasing ? "non-increasing" : "non-decreasing"},
                {"inversions", res.inversions},
                {"monotone", res.inversions == 0}};
}

// ---- worked examples ---------------------------------------------------------

double ComparisonRow::rel_dev() const {
    if (!reference) return NAN;
    if (*reference == 0.0) return std::fabs(computed);
    return std::fabs(computed - *reference) / std::fabs(*reference);
}

const ComparisonRow* ComparisonTable::find(std::string_view quantity) const {
    for (const auto& r : rows)
        if (r.quantity == quantity) return &r;
    return nullptr;
}

namespace {

void add_constant_rows(ComparisonTable& table, const ArxModel& model, const StabilityCertificate& cert,
                       const std::vector<std::optional<double>>& refs) {
    const auto consts = constants(cert, model.p(), CoefficientBounds::exact(model));
    table.rows.push_back({"C1", consts.c1, refs.empty() ? std::nullopt : refs[0]});
    for (std::size_t i = 0; i < consts.ci2.size(); ++i)
        table.rows.push_back({"C" + std::to_string(i + 1) + "2", consts.ci2[i],
                              i + 1 < refs.size() ? refs[i + 1] : std::nullopt});
}

}  // namespace

ComparisonTable reproduce_example1() {
    const ArxModel model = ArxModel::example1();
    const auto cert = certify(model);
    ComparisonTable t;
    add_constant_rows(t, model, cert, {7.864, 23.594, 55.053, 86.512});
    // Roots in ascending modulus: -4/3 then 2.
    const auto& roots = cert.roots;
    t.rows.push_back({"root1", roots.at(0).real(), -4.0 / 3.0});
    t.rows.push_back({"root2", roots.at(1).real(), 2.0});
    t.rows.push_back({"root_max_imag", std::max(std::fabs(roots[0].imag()), std::fabs(roots[1].imag())), 0.0});
    t.rows.push_back({"spectral_radius", cert.spectral_radius, 0.75});
    t.rows.push_back({"c0", cert.decay->c0, 1.618});
    t.rows.push_back({"lambda", cert.decay->lambda, 0.75});
    t.rows.push_back({"strategy_eigenvector_condition",
                      cert.decay->strategy == DecayStrategy::eigenvector_condition ? 1.0 : 0.0, 1.0});
    const auto consts = constants(cert, model.p(), CoefficientBounds::exact(model));
    const auto spec = calibrate_all(consts, 0.5, 1.0);
    t.rows.push_back({"b0(eps=0.5,delta=1)", spec.b[0], std::nullopt});
    for (std::size_t i = 1; i < spec.b.size(); ++i)
        t.rows.push_back({"b" + std::to_string(i) + "(eps=0.5,delta=1)", spec.b[i], std::nullopt});
    return t;
}

Example2Report reproduce_example2(std::size_t horizon, std::vector<std::uint64_t> seeds) {
    Example2Report rep;
    ExperimentConfig config;
    config.model = ArxModel::example2();
    config.inputs.assign(config.model.m(), InputSpec{10.0, std::nullopt});
    config.noise.variance = 1.0;
    config.privacy.mode = PrivacyMode::calibrate;
    config.privacy.delta_adj = 1.0;
    config.horizon = horizon;
    config.seeds = std::move(seeds);
    config.trace_stride = std::max<std::size_t>(1, horizon / 100);
    const auto cert = certify(config.model);
    add_constant_rows(rep.constants, config.model, cert, {});
    rep.constants.rows.push_back({"c0", cert.decay->c0, std::nullopt});
    rep.constants.rows.push_back({"lambda", cert.decay->lambda, std::nullopt});
    rep.epsilon_sweep = sweep(config, SweepAxis::epsilon, {0.5, 1.0, 2.0, 4.0, 8.0});
    return rep;
}

// ---- worker pool -------------------------------------------------------------

unsigned worker_count() {
    if (const char* env = std::getenv("DPRLS_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace dprls
