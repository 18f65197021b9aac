// dprls: command-line front end for the private RLS library.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dprls/adversary.hpp"
#include "dprls/error.hpp"
#include "dprls/experiment.hpp"
#include "dprls/noise_optimizer.hpp"
#include "dprls/privacy.hpp"
#include "dprls/stability.hpp"

using nlohmann::json;
using namespace dprls;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

json certificate_json(const StabilityCertificate& cert) {
    json roots = json::array();
    for (const auto& z : cert.roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
    json j{{"stable", cert.stable},
           {"spectral_radius", cert.spectral_radius},
           {"roots", roots},
           {"max_root_residual", cert.max_root_residual}};
    if (cert.decay)
        j["decay"] = {{"c0", cert.decay->c0},
                      {"lambda", cert.decay->lambda},
                      {"strategy", strategy_name(cert.decay->strategy)},
                      {"envelope_c0", cert.decay->envelope_c0},
                      {"verified_horizon", cert.decay->verified_horizon}};
    return j;
}

ExperimentConfig config_or_default(const std::string& path) {
    if (!path.empty()) return load_config(path);
    ExperimentConfig c;
    c.inputs.assign(c.model.m(), InputSpec{});
    return c;
}

void print_table(const ComparisonTable& table) {
    std::printf("%-26s %16s %12s %12s\n", "quantity", "computed", "reference", "rel_dev");
    for (const auto& r : table.rows) {
        if (r.reference)
            std::printf("%-26s %16.10g %12.6g %12.3e\n", r.quantity.c_str(), r.computed, *r.reference, r.rel_dev());
        else
            std::printf("%-26s %16.10g %12s %12s\n", r.quantity.c_str(), r.computed, "-", "-");
    }
}

void print_sweep(const SweepResult& s) {
    std::printf("%-10s %s\n", std::string(sweep_axis_name(s.axis)).c_str(), "seed-mean final error");
    for (std::size_t v = 0; v < s.values.size(); ++v)
        std::printf("%-10g %.6g\n", s.values[v], s.final_mean_error[v]);
    std::printf("expected %s, inversions %zu\n", s.expect_non_increasing ? "non-increasing" : "non-decreasing",
                s.inversions);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentially private recursive least squares for MP-ARX systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* stability = app.add_subcommand("stability", "Characteristic roots and decay certificate");
    std::vector<double> ar;
    stability->add_option("--config", config_path, "Experiment config (JSON)");
    stability->add_option("--a", ar, "Autoregressive coefficients a_1..a_p (overrides config)");

    auto* calibrate = app.add_subcommand("calibrate", "Privacy constants and Laplace scales");
    calibrate->add_option("--config", config_path, "Experiment config (JSON)");

    auto* simulate_cmd = app.add_subcommand("simulate", "Run the estimator for every seed in the config");
    simulate_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    simulate_cmd->add_option("--out", out_dir, "Output directory (overrides config)");

    auto* sweep_cmd = app.add_subcommand("sweep", "Sweep epsilon, delta or sigma2");
    std::string axis;
    std::vector<double> values;
    sweep_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sweep_cmd->add_option("--axis", axis, "epsilon | delta | sigma2")->required();
    sweep_cmd->add_option("--values", values, "Axis values")->required()->delimiter(',');
    sweep_cmd->add_option("--out", out_dir, "Output directory");

    auto* optimize_cmd = app.add_subcommand("optimize", "Minimise the error-bound objective over noise scales");
    double gamma3 = NAN;
    optimize_cmd->add_option("--config", config_path, "Experiment config (JSON)");
    optimize_cmd->add_option("--gamma3", gamma3, "Excitation level gamma3 (overrides config)");

    auto* attack = app.add_subcommand("attack-demo", "Adjacent pair and likelihood ratio for an unstable model");
    std::vector<double> attack_a{2.0};
    std::vector<double> attack_b{1.0};
    double attack_eps = 8.0, attack_delta = 1.0, attack_b0 = 10.0;
    std::size_t attack_t1 = 0, attack_t2_max = 1000;
    std::string attack_kind = "output";
    attack->add_option("--a", attack_a, "Autoregressive coefficients")->capture_default_str();
    attack->add_option("--b", attack_b, "Input taps of the attacked participant")->capture_default_str();
    attack->add_option("--epsilon", attack_eps, "Target privacy level")->capture_default_str();
    attack->add_option("--delta", attack_delta, "Adjacency radius")->capture_default_str();
    attack->add_option("--b0", attack_b0, "Output Laplace scale")->capture_default_str();
    attack->add_option("--t1", attack_t1, "Sensitive prefix length (default p)");
    attack->add_option("--t2-max", attack_t2_max, "Largest horizon searched")->capture_default_str();
    attack->add_option("--kind", attack_kind, "output | input")->capture_default_str();

    auto* ex1 = app.add_subcommand("reproduce-example1", "Constants of the first numerical example");
    auto* ex2 = app.add_subcommand("reproduce-example2", "Epsilon sweep on the bank-investment example");
    std::size_t ex2_horizon = 100000, ex2_seeds = 10;
    ex2->add_option("--horizon", ex2_horizon, "Steps per run")->capture_default_str();
    ex2->add_option("--seeds", ex2_seeds, "Number of seeds")->capture_default_str();
    ex2->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*stability) {
            std::vector<double> a = ar;
            if (a.empty()) a = config_or_default(config_path).model.a();
            std::cout << certificate_json(certify(a)).dump(2) << '\n';
        } else if (*calibrate) {
            const auto config = config_or_default(config_path);
            const auto cert = certify(config.model);
            const auto& pv = config.privacy;
            const CoefficientBounds bounds =
                pv.coefficient_bounds ? CoefficientBounds{*pv.coefficient_bounds} : CoefficientBounds::exact(config.model);
            const auto consts = constants(cert, config.model.p(), bounds);
            const auto spec = calibrate_all(consts, pv.epsilon, pv.delta_adj, pv.rho);
            const auto sl = slacks(consts, spec);
            json j{{"certificate", certificate_json(cert)},
                   {"c1", consts.c1},
                   {"ci2", consts.ci2},
                   {"epsilon", pv.epsilon},
                   {"delta", pv.delta_adj},
                   {"rho", pv.rho},
                   {"b0_output_only", calibrate_b0(consts, pv.epsilon, pv.delta_adj)},
                   {"scales", spec.b},
                   {"slack_output", sl.output},
                   {"slack_inputs", sl.inputs}};
            std::cout << j.dump(2) << '\n';
        } else if (*simulate_cmd) {
            auto config = load_config(config_path);
            if (!out_dir.empty()) config.output = out_dir;
            const auto records = run(config);
            if (!config.output.empty()) persist(config.output, config, records);
            const auto summary = summary_json(config, records);
            std::cout << summary.dump(2) << '\n';
            for (const auto& r : records)
                if (r.summary.failed) return kExitNumeric;
        } else if (*sweep_cmd) {
            auto config = load_config(config_path);
            const auto result = sweep(config, parse_sweep_axis(axis), values);
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                write_sweep_csv(std::filesystem::path(out_dir) / "sweep.csv", result);
                std::ofstream(std::filesystem::path(out_dir) / "sweep_summary.json")
                    << sweep_summary_json(result).dump(2) << '\n';
            }
            print_sweep(result);
        } else if (*optimize_cmd) {
            const auto config = config_or_default(config_path);
            const auto cert = certify(config.model);
            const auto& pv = config.privacy;
            const CoefficientBounds bounds =
                pv.coefficient_bounds ? CoefficientBounds{*pv.coefficient_bounds} : CoefficientBounds::exact(config.model);
            NoiseDesignProblem problem;
            problem.p = config.model.p();
            problem.q = config.model.q_list();
            problem.gamma3 = std::isnan(gamma3) ? pv.gamma3 : gamma3;
            problem.epsilon = pv.epsilon;
            problem.delta_adj = pv.delta_adj;
            problem.consts = constants(cert, config.model.p(), bounds);
            const auto sol = optimize_noise(problem);
            json heuristics = json::array();
            for (double rho : {0.25, 0.5, 0.75}) {
                const auto spec = calibrate_all(problem.consts, pv.epsilon, pv.delta_adj, rho);
                heuristics.push_back({{"rho", rho}, {"scales", spec.b}, {"f", design_objective(problem, spec.b)}});
            }
            json j{{"b_star", sol.b_star},
                   {"f_star", sol.f_star},
                   {"slack_output", sol.certificate.output_slack},
                   {"slack_inputs", sol.certificate.input_slacks},
                   {"box_lower", sol.search_box.lower},
                   {"box_upper", sol.search_box.upper},
                   {"thm7_bound", 2.0 * config.model.theta().norm() * std::sqrt(sol.f_star)},
                   {"calibrate_all", heuristics}};
            std::cout << j.dump(2) << '\n';
        } else if (*attack) {
            const ArxModel model(attack_a, {attack_b});
            const std::size_t t1 = attack_t1 == 0 ? std::max<std::size_t>(model.p(), 1) : attack_t1;
            const std::size_t horizon = std::max(attack_t2_max, t1) + model.p();
            const auto seq = resonant_sequence(model, horizon);
            const std::vector<double> base(t1, 0.0);
            const AdjacentPair pair = attack_kind == "input"
                                          ? adjacent_input_pair(seq, model, 0, t1, attack_delta, base)
                                          : adjacent_output_pair(seq, base, t1, attack_delta);
            if (attack_kind != "input" && attack_kind != "output")
                throw ArgumentError("attack-demo: --kind must be output or input");
            const auto crossing = first_crossing(pair, attack_b0, attack_eps, attack_t2_max);
            const std::size_t t2 = crossing.found ? crossing.t2 : attack_t2_max;
            const auto ratio = distinguishing_ratio(pair, attack_b0, t2);
            json j{{"z0", {{"re", seq.z0.real()}, {"im", seq.z0.imag()}}},
                   {"r", seq.r},
                   {"beta", seq.beta},
                   {"gamma", seq.gamma},
                   {"kind", pair_kind_name(pair.kind)},
                   {"t1", t1},
                   {"base", pair.base},
                   {"shifted", pair.shifted},
                   {"direction", pair.direction},
                   {"v_l1", pair.v_l1},
                   {"selected_indices", std::vector<std::size_t>(pair.observed.begin(),
                                                                 std::find_if(pair.observed.begin(), pair.observed.end(),
                                                                              [&](std::size_t k) { return k > t2; }))},
                   {"exponent_trajectory", ratio.trajectory},
                   {"crossed", crossing.found},
                   {"t2", crossing.found ? json(crossing.t2) : json(nullptr)},
                   {"n_required", crossing.n_required},
                   {"log_ratio", ratio.log_ratio},
                   {"base_event_probability", ratio.base_probability},
                   {"shifted_event_probability", ratio.shifted_probability},
                   {"proof_count_bound", proof_count_bound(pair, seq.gamma, attack_b0, attack_eps)},
                   {"geometric_count_bound", seq.beta == 0.0 ? json(geometric_count_bound(pair, seq.r, attack_b0, attack_eps))
                                                             : json(nullptr)}};
            std::cout << j.dump(2) << '\n';
            if (!crossing.found) return kExitNumeric;
        } else if (*ex1) {
            print_table(reproduce_example1());
        } else if (*ex2) {
            std::vector<std::uint64_t> seeds;
            for (std::size_t s = 1; s <= ex2_seeds; ++s) seeds.push_back(s);
            const auto rep = reproduce_example2(ex2_horizon, seeds);
            print_table(rep.constants);
            print_sweep(rep.epsilon_sweep);
            if (!out_dir.empty()) {
                std::filesystem::create_directories(out_dir);
                write_sweep_csv(std::filesystem::path(out_dir) / "example2_epsilon.csv", rep.epsilon_sweep);
                std::ofstream(std::filesystem::path(out_dir) / "example2_summary.json")
                    << sweep_summary_json(rep.epsilon_sweep).dump(2) << '\n';
            }
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const CalibrationImpossible& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConstructionImpossible& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "numerical breakdown: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
