#include "dprls/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dprls/error.hpp"
#include "dprls/kernels.hpp"

namespace dprls {

bool PrivacySlacks::satisfied(double tol) const {
    return output >= -tol && std::all_of(inputs.begin(), inputs.end(), [tol](double s) { return s >= -tol; });
}

PrivacyConstants constants(const StabilityCertificate& cert, std::size_t p, const CoefficientBounds& bounds) {
    if (!cert.stable || !cert.decay)
        throw CalibrationImpossible(
            "system is not asymptotically stable: a characteristic root lies in the closed unit disk, so "
            "adjacent records can be distinguished with unbounded likelihood ratio and no finite Laplace "
            "scale gives epsilon-differential privacy");
    PrivacyConstants out;
    const auto& d = *cert.decay;
    out.c1 = p == 0 ? 1.0 : 1.0 + std::sqrt(static_cast<double>(p)) * d.c0 * d.lambda / (1.0 - d.lambda);
    out.ci2.reserve(bounds.sum_abs_b.size());
    for (double s : bounds.sum_abs_b) {
        if (!(s >= 0.0)) throw ArgumentError("constants: coefficient bounds must be non-negative");
        out.ci2.push_back(out.c1 * s);
    }
    return out;
}

namespace {

void check_eps_delta(double epsilon, double delta_adj) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ArgumentError("epsilon must be positive");
    if (!(delta_adj > 0.0) || !std::isfinite(delta_adj)) throw ArgumentError("delta must be positive");
}

}  // namespace

double calibrate_b0(const PrivacyConstants& consts, double epsilon, double delta_adj) {
    check_eps_delta(epsilon, delta_adj);
    return consts.c1 * delta_adj / epsilon;
}

PrivacySlacks slacks(const PrivacyConstants& consts, const PrivacySpec& spec) {
    if (spec.b.size() != consts.ci2.size() + 1)
        throw ArgumentError("slacks: scale count does not match participant count");
    PrivacySlacks s;
    s.output = spec.epsilon - consts.c1 * spec.delta_adj / spec.b[0];
    for (std::size_t i = 0; i < consts.ci2.size(); ++i)
        s.inputs.push_back(spec.epsilon - (consts.ci2[i] / spec.b[0] + 1.0 / spec.b[i + 1]) * spec.delta_adj);
    return s;
}

PrivacySpec calibrate_all(const PrivacyConstants& consts, double epsilon, double delta_adj, double rho) {
    check_eps_delta(epsilon, delta_adj);
    if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("calibrate_all: rho must lie in (0, 1)");
    PrivacySpec spec{epsilon, delta_adj, {}};
    double b0 = consts.c1 * delta_adj / epsilon;
    for (double c : consts.ci2) b0 = std::max(b0, c * delta_adj / ((1.0 - rho) * epsilon));
    spec.b.push_back(b0);
    for (std::size_t i = 0; i < consts.ci2.size(); ++i) spec.b.push_back(delta_adj / (rho * epsilon));

    // Rounding can leave a slack of a few ulps below zero.
    const PrivacySlacks s = slacks(consts, spec);
    if (!s.satisfied(1e-12 * epsilon))
        throw NumericError("calibrate_all: calibrated scales violate the privacy constraints");
    return spec;
}

double laplace_from_uniform(double u, double b) {
    if (!(b > 0.0)) throw ArgumentError("laplace: scale must be positive");
    if (u == 0.0) return 0.0;
    const double mag = -b * std::log1p(-2.0 * std::fabs(u));
    return u > 0.0 ? mag : -mag;
}

double laplace_sample(double b, RngStream& rng) { return laplace_from_uniform(rng.uniform_centered(), b); }

double laplace_cdf(double x, double b) {
    return x < 0.0 ? 0.5 * std::exp(x / b) : 1.0 - 0.5 * std::exp(-x / b);
}

PerturbedTrajectory perturb(const Trajectory& traj, std::span<const double> scales, std::uint64_t seed) {
    const std::size_t m = traj.u.size();
    if (scales.size() != m + 1)
        throw ArgumentError("perturb: expected " + std::to_string(m + 1) + " scales");
    for (double b : scales)
        if (!(b >= 0.0) || !std::isfinite(b)) throw ArgumentError("perturb: scales must be finite and >= 0");

    PerturbedTrajectory out;
    const std::size_t horizon = traj.horizon();
    out.eta.assign(horizon, 0.0);
    if (scales[0] > 0.0) {
        RngStream rng(seed, stream_id::output_perturbation);
        for (auto& e : out.eta) e = laplace_sample(scales[0], rng);
    }
    out.y_bar.resize(horizon);
    for (std::size_t k = 0; k < horizon; ++k) out.y_bar[k] = traj.y[k] + out.eta[k];

    out.xi.resize(m);
    out.u_bar.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t len = traj.u[i].size();
        out.xi[i].assign(len, 0.0);
        if (scales[i + 1] > 0.0) {
            RngStream rng(seed, stream_id::input_perturbation + i);
            for (auto& x : out.xi[i]) x = laplace_sample(scales[i + 1], rng);
        }
        out.u_bar[i].resize(len);
        for (std::size_t k = 0; k < len; ++k) out.u_bar[i][k] = traj.u[i][k] + out.xi[i][k];
    }
    return out;
}

PerturbedTrajectory perturb(const Trajectory& traj, const PrivacySpec& spec, std::uint64_t seed) {
    for (double b : spec.b)
        if (!(b > 0.0)) throw ArgumentError("perturb: privacy spec scales must be positive");
    return perturb(traj, std::span<const double>(spec.b), seed);
}

double privacy_loss_output(std::span<const double> y, std::span<const double> y_other, double b0) {
    if (y.size() != y_other.size()) throw ArgumentError("privacy_loss_output: length mismatch");
    if (!(b0 > 0.0)) throw ArgumentError("privacy_loss_output: b0 must be positive");
    return kernels::l1_distance(y, y_other) / b0;
}

double privacy_loss_input(std::span<const double> y, std::span<const double> y_other,
                          std::span<const double> u, std::span<const double> u_other, double b0, double bi) {
    if (u.size() != u_other.size()) throw ArgumentError("privacy_loss_input: input length mismatch");
    if (!(bi > 0.0)) throw ArgumentError("privacy_loss_input: b_i must be positive");
    return privacy_loss_output(y, y_other, b0) + kernels::l1_distance(u, u_other) / bi;
}

}  // namespace dprls
