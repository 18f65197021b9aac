#pragma once

// Laplace-mechanism calibration for the perturbed RLS data flow.
//
// C1 = 1 + sqrt(p) c0 lambda / (1 - lambda) bounds the L1 amplification of an
// output-record change through the closed loop; C_{i,2} = C1 * sum_j |b_{i,j}|
// does the same for participant i's inputs. Output privacy needs
// C1 delta / b0 <= eps; input privacy needs (C_{i,2}/b0 + 1/b_i) delta <= eps.

#include <cstdint>
#include <span>
#include <vector>

#include "dprls/arx_model.hpp"
#include "dprls/rng.hpp"
#include "dprls/stability.hpp"

namespace dprls {

// User-declared upper bounds on sum_j |b_{i,j}|. The true coefficients are
// what the estimator is trying to learn, so calibration cannot use them.
struct CoefficientBounds {
    std::vector<double> sum_abs_b;

    static CoefficientBounds exact(const ArxModel& model) { return {model.input_gain_l1()}; }
};

struct PrivacyConstants {
    double c1 = 1.0;
    std::vector<double> ci2;
};

struct PrivacySpec {
    double epsilon = 0.0;
    double delta_adj = 0.0;  // L1 adjacency radius
    std::vector<double> b;   // [b0, b1, ..., bm]

    std::size_t participants() const { return b.empty() ? 0 : b.size() - 1; }
};

struct PrivacySlacks {
    double output = 0.0;         // eps - C1 delta / b0
    std::vector<double> inputs;  // eps - (C_{i,2}/b0 + 1/b_i) delta
    bool satisfied(double tol = 0.0) const;
};

// Throws CalibrationImpossible if cert is not stable, ArgumentError on a
// negative bound.
PrivacyConstants constants(const StabilityCertificate& cert, std::size_t p, const CoefficientBounds& bounds);

double calibrate_b0(const PrivacyConstants& consts, double epsilon, double delta_adj);

// b0 = max(C1 d/e, max_i C_{i,2} d / ((1-rho) e)), b_i = d / (rho e).
PrivacySpec calibrate_all(const PrivacyConstants& consts, double epsilon, double delta_adj, double rho = 0.5);

PrivacySlacks slacks(const PrivacyConstants& consts, const PrivacySpec& spec);

// Inverse-CDF Laplace draw from u in (-1/2, 1/2): -b sign(u) ln(1 - 2|u|).
double laplace_from_uniform(double u, double b);
double laplace_sample(double b, RngStream& rng);
double laplace_cdf(double x, double b);

struct PerturbedTrajectory {
    std::vector<double> y_bar;               // y_bar[k-1] = y_k + eta_k
    std::vector<std::vector<double>> u_bar;  // u_bar[i][k] = u_{i,k} + xi_{i,k}
    std::vector<double> eta;
    std::vector<std::vector<double>> xi;
};

// Draws eta ~ L(0, b0) and xi_i ~ L(0, b_i) from independent streams derived
// from seed. A zero scale means that signal is released unperturbed.
PerturbedTrajectory perturb(const Trajectory& traj, std::span<const double> scales, std::uint64_t seed);
PerturbedTrajectory perturb(const Trajectory& traj, const PrivacySpec& spec, std::uint64_t seed);

// Exact log-likelihood-ratio bound sum_k |y_k - y'_k| / b0.
double privacy_loss_output(std::span<const double> y, std::span<const double> y_other, double b0);

// sum_k |y_k - y'_k| / b0 + sum_k |u_k - u'_k| / b_i.
double privacy_loss_input(std::span<const double> y, std::span<const double> y_other,
                          std::span<const double> u, std::span<const double> u_other, double b0, double bi);

}  // namespace dprls
