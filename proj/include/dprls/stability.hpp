#pragma once

// Asymptotic-stability certificate for the autoregressive part of an
// ArxModel, plus a decay pair (c0, lambda) with ||A^k|| <= c0 lambda^k.

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dprls/arx_model.hpp"

namespace dprls {

// Companion layout: ones on the superdiagonal, last row [a_p, ..., a_1].
struct CompanionMatrix {
    Eigen::MatrixXd entries;
};

enum class DecayStrategy {
    no_autoregression,      // p == 0: c0 = 0
    eigenvector_condition,  // c0 = ||S|| ||S^-1||, lambda = rho(A)
    empirical_envelope,     // lambda = rho + 0.01 (1 - rho), c0 = sup_k ||A^k|| / lambda^k
};

std::string_view strategy_name(DecayStrategy s);

struct DecayPair {
    double c0 = 0.0;
    double lambda = 0.5;
    DecayStrategy strategy = DecayStrategy::no_autoregression;
    // max_{k <= verified_horizon} ||A^k|| / lambda^k, i.e. the tightest c0
    // for this lambda over the checked range.
    double envelope_c0 = 0.0;
    int verified_horizon = 0;
};

struct StabilityCertificate {
    std::vector<std::complex<double>> roots;  // zeros of 1 - a_1 z - ... - a_p z^p
    double max_root_residual = 0.0;           // max |lambda(root)| after polishing
    double spectral_radius = 0.0;
    bool stable = false;
    std::optional<DecayPair> decay;  // set iff stable
};

// Throws ArgumentError when p == 0.
CompanionMatrix companion_matrix(const ArxModel& model);
CompanionMatrix companion_matrix(std::span<const double> a);

// Operator 2-norms ||A^k||, k = 0..k_max.
std::vector<double> matrix_power_norms(const CompanionMatrix& a, int k_max);

// Zeros of 1 - a_1 z - ... - a_p z^p via eigenvalues of the companion matrix
// of that polynomial, Newton-polished. Trailing zero coefficients lower the
// degree.
std::vector<std::complex<double>> characteristic_roots(std::span<const double> a, double* max_residual = nullptr);

StabilityCertificate certify(const ArxModel& model, int k_max = 200);
StabilityCertificate certify(std::span<const double> a, int k_max = 200);

// |root| within this distance of 1 counts as on the unit circle (unstable).
inline constexpr double kUnitCircleTolerance = 1e-9;

}  // namespace dprls
