#include "dprls/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dprls/error.hpp"

namespace dprls {

std::string_view strategy_name(DecayStrategy s) {
    switch (s) {
        case DecayStrategy::no_autoregression: return "no-autoregression";
        case DecayStrategy::eigenvector_condition: return "eigenvector-condition";
        case DecayStrategy::empirical_envelope: return "empirical-envelope";
    }
    return "unknown";
}

CompanionMatrix companion_matrix(std::span<const double> a) {
    const auto p = static_cast<Eigen::Index>(a.size());
    if (p == 0) throw ArgumentError("companion_matrix: p == 0 has no companion matrix");
    CompanionMatrix c{Eigen::MatrixXd::Zero(p, p)};
    for (Eigen::Index r = 0; r + 1 < p; ++r) c.entries(r, r + 1) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) c.entries(p - 1, j) = a[static_cast<std::size_t>(p - 1 - j)];
    return c;
}

CompanionMatrix companion_matrix(const ArxModel& model) { return companion_matrix(model.a()); }

namespace {

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

std::vector<double> matrix_power_norms(const CompanionMatrix& a, int k_max) {
    if (k_max < 0) throw ArgumentError("matrix_power_norms: k_max < 0");
    const auto p = a.entries.rows();
    std::vector<double> norms;
    norms.reserve(static_cast<std::size_t>(k_max) + 1);
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
    for (int k = 0; k <= k_max; ++k) {
        norms.push_back(spectral_norm(power));
        power = a.entries * power;
    }
    return norms;
}

std::vector<std::complex<double>> characteristic_roots(std::span<const double> a, double* max_residual) {
    std::size_t degree = a.size();
    while (degree > 0 && a[degree - 1] == 0.0) --degree;
    if (max_residual) *max_residual = 0.0;
    if (degree == 0) return {};

    // lambda(z) = 1 - sum a_j z^j. Monic form: z^d + sum_{j<d} c_j z^j with
    // c_j = coef_j / coef_d, coef_0 = 1, coef_j = -a_j.
    const double lead = -a[degree - 1];
    const auto d = static_cast<Eigen::Index>(degree);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index r = 1; r < d; ++r) comp(r, r - 1) = 1.0;
    comp(0, d - 1) = -1.0 / lead;
    for (Eigen::Index j = 1; j < d; ++j) comp(j, d - 1) = a[static_cast<std::size_t>(j - 1)] / lead;

    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericError("characteristic_roots: eigenvalue solver failed");

    auto eval = [&](std::complex<double> z, std::complex<double>& deriv) {
        std::complex<double> val = -a[degree - 1];
        deriv = 0.0;
        for (std::size_t j = degree - 1; j-- > 0;) {
            deriv = deriv * z + val;
            val = val * z - a[j];
        }
        deriv = deriv * z + val;
        return val * z + 1.0;
    };

    std::vector<std::complex<double>> roots;
    roots.reserve(degree);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        std::complex<double> z = es.eigenvalues()(i);
        std::complex<double> dz;
        std::complex<double> fz = eval(z, dz);
        for (int it = 0; it < 8 && std::abs(fz) > 0.0; ++it) {
            if (std::abs(dz) == 0.0) break;
            const std::complex<double> next = z - fz / dz;
            std::complex<double> dn;
            const std::complex<double> fn = eval(next, dn);
            if (!(std::abs(fn) < std::abs(fz))) break;
            z = next;
            fz = fn;
            dz = dn;
        }
        worst = std::max(worst, std::abs(fz));
        roots.push_back(z);
    }
    std::sort(roots.begin(), roots.end(), [](auto x, auto y) {
        if (std::abs(x) != std::abs(y)) return std::abs(x) < std::abs(y);
        return x.imag() < y.imag();
    });
    if (max_residual) *max_residual = worst;
    return roots;
}

namespace {

// sup_k ||(A / lambda)^k||, continued past k_max until a power contracts
// (||A^K|| <= lambda^K), after which later ratios cannot exceed the
// running maximum. Returns (sup, horizon reached).
std::pair<double, int> envelope(const Eigen::MatrixXd& a, double lambda, int k_max, bool until_contract) {
    const auto p = a.rows();
    const Eigen::MatrixXd scaled = a / lambda;
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
    double best = 1.0;
    constexpr int kHardLimit = 2'000'000;
    int k = 1;
    for (; k <= kHardLimit; ++k) {
        power = scaled * power;
        const double r = spectral_norm(power);
        if (!std::isfinite(r)) throw NumericError("certify: non-finite matrix power");
        best = std::max(best, r);
        if (k >= k_max && (!until_contract || r <= 1.0)) break;
    }
    if (k > kHardLimit) throw NumericError("certify: matrix powers did not contract");
    return {best, k};
}

}  // namespace

StabilityCertificate certify(std::span<const double> a, int k_max) {
    StabilityCertificate cert;
    if (a.empty()) {
        cert.stable = true;
        cert.decay = DecayPair{0.0, 0.5, DecayStrategy::no_autoregression, 0.0, k_max};
        return cert;
    }
    cert.roots = characteristic_roots(a, &cert.max_root_residual);

    const CompanionMatrix comp = companion_matrix(a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp.entries, true);
    if (es.info() != Eigen::Success) throw NumericError("certify: eigen decomposition failed");
    cert.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();

    const bool roots_outside = std::all_of(cert.roots.begin(), cert.roots.end(), [](auto z) {
        return std::abs(z) > 1.0 + kUnitCircleTolerance;
    });
    cert.stable = roots_outside && cert.spectral_radius < 1.0 - kUnitCircleTolerance;
    if (!cert.stable) return cert;

    const double rho = cert.spectral_radius;
    constexpr double kMaxCondition = 1e8;
    constexpr double kTinyRadius = 1e-8;

    if (rho > kTinyRadius) {
        const Eigen::MatrixXcd s = es.eigenvectors();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
        const auto sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        if (std::isfinite(cond) && cond < kMaxCondition) {
            const auto [env, horizon] = envelope(comp.entries, rho, k_max, false);
            // Reject a bound looser than twice the observed envelope, and any
            // numerical violation of ||A^k|| <= cond rho^k.
            if (cond < 2.0 * env && env <= cond * (1.0 + 1e-9)) {
                cert.decay = DecayPair{cond, rho, DecayStrategy::eigenvector_condition, env, horizon};
                return cert;
            }
        }
    }

    const double lambda = rho + 0.01 * (1.0 - rho);
    const auto [env, horizon] = envelope(comp.entries, lambda, k_max, true);
    cert.decay = DecayPair{env, lambda, DecayStrategy::empirical_envelope, env, horizon};
    return cert;
}

StabilityCertificate certify(const ArxModel& model, int k_max) { return certify(model.a(), k_max); }

}  // namespace dprls
