#include "dprls/rls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dprls/error.hpp"
#include "dprls/kernels.hpp"

namespace dprls {

RlsState rls_init(std::size_t n, double alpha, const Eigen::VectorXd& theta0) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("rls_init: alpha must be positive");
    if (static_cast<std::size_t>(theta0.size()) != n) throw ArgumentError("rls_init: theta0 has wrong length");
    const auto dim = static_cast<Eigen::Index>(n);
    RlsState s;
    s.theta = theta0;
    s.p_bar = Eigen::MatrixXd::Identity(dim, dim) / alpha;
    s.alpha = alpha;
    s.r = std::numbers::e;
    s.logdet_info = static_cast<double>(n) * std::log(alpha);
    return s;
}

RlsState rls_init(std::size_t n, double alpha) {
    return rls_init(n, alpha, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
}

StepInfo rls_step(RlsState& state, std::span<const double> phi_bar, double y_bar_next) {
    const std::size_t n = state.dim();
    if (phi_bar.size() != n) throw ArgumentError("rls_step: regressor has wrong length");
    if (!std::isfinite(y_bar_next)) throw NumericError("rls_step: non-finite observation");
    for (double v : phi_bar)
        if (!std::isfinite(v)) throw NumericError("rls_step: non-finite regressor");

    const auto& kt = kernels::active();
    Eigen::VectorXd pphi(static_cast<Eigen::Index>(n));
    kt.matvec(state.p_bar.data(), phi_bar.data(), pphi.data(), n);
    const double quad = kt.dot(phi_bar.data(), pphi.data(), n);
    if (quad < -1e-12 || !std::isfinite(quad))
        throw BreakdownError("rls_step: covariance lost positive definiteness (phi' P phi = " +
                             std::to_string(quad) + ")");
    const double q = std::max(quad, 0.0);
    const double a = 1.0 / (1.0 + q);
    const double innovation = y_bar_next - kt.dot(phi_bar.data(), state.theta.data(), n);

    kt.axpy(a * innovation, pphi.data(), state.theta.data(), n);
    kt.rank1_update(state.p_bar.data(), a, pphi.data(), n);
    state.p_bar = 0.5 * (state.p_bar + state.p_bar.transpose()).eval();

    state.logdet_info += std::log1p(q);
    state.r += kt.sum_squares(phi_bar.data(), n);
    state.gain_sum += a * q;
    state.last_a = a;
    ++state.k;
    if (!std::isfinite(state.logdet_info) || !state.theta.allFinite())
        throw BreakdownError("rls_step: state became non-finite");
    return {a, q};
}

Eigen::VectorXd batch_oracle(double alpha, const Eigen::VectorXd& theta0, const Eigen::MatrixXd& phis,
                             std::span<const double> ys) {
    if (!(alpha > 0.0)) throw ArgumentError("batch_oracle: alpha must be positive");
    if (static_cast<std::size_t>(phis.rows()) != ys.size())
        throw ArgumentError("batch_oracle: regressor and observation counts differ");
    if (phis.rows() > 0 && phis.cols() != theta0.size())
        throw ArgumentError("batch_oracle: regressor dimension mismatch");
    const auto n = theta0.size();
    Eigen::MatrixXd info = alpha * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = alpha * theta0;
    if (phis.rows() > 0) {
        info.noalias() += phis.transpose() * phis;
        const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
        rhs.noalias() += phis.transpose() * y;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw NumericError("batch_oracle: information matrix is not positive definite");
    Eigen::VectorXd theta = ldlt.solve(rhs);
    if (!theta.allFinite()) throw NumericError("batch_oracle: singular system");
    return theta;
}

double min_information_eigenvalue(const RlsState& state) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.p_bar, Eigen::EigenvaluesOnly);
    return 1.0 / es.eigenvalues().maxCoeff();
}

ExcitationReport excitation(const RlsState& state, double kappa) {
    if (state.k < 1) throw ArgumentError("excitation: needs at least one update");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.p_bar, Eigen::EigenvaluesOnly);
    ExcitationReport rep;
    rep.lambda_min_info = 1.0 / es.eigenvalues().maxCoeff();
    rep.lambda_max_info = 1.0 / es.eigenvalues().minCoeff();
    rep.gamma1_hat = rep.lambda_min_info / static_cast<double>(state.k);
    const double ln_r = std::log(state.r);
    rep.ratio = ln_r / rep.lambda_min_info;
    rep.ratio_beta2 = ln_r * std::pow(std::log(std::numbers::e + ln_r), kappa) / rep.lambda_min_info;
    return rep;
}

std::string_view bound_kind_name(BoundKind kind) {
    switch (kind) {
        case BoundKind::thm4: return "thm4";
        case BoundKind::cor3: return "cor3";
        case BoundKind::thm7: return "thm7";
    }
    return "unknown";
}

double ErrorBound::recompute() const { return 2.0 * theta_norm * std::sqrt(numerator / denominator); }

double noise_weight(std::size_t p, std::span<const std::size_t> q, std::span<const double> b) {
    if (b.size() != q.size() + 1) throw ArgumentError("noise_weight: need m + 1 scales for m input orders");
    double w = static_cast<double>(p) * b[0] * b[0];
    for (std::size_t i = 0; i < q.size(); ++i) w += static_cast<double>(q[i]) * b[i + 1] * b[i + 1];
    return w;
}

ErrorBound bound_thm4(double theta_norm, std::size_t p, std::span<const std::size_t> q,
                      std::span<const double> b, double gamma1) {
    if (!(gamma1 > 0.0)) throw ArgumentError("bound_thm4: gamma1 must be positive");
    ErrorBound e{0.0, BoundKind::thm4, theta_norm, noise_weight(p, q, b), gamma1};
    e.value = e.recompute();
    return e;
}

ErrorBound bound_cor3(double theta_norm, std::size_t p, std::span<const std::size_t> q,
                      std::span<const double> b, double gamma3) {
    if (!(gamma3 > 0.0)) throw ArgumentError("bound_cor3: gamma3 must be positive");
    const double min_b = *std::min_element(b.begin(), b.end());
    ErrorBound e{0.0, BoundKind::cor3, theta_norm, noise_weight(p, q, b), gamma3 + 2.0 * min_b * min_b};
    e.value = e.recompute();
    return e;
}

ErrorBound bound_thm7(double theta_norm, double f_star) {
    if (!(f_star >= 0.0)) throw ArgumentError("bound_thm7: f* must be non-negative");
    ErrorBound e{0.0, BoundKind::thm7, theta_norm, f_star, 1.0};
    e.value = e.recompute();
    return e;
}

LogDetCheck lemma3_diagnostic(const RlsState& state) {
    const double n = static_cast<double>(state.dim());
    LogDetCheck c;
    c.lhs = state.gain_sum;
    c.rhs = state.logdet_info - n * std::log(state.alpha);
    Eigen::LLT<Eigen::MatrixXd> llt(state.p_bar);
    if (llt.info() != Eigen::Success) throw NumericError("lemma3_diagnostic: P is not positive definite");
    const double logdet_p = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    c.rhs_factorized = -logdet_p - n * std::log(state.alpha);
    return c;
}

double NoiseEnergy::add(std::span<const double> phi, std::span<const double> phi_bar) {
    const std::size_t n = static_cast<std::size_t>(theta_.size());
    if (phi.size() != n || phi_bar.size() != n) throw ArgumentError("noise energy: misaligned regressors");
    for (std::size_t j = 0; j < n; ++j) diff_[static_cast<Eigen::Index>(j)] = phi[j] - phi_bar[j];
    const double d = kernels::dot({theta_.data(), n}, {diff_.data(), n});
    s_ += d * d;
    return s_;
}

std::vector<double> noise_energy_sk(const Eigen::VectorXd& theta, const Eigen::MatrixXd& phis,
                                    const Eigen::MatrixXd& phi_bars) {
    if (phis.rows() != phi_bars.rows() || phis.cols() != phi_bars.cols() || phis.cols() != theta.size())
        throw ArgumentError("noise_energy_sk: misaligned sequences");
    std::vector<double> s(static_cast<std::size_t>(phis.rows()));
    const Eigen::VectorXd d = (phis - phi_bars) * theta;
    double acc = 0.0;
    for (Eigen::Index t = 0; t < d.size(); ++t) {
        acc += d[t] * d[t];
        s[static_cast<std::size_t>(t)] = acc;
    }
    return s;
}

}  // namespace dprls
