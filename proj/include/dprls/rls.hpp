#pragma once

// Recursive least squares on perturbed regressors:
//
//   a_k       = 1 / (1 + phi_k' P_k phi_k)
//   theta_k+1 = theta_k + a_k P_k phi_k (y_k+1 - phi_k' theta_k)
//   P_k+1     = P_k - a_k P_k phi_k phi_k' P_k,    P_0 = I / alpha
//
// P is kept in covariance form and re-symmetrised after every update. The
// information matrix P^-1 is tracked only through its log-determinant.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dprls/privacy.hpp"

namespace dprls {

struct RlsState {
    Eigen::VectorXd theta;
    Eigen::MatrixXd p_bar;
    double alpha = 1.0;
    // e + sum_{t<k} ||phi_t||^2, i.e. r_{k-1} after k updates.
    double r = 0.0;
    std::size_t k = 0;
    // ln |P_k^-1|, advanced by the determinant lemma.
    double logdet_info = 0.0;
    // sum_{t<k} a_t phi_t' P_t phi_t
    double gain_sum = 0.0;
    double last_a = 1.0;

    std::size_t dim() const { return static_cast<std::size_t>(theta.size()); }
};

RlsState rls_init(std::size_t n, double alpha, const Eigen::VectorXd& theta0);
RlsState rls_init(std::size_t n, double alpha);

struct StepInfo {
    double a_bar;      // in (0, 1]
    double quadratic;  // phi' P phi before the update
};

// Advances the state by one observation. Throws NumericError on non-finite
// input and BreakdownError when phi' P phi < -1e-12.
StepInfo rls_step(RlsState& state, std::span<const double> phi_bar, double y_bar_next);

// Regularised least squares in closed form:
// (alpha I + sum phi phi') theta = alpha theta0 + sum phi y.
// phis holds one regressor per row.
Eigen::VectorXd batch_oracle(double alpha, const Eigen::VectorXd& theta0, const Eigen::MatrixXd& phis,
                             std::span<const double> ys);

struct ExcitationReport {
    double lambda_min_info = 0.0;
    double lambda_max_info = 0.0;
    double gamma1_hat = 0.0;   // lambda_min(P^-1) / k
    double ratio = 0.0;        // ln r_{k-1} / lambda_min(P^-1)
    double ratio_beta2 = 0.0;  // ln r (ln(e + ln r))^kappa / lambda_min(P^-1)
};

// Requires state.k >= 1.
ExcitationReport excitation(const RlsState& state, double kappa = 1.1);

// lambda_min(P_k^-1) only.
double min_information_eigenvalue(const RlsState& state);

enum class BoundKind { thm4, cor3, thm7 };
std::string_view bound_kind_name(BoundKind kind);

// Asymptotic error bound 2 ||theta|| sqrt(numerator / denominator).
struct ErrorBound {
    double value = 0.0;
    BoundKind kind = BoundKind::thm4;
    double theta_norm = 0.0;
    double numerator = 0.0;    // p b0^2 + sum q_i b_i^2
    double denominator = 0.0;  // gamma1, or gamma3 + 2 min b_i^2

    double recompute() const;
};

// p b0^2 + sum_i q_i b_i^2
double noise_weight(std::size_t p, std::span<const std::size_t> q, std::span<const double> b);

ErrorBound bound_thm4(double theta_norm, std::size_t p, std::span<const std::size_t> q,
                      std::span<const double> b, double gamma1);
ErrorBound bound_cor3(double theta_norm, std::size_t p, std::span<const std::size_t> q,
                      std::span<const double> b, double gamma3);
ErrorBound bound_thm7(double theta_norm, double f_star);

struct LogDetCheck {
    double lhs = 0.0;             // sum a_t phi_t' P_t phi_t
    double rhs = 0.0;             // running ln|P_k^-1| - ln|P_0^-1|
    double rhs_factorized = 0.0;  // same, from a Cholesky factor of P_k
    bool holds(double tol = 1e-6) const { return lhs <= rhs + tol; }
};

LogDetCheck lemma3_diagnostic(const RlsState& state);

// s_k = sum_{t<=k} (theta'(phi_t - phi_bar_t))^2 accumulated step by step.
class NoiseEnergy {
public:
    explicit NoiseEnergy(Eigen::VectorXd theta) : theta_(std::move(theta)), diff_(theta_.size()) {}
    double add(std::span<const double> phi, std::span<const double> phi_bar);
    double value() const { return s_; }

private:
    Eigen::VectorXd theta_;
    Eigen::VectorXd diff_;
    double s_ = 0.0;
};

// Whole-sequence form. Rows of phis / phi_bars are aligned steps.
std::vector<double> noise_energy_sk(const Eigen::VectorXd& theta, const Eigen::MatrixXd& phis,
                                    const Eigen::MatrixXd& phi_bars);

}  // namespace dprls
