#pragma once

// Multi-participant ARX system
//
//   y_{k+1} = a_1 y_k + ... + a_p y_{k+1-p}
//           + sum_i (b_{i,1} u_{i,k} + ... + b_{i,q_i} u_{i,k+1-q_i}) + w_{k+1}
//
// with zero history: y_k = 0 for k <= 0 and u_{i,k} = 0 for k < 0.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dprls {

using ParameterVector = Eigen::VectorXd;

class ArxModel {
public:
    // Throws ArgumentError unless every participant has q_i >= 1 and m >= 1.
    ArxModel(std::vector<double> a, std::vector<std::vector<double>> b);

    std::size_t p() const { return a_.size(); }
    std::size_t m() const { return b_.size(); }
    std::size_t q(std::size_t i) const { return b_.at(i).size(); }
    std::vector<std::size_t> q_list() const;
    // p + sum_i q_i
    std::size_t n() const { return n_; }

    const std::vector<double>& a() const { return a_; }
    const std::vector<std::vector<double>>& b() const { return b_; }

    // [a_1..a_p, b_{1,1}..b_{1,q_1}, ..., b_{m,1}..b_{m,q_m}]
    const ParameterVector& theta() const { return theta_; }

    // sum_j |b_{i,j}| per participant.
    std::vector<double> input_gain_l1() const;

    // The four-participant system used throughout the examples:
    // a = (-1/4, 3/8), b = ((1,2),(3,4),(5,6)).
    static ArxModel example1();
    // Bank-investment variant: b = ((2,2.2),(1.5,2.5),(2.4,1.6)).
    static ArxModel example2();

private:
    std::vector<double> a_;
    std::vector<std::vector<double>> b_;
    std::size_t n_ = 0;
    ParameterVector theta_;
};

// Signals of one realisation. Index conventions follow the model equation:
// output(k) is y_k for k = 1..T, input(i, k) is u_{i,k} for k = 0..T-1 and
// noise(k) is w_k for k = 1..T. Out-of-range history reads as zero.
struct Trajectory {
    std::vector<double> y;               // y[k-1] = y_k
    std::vector<std::vector<double>> u;  // u[i][k] = u_{i,k}
    std::vector<double> w;               // w[k-1] = w_k

    std::size_t horizon() const { return y.size(); }
    double output(long k) const {
        return (k >= 1 && static_cast<std::size_t>(k) <= y.size()) ? y[k - 1] : 0.0;
    }
    double input(std::size_t i, long k) const {
        return (k >= 0 && static_cast<std::size_t>(k) < u[i].size()) ? u[i][k] : 0.0;
    }
};

// Writes phi_k = [y_k..y_{k+1-p}, u_{1,k}..u_{1,k+1-q_1}, ...] into out
// (length n). Zero-padded history.
void fill_regressor(const ArxModel& model, std::span<const double> y, 
                    std::span<const std::vector<double>> u, long k, std::span<double> out);

// phi_k of a trajectory; std::out_of_range unless 0 <= k < T.
Eigen::VectorXd regressor_of(const Trajectory& traj, const ArxModel& model, long k);

// Iterates the model for T steps. inputs[i] and noise (w_1..w_T, stored from
// index 0) must hold at least T samples; only the first T are used.
Trajectory simulate(const ArxModel& model, std::span<const std::vector<double>> inputs,
                    std::span<const double> noise, std::size_t horizon);

// As simulate, but y_1..y_{T1} are taken from output_prefix (T1 =
// prefix length) instead of being generated; the recursion resumes at
// k = T1 from that history. Used to propagate a perturbed output record.
Trajectory simulate_from_output_prefix(const ArxModel& model, std::span<const double> output_prefix,
                                       std::span<const std::vector<double>> inputs,
                                       std::span<const double> noise, std::size_t horizon);

}  // namespace dprls
