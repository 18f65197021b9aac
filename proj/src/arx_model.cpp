#include "dprls/arx_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dprls/error.hpp"
#include "dprls/kernels.hpp"

namespace dprls {

ArxModel::ArxModel(std::vector<double> a, std::vector<std::vector<double>> b)
    : a_(std::move(a)), b_(std::move(b)) {
    if (b_.empty()) throw ArgumentError("ArxModel: at least one input participant is required");
    n_ = a_.size();
    for (std::size_t i = 0; i < b_.size(); ++i) {
        if (b_[i].empty())
            throw ArgumentError("ArxModel: participant " + std::to_string(i + 1) + " has q_i = 0");
        n_ += b_[i].size();
    }
    theta_.resize(static_cast<Eigen::Index>(n_));
    Eigen::Index j = 0;
    for (double v : a_) theta_[j++] = v;
    for (const auto& bi : b_)
        for (double v : bi) theta_[j++] = v;
    for (Eigen::Index t = 0; t < theta_.size(); ++t)
        if (!std::isfinite(theta_[t])) throw ArgumentError("ArxModel: non-finite coefficient");
}

std::vector<std::size_t> ArxModel::q_list() const {
    std::vector<std::size_t> q;
    q.reserve(b_.size());
    for (const auto& bi : b_) q.push_back(bi.size());
    return q;
}

std::vector<double> ArxModel::input_gain_l1() const {
    std::vector<double> s;
    s.reserve(b_.size());
    for (const auto& bi : b_) {
        double acc = 0.0;
        for (double v : bi) acc += std::fabs(v);
        s.push_back(acc);
    }
    return s;
}

ArxModel ArxModel::example1() { return ArxModel({-0.25, 0.375}, {{1, 2}, {3, 4}, {5, 6}}); }

ArxModel ArxModel::example2() {
    return ArxModel({-0.25, 0.375}, {{2, 2.2}, {1.5, 2.5}, {2.4, 1.6}});
}

void fill_regressor(const ArxModel& model, std::span<const double> y,
                    std::span<const std::vector<double>> u, long k, std::span<double> out) {
    std::size_t j = 0;
    for (std::size_t lag = 0; lag < model.p(); ++lag) {
        const long t = k - static_cast<long>(lag);
        out[j++] = (t >= 1 && static_cast<std::size_t>(t) <= y.size()) ? y[t - 1] : 0.0;
    }
    for (std::size_t i = 0; i < model.m(); ++i) {
        const auto& ui = u[i];
        for (std::size_t lag = 0; lag < model.q(i); ++lag) {
            const long t = k - static_cast<long>(lag);
            out[j++] = (t >= 0 && static_cast<std::size_t>(t) < ui.size()) ? ui[t] : 0.0;
        }
    }
}

Eigen::VectorXd regressor_of(const Trajectory& traj, const ArxModel& model, long k) {
    if (k < 0 || static_cast<std::size_t>(k) >= traj.horizon())
        throw std::out_of_range("regressor_of: step " + std::to_string(k) + " outside [0, " +
                                std::to_string(traj.horizon()) + ")");
    Eigen::VectorXd phi(static_cast<Eigen::Index>(model.n()));
    // Only y_1..y_k are visible at step k.
    fill_regressor(model, std::span<const double>(traj.y.data(), static_cast<std::size_t>(k)),
                   traj.u, k, {phi.data(), model.n()});
    return phi;
}

namespace {

void check_lengths(const ArxModel& model, std::span<const std::vector<double>> inputs,
                   std::span<const double> noise, std::size_t horizon) {
    if (inputs.size() != model.m())
        throw ArgumentError("simulate: expected " + std::to_string(model.m()) + " input sequences, got " +
                            std::to_string(inputs.size()));
    for (const auto& ui : inputs)
        if (ui.size() < horizon) throw ArgumentError("simulate: input sequence shorter than horizon");
    if (noise.size() < horizon) throw ArgumentError("simulate: noise sequence shorter than horizon");
}

Trajectory run_recursion(const ArxModel& model, std::span<const double> prefix,
                         std::span<const std::vector<double>> inputs, std::span<const double> noise,
                         std::size_t horizon) {
    Trajectory traj;
    traj.y.assign(horizon, 0.0);
    traj.u.resize(model.m());
    for (std::size_t i = 0; i < model.m(); ++i)
        traj.u[i].assign(inputs[i].begin(), inputs[i].begin() + static_cast<long>(horizon));
    traj.w.assign(noise.begin(), noise.begin() + static_cast<long>(horizon));

    const std::size_t fixed = std::min(prefix.size(), horizon);
    std::copy(prefix.begin(), prefix.begin() + static_cast<long>(fixed), traj.y.begin());

    const auto& theta = model.theta();
    std::vector<double> phi(model.n());
    for (std::size_t k = fixed; k < horizon; ++k) {
        fill_regressor(model, std::span<const double>(traj.y.data(), k), traj.u,
                       static_cast<long>(k), phi);
        traj.y[k] = kernels::dot({theta.data(), model.n()}, phi) + noise[k];
    }
    return traj;
}

}  // namespace

Trajectory simulate(const ArxModel& model, std::span<const std::vector<double>> inputs,
                    std::span<const double> noise, std::size_t horizon) {
    check_lengths(model, inputs, noise, horizon);
    return run_recursion(model, {}, inputs, noise, horizon);
}

Trajectory simulate_from_output_prefix(const ArxModel& model, std::span<const double> output_prefix,
                                       std::span<const std::vector<double>> inputs,
                                       std::span<const double> noise, std::size_t horizon) {
    check_lengths(model, inputs, noise, horizon);
    return run_recursion(model, output_prefix, inputs, noise, horizon);
}

}  // namespace dprls
