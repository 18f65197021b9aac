#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "dprls/arx_model.hpp"
#include "dprls/error.hpp"
#include "support.hpp"

using namespace dprls;

TEST(ArxModel, ExampleOneLayout) {
    const auto m = ArxModel::example1();
    EXPECT_EQ(m.p(), 2u);
    EXPECT_EQ(m.m(), 3u);
    EXPECT_EQ(m.n(), 8u);
    const double expect[] = {-0.25, 0.375, 1, 2, 3, 4, 5, 6};
    for (int i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(m.theta()[i], expect[i]);
    const auto l1 = m.input_gain_l1();
    EXPECT_DOUBLE_EQ(l1[0], 3.0);
    EXPECT_DOUBLE_EQ(l1[1], 7.0);
    EXPECT_DOUBLE_EQ(l1[2], 11.0);
}

TEST(ArxModel, RejectsBadShapes) {
    EXPECT_THROW(ArxModel({0.5}, {}), ArgumentError);
    EXPECT_THROW(ArxModel({0.5}, {{1.0}, {}}), ArgumentError);
    EXPECT_THROW(ArxModel({NAN}, {{1.0}}), ArgumentError);
    EXPECT_NO_THROW(ArxModel({}, {{1.0, 2.0}}));
}

TEST(ArxModel, RegressorZeroHistory) {
    const auto m = ArxModel::example1();
    Trajectory t;
    t.y = {10, 20, 30};
    t.u = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    t.w = {0, 0, 0};
    const auto phi0 = regressor_of(t, m, 0);
    const double e0[] = {0, 0, 1, 0, 4, 0, 7, 0};
    for (int i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(phi0[i], e0[i]);
    const auto phi2 = regressor_of(t, m, 2);
    const double e2[] = {20, 10, 3, 2, 6, 5, 9, 8};
    for (int i = 0; i < 8; ++i) EXPECT_DOUBLE_EQ(phi2[i], e2[i]);
    EXPECT_THROW(regressor_of(t, m, 3), std::out_of_range);
    EXPECT_THROW(regressor_of(t, m, -1), std::out_of_range);
}

TEST(ArxModel, DefiningIdentity) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = testing_support::random_stable_model(gen);
        const std::size_t T = 200;
        std::normal_distribution<double> nd;
        std::vector<std::vector<double>> u(m.m(), std::vector<double>(T));
        for (auto& ui : u)
            for (auto& x : ui) x = nd(gen);
        std::vector<double> w(T);
        for (auto& x : w) x = nd(gen);
        const auto traj = simulate(m, u, w, T);
        for (std::size_t k = 0; k < T; ++k) {
            const auto phi = regressor_of(traj, m, static_cast<long>(k));
            ASSERT_NEAR(traj.y[k], m.theta().dot(phi) + w[k], 1e-9 * (1.0 + std::fabs(traj.y[k])));
        }
    }
}

TEST(ArxModel, Superposition) {
    std::mt19937_64 gen(12);
    const auto m = testing_support::random_stable_model(gen);
    const std::size_t T = 300;
    std::normal_distribution<double> nd;
    auto draw = [&] {
        std::vector<std::vector<double>> u(m.m(), std::vector<double>(T));
        for (auto& ui : u)
            for (auto& x : ui) x = nd(gen);
        std::vector<double> w(T);
        for (auto& x : w) x = nd(gen);
        return std::make_pair(u, w);
    };
    auto [u1, w1] = draw();
    auto [u2, w2] = draw();
    const double alpha = 1.7, beta = -0.6;
    auto u3 = u1;
    std::vector<double> w3(T);
    for (std::size_t i = 0; i < m.m(); ++i)
        for (std::size_t k = 0; k < T; ++k) u3[i][k] = alpha * u1[i][k] + beta * u2[i][k];
    for (std::size_t k = 0; k < T; ++k) w3[k] = alpha * w1[k] + beta * w2[k];
    const auto y1 = simulate(m, u1, w1, T).y, y2 = simulate(m, u2, w2, T).y, y3 = simulate(m, u3, w3, T).y;
    for (std::size_t k = 0; k < T; ++k)
        ASSERT_NEAR(y3[k], alpha * y1[k] + beta * y2[k], 1e-9 * (1.0 + std::fabs(y3[k])));
}

TEST(ArxModel, ImpulseResponseOfFirstOrderSystem) {
    // y_{k+1} = 0.5 y_k + u_k, unit impulse at k = 0: y_k = 0.5^{k-1}.
    const ArxModel m({0.5}, {{1.0}});
    std::vector<std::vector<double>> u{std::vector<double>(10, 0.0)};
    u[0][0] = 1.0;
    const auto traj = simulate(m, u, std::vector<double>(10, 0.0), 10);
    for (std::size_t k = 1; k <= 10; ++k) EXPECT_DOUBLE_EQ(traj.output(static_cast<long>(k)), std::pow(0.5, k - 1.0));
}

TEST(ArxModel, SimulateChecksLengths) {
    const auto m = ArxModel::example1();
    std::vector<std::vector<double>> u(2, std::vector<double>(5));
    EXPECT_THROW(simulate(m, u, std::vector<double>(5), 5), ArgumentError);
    u.resize(3, std::vector<double>(5));
    EXPECT_THROW(simulate(m, u, std::vector<double>(4), 5), ArgumentError);
    u[1].resize(3);
    EXPECT_THROW(simulate(m, u, std::vector<double>(5), 5), ArgumentError);
}

TEST(ArxModel, OutputPrefixOverride) {
    const ArxModel m({0.5}, {{1.0}});
    std::vector<std::vector<double>> u{std::vector<double>(6, 0.0)};
    const std::vector<double> prefix{2.0, 4.0};
    const auto traj = simulate_from_output_prefix(m, prefix, u, std::vector<double>(6, 0.0), 6);
    EXPECT_DOUBLE_EQ(traj.y[0], 2.0);
    EXPECT_DOUBLE_EQ(traj.y[1], 4.0);
    EXPECT_DOUBLE_EQ(traj.y[2], 2.0);
    EXPECT_DOUBLE_EQ(traj.y[5], 0.25);
}
