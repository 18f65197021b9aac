#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dprls/arx_model.hpp"

namespace testing_support {

using cplx = std::complex<double>;

// a_1..a_p whose characteristic polynomial 1 - sum a_j z^j = prod (1 - mu_j z)
// has the given reciprocal roots mu (closed under conjugation).
inline std::vector<double> ar_from_reciprocal_roots(const std::vector<cplx>& mu) {
    std::vector<cplx> c{1.0};  // coefficients of prod (1 - mu z), ascending
    for (const auto& m : mu) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= m * c[i];
        }
        c = next;
    }
    std::vector<double> a;
    for (std::size_t j = 1; j < c.size(); ++j) a.push_back(-c[j].real());
    return a;
}

// Reciprocal roots with modulus in [lo, hi], random real/complex mix.
inline std::vector<cplx> random_reciprocal_roots(std::mt19937_64& gen, std::size_t p, double lo, double hi) {
    std::uniform_real_distribution<double> mod(lo, hi), ang(0.2, std::numbers::pi - 0.2), coin(0.0, 1.0);
    std::vector<cplx> mu;
    while (mu.size() < p) {
        const double r = mod(gen);
        if (mu.size() + 2 <= p && coin(gen) < 0.5) {
            const cplx z = std::polar(r, ang(gen));
            mu.push_back(z);
            mu.push_back(std::conj(z));
        } else {
            mu.push_back(coin(gen) < 0.5 ? r : -r);
        }
    }
    return mu;
}

inline std::vector<double> random_stable_ar(std::mt19937_64& gen, std::size_t p, double max_modulus = 0.9) {
    return ar_from_reciprocal_roots(random_reciprocal_roots(gen, p, 0.05, max_modulus));
}

inline std::vector<std::vector<double>> random_b(std::mt19937_64& gen, std::size_t m, std::size_t max_q) {
    std::uniform_int_distribution<std::size_t> qd(1, max_q);
    std::uniform_real_distribution<double> v(-2.0, 2.0);
    std::vector<std::vector<double>> b(m);
    for (auto& row : b) {
        row.resize(qd(gen));
        for (auto& x : row) x = v(gen);
        if (std::fabs(row[0]) < 0.1) row[0] = 0.5;
    }
    return b;
}

inline dprls::ArxModel random_stable_model(std::mt19937_64& gen, std::size_t max_p = 3, std::size_t max_m = 3,
                                           std::size_t max_q = 3) {
    std::uniform_int_distribution<std::size_t> pd(1, max_p), md(1, max_m);
    const std::size_t p = pd(gen);
    return dprls::ArxModel(random_stable_ar(gen, p), random_b(gen, md(gen), max_q));
}

// Durand-Kerner on the monic polynomial z^p + c_{p-1} z^{p-1} + ... + c_0
// whose roots are the zeros of 1 - sum a_j z^j.
inline std::vector<cplx> durand_kerner_roots(const std::vector<double>& a) {
    const std::size_t p = a.size();
    // -a_p z^p - ... - a_1 z + 1, divided by -a_p.
    std::vector<cplx> c(p + 1);
    for (std::size_t j = 0; j <= p; ++j) {
        const double coef = j == 0 ? 1.0 : -a[j - 1];
        c[j] = coef / (-a[p - 1]);
    }
    auto eval = [&](cplx z) {
        cplx v = c[p];
        for (std::size_t j = p; j-- > 0;) v = v * z + c[j];
        return v;
    };
    double bound = 0.0;
    for (std::size_t j = 0; j < p; ++j) bound = std::max(bound, std::abs(c[j]));
    bound += 1.0;
    std::vector<cplx> z(p);
    for (std::size_t j = 0; j < p; ++j) z[j] = std::polar(0.5 * bound, 0.4 + 2.0 * std::numbers::pi * j / p);
    for (int it = 0; it < 5000; ++it) {
        double move = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            cplx den = 1.0;
            for (std::size_t l = 0; l < p; ++l)
                if (l != j) den *= (z[j] - z[l]);
            const cplx step = eval(z[j]) / den;
            z[j] -= step;
            move = std::max(move, std::abs(step));
        }
        if (move < 1e-15) break;
    }
    std::sort(z.begin(), z.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
    return z;
}

inline double rel_diff(double a, double b) {
    const double s = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / s;
}

}  // namespace testing_support
