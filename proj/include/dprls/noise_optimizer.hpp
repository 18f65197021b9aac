#pragma once

// Noise-intensity design: minimise
//
//   f(b0..bm) = (p b0^2 + sum_i q_i b_i^2) / (gamma3 + 2 min_j b_j^2)
//
// subject to C1 d / b0 <= e and (C_{i,2} / b0 + 1 / b_i) d <= e.
// The objective is non-smooth (the min) and non-convex, so the solver
// seeds from a dense grid over a bounding box and polishes with projected
// coordinate descent; callers cross-check against brute force.

#include <span>
#include <string>
#include <vector>

#include "dprls/privacy.hpp"

namespace dprls {

struct NoiseDesignProblem {
    std::size_t p = 0;
    std::vector<std::size_t> q;  // one entry per participant; may be empty
    double gamma3 = 1.0;
    double epsilon = 1.0;
    double delta_adj = 1.0;
    PrivacyConstants consts;

    std::size_t participants() const { return q.size(); }
    void validate() const;
};

double design_objective(const NoiseDesignProblem& problem, std::span<const double> b);

struct FeasibilityReport {
    bool feasible = false;
    double output_slack = 0.0;
    std::vector<double> input_slacks;
    std::string reason;
};

FeasibilityReport feasible(std::span<const double> b, const NoiseDesignProblem& problem, double tol = 1e-9);

struct SearchBox {
    std::vector<double> lower;
    std::vector<double> upper;
};

// Smallest admissible b0 (both constraint families) and, for a given b0,
// the smallest admissible b_i.
double min_feasible_b0(const NoiseDesignProblem& problem);
double input_floor(const NoiseDesignProblem& problem, std::size_t i, double b0);

// Lower corner: b0 >= max(C1 d/e, C_{i,2} d/e), b_i >= floor at the upper
// b0. Upper corner: upper_factor times the largest lower coordinate.
SearchBox bounding_box(const NoiseDesignProblem& problem, double upper_factor = 10.0);

struct NoiseDesignSolution {
    std::vector<double> b_star;
    double f_star = 0.0;
    FeasibilityReport certificate;
    SearchBox search_box;
    int box_doublings = 0;
};

NoiseDesignSolution optimize_noise(const NoiseDesignProblem& problem, double tol = 1e-10);

// Coordinate descent from one starting point (projected onto the feasible
// set first). Exposed for multistart checks.
std::vector<double> descend_from(const NoiseDesignProblem& problem, std::vector<double> start, double tol = 1e-10);

}  // namespace dprls
