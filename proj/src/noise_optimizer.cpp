#include "dprls/noise_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dprls/error.hpp"

namespace dprls {

void NoiseDesignProblem::validate() const {
    if (!(gamma3 > 0.0)) throw ArgumentError("noise design: gamma3 must be positive");
    if (!(epsilon > 0.0)) throw ArgumentError("noise design: epsilon must be positive");
    if (!(delta_adj > 0.0)) throw ArgumentError("noise design: delta must be positive");
    if (consts.ci2.size() != q.size()) throw ArgumentError("noise design: C_{i,2} count differs from q count");
    if (!(consts.c1 >= 0.0)) throw ArgumentError("noise design: C1 must be non-negative");
}

double design_objective(const NoiseDesignProblem& problem, std::span<const double> b) {
    double num = static_cast<double>(problem.p) * b[0] * b[0];
    double min_sq = b[0] * b[0];
    for (std::size_t i = 0; i < problem.q.size(); ++i) {
        const double s = b[i + 1] * b[i + 1];
        num += static_cast<double>(problem.q[i]) * s;
        min_sq = std::min(min_sq, s);
    }
    return num / (problem.gamma3 + 2.0 * min_sq);
}

FeasibilityReport feasible(std::span<const double> b, const NoiseDesignProblem& problem, double tol) {
    FeasibilityReport rep;
    const std::size_t m = problem.participants();
    if (b.size() != m + 1) {
        rep.reason = "expected " + std::to_string(m + 1) + " scales";
        return rep;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (!(b[j] > 0.0) || !std::isfinite(b[j])) {
            rep.reason = "scale b" + std::to_string(j) + " is not positive";
            return rep;
        }
    }
    const double e = problem.epsilon;
    const double d = problem.delta_adj;
    rep.output_slack = e - problem.consts.c1 * d / b[0];
    rep.feasible = rep.output_slack >= -tol;
    if (!rep.feasible) rep.reason = "output constraint violated";
    for (std::size_t i = 0; i < m; ++i) {
        const double s = e - (problem.consts.ci2[i] / b[0] + 1.0 / b[i + 1]) * d;
        rep.input_slacks.push_back(s);
        if (s < -tol && rep.feasible) {
            rep.feasible = false;
            rep.reason = "input constraint " + std::to_string(i + 1) + " violated";
        }
    }
    return rep;
}

double min_feasible_b0(const NoiseDesignProblem& problem) {
    const double ratio = problem.delta_adj / problem.epsilon;
    double b0 = problem.consts.c1 * ratio;
    // Input constraints need C_{i,2}/b0 < e/d strictly.
    for (double c : problem.consts.ci2) b0 = std::max(b0, c * ratio * (1.0 + 1e-9));
    return b0;
}

double input_floor(const NoiseDesignProblem& problem, std::size_t i, double b0) {
    const double room = problem.epsilon / problem.delta_adj - problem.consts.ci2[i] / b0;
    return room > 0.0 ? 1.0 / room : std::numeric_limits<double>::infinity();
}

SearchBox bounding_box(const NoiseDesignProblem& problem, double upper_factor) {
    problem.validate();
    const std::size_t m = problem.participants();
    const double b0_low = min_feasible_b0(problem);
    const double base = std::max(b0_low, problem.delta_adj / problem.epsilon);
    const double upper = upper_factor * base;
    SearchBox box;
    box.lower.push_back(b0_low);
    for (std::size_t i = 0; i < m; ++i) box.lower.push_back(input_floor(problem, i, upper));
    box.upper.assign(m + 1, upper);
    return box;
}

namespace {

// Feasibility-restoring map. Input scales that sat on their floor before a
// change of b0 follow the floor; the rest are only raised when needed.
void project(const NoiseDesignProblem& problem, std::vector<double>& b, const std::vector<char>& tight) {
    b[0] = std::max(b[0], min_feasible_b0(problem));
    for (std::size_t i = 1; i < b.size(); ++i) {
        const double floor = input_floor(problem, i - 1, b[0]);
        b[i] = tight[i] ? floor : std::max(b[i], floor);
    }
}

std::vector<char> tight_set(const NoiseDesignProblem& problem, const std::vector<double>& b) {
    std::vector<char> tight(b.size(), 0);
    for (std::size_t i = 1; i < b.size(); ++i) {
        const double floor = input_floor(problem, i - 1, b[0]);
        tight[i] = b[i] <= floor * (1.0 + 1e-12);
    }
    return tight;
}

bool better(double fa, const std::vector<double>& a, double fb, const std::vector<double>& b) {
    const double scale = std::max(std::fabs(fa), std::fabs(fb));
    if (fa < fb - 1e-15 * scale) return true;
    if (fb < fa - 1e-15 * scale) return false;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Direction {
    std::vector<double> weights;  // log-space step multipliers
};

std::vector<Direction> directions_at(const std::vector<double>& b) {
    const std::size_t dim = b.size();
    std::vector<Direction> dirs;
    for (std::size_t j = 0; j < dim; ++j) {
        Direction d{std::vector<double>(dim, 0.0)};
        d.weights[j] = 1.0;
        dirs.push_back(d);
    }
    // The k smallest scales move together. Near-ties at the minimum are the
    // usual stall: moving one scale alone cannot lift the denominator.
    std::vector<std::size_t> order(dim);
    for (std::size_t j = 0; j < dim; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return b[x] < b[y]; });
    for (std::size_t k = 2; k < dim; ++k) {
        Direction group{std::vector<double>(dim, 0.0)};
        for (std::size_t t = 0; t < k; ++t) group.weights[order[t]] = 1.0;
        dirs.push_back(group);
    }
    if (dim > 1) dirs.push_back(Direction{std::vector<double>(dim, 1.0)});
    return dirs;
}

}  // namespace

std::vector<double> descend_from(const NoiseDesignProblem& problem, std::vector<double> b, double tol) {
    problem.validate();
    const std::size_t dim = problem.participants() + 1;
    if (b.size() != dim) throw ArgumentError("descend_from: start has wrong dimension");
    for (double& v : b)
        if (!(v > 0.0)) v = problem.delta_adj / problem.epsilon;
    project(problem, b, std::vector<char>(dim, 0));
    double f = design_objective(problem, b);

    double step = 0.5;
    const double min_step = std::max(tol, 1e-14);
    int guard = 0;
    while (step >= min_step && ++guard < 100000) {
        bool improved = false;
        for (const auto& dir : directions_at(b)) {
            for (double sign : {-1.0, 1.0}) {
                const std::vector<char> tight = tight_set(problem, b);
                std::vector<double> trial = b;
                for (std::size_t j = 0; j < dim; ++j)
                    if (dir.weights[j] != 0.0) trial[j] *= std::exp(sign * step * dir.weights[j]);
                std::vector<char> follow = tight;
                for (std::size_t j = 1; j < dim; ++j)
                    if (dir.weights[j] != 0.0) follow[j] = 0;
                project(problem, trial, follow);
                const double ft = design_objective(problem, trial);
                if (ft < f - 1e-15 * std::fabs(f)) {
                    b = std::move(trial);
                    f = ft;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return b;
}

namespace {

std::vector<std::vector<double>> grid_seeds(const NoiseDesignProblem& problem, const SearchBox& box) {
    const std::size_t dim = box.lower.size();
    constexpr double kBudget = 20000.0;
    auto per_axis = static_cast<std::size_t>(std::floor(std::pow(kBudget, 1.0 / static_cast<double>(dim))));
    per_axis = std::max<std::size_t>(per_axis, 2);

    std::vector<std::vector<double>> axes(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const double lo = std::log(box.lower[j]);
        const double hi = std::log(std::max(box.upper[j], box.lower[j]));
        for (std::size_t t = 0; t < per_axis; ++t)
            axes[j].push_back(std::exp(lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(per_axis - 1)));
    }

    std::vector<std::vector<double>> seeds;
    const double total = std::pow(static_cast<double>(per_axis), static_cast<double>(dim));
    if (total <= 4.0 * kBudget) {
        std::vector<std::size_t> idx(dim, 0);
        while (true) {
            std::vector<double> b(dim);
            for (std::size_t j = 0; j < dim; ++j) b[j] = axes[j][idx[j]];
            seeds.push_back(std::move(b));
            std::size_t j = 0;
            while (j < dim && ++idx[j] == per_axis) idx[j++] = 0;
            if (j == dim) break;
        }
    } else {
        // High dimension: Halton points in log coordinates.
        static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                          59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
        for (int s = 1; s <= static_cast<int>(kBudget); ++s) {
            std::vector<double> b(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                const int base = kPrimes[j % std::size(kPrimes)];
                double x = 0.0, f = 1.0 / base;
                for (int n = s + static_cast<int>(j / std::size(kPrimes)) * 7919; n > 0; n /= base, f /= base)
                    x += f * (n % base);
                const double lo = std::log(box.lower[j]);
                const double hi = std::log(std::max(box.upper[j], box.lower[j]));
                b[j] = std::exp(lo + (hi - lo) * x);
            }
            seeds.push_back(std::move(b));
        }
    }
    const std::vector<char> none(dim, 0);
    for (auto& b : seeds) project(problem, b, none);
    return seeds;
}

std::vector<double> solve_in_box(const NoiseDesignProblem& problem, const SearchBox& box, double tol) {
    auto seeds = grid_seeds(problem, box);
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) ranked.emplace_back(design_objective(problem, seeds[s]), s);
    std::sort(ranked.begin(), ranked.end());

    constexpr std::size_t kStarts = 8;
    std::vector<double> best;
    double f_best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < std::min(kStarts, ranked.size()); ++r) {
        auto cand = descend_from(problem, seeds[ranked[r].second], tol);
        const double fc = design_objective(problem, cand);
        if (best.empty() || better(fc, cand, f_best, best)) {
            best = std::move(cand);
            f_best = fc;
        }
    }
    return best;
}

}  // namespace

NoiseDesignSolution optimize_noise(const NoiseDesignProblem& problem, double tol) {
    problem.validate();
    if (!(tol > 0.0)) throw ArgumentError("optimize_noise: tol must be positive");

    double factor = 10.0;
    SearchBox box = bounding_box(problem, factor);
    std::vector<double> best = solve_in_box(problem, box, tol);
    if (best.empty()) throw NumericError("optimize_noise: empty search box");
    double f_best = design_objective(problem, best);

    NoiseDesignSolution sol;
    constexpr int kMaxDoublings = 30;
    for (int d = 0; d < kMaxDoublings; ++d) {
        factor *= 2.0;
        SearchBox wider = bounding_box(problem, factor);
        auto cand = solve_in_box(problem, wider, tol);
        const double fc = design_objective(problem, cand);
        const bool improves = fc < f_best - tol * std::max(1.0, std::fabs(f_best));
        if (better(fc, cand, f_best, best)) {
            best = std::move(cand);
            f_best = fc;
            box = wider;
        }
        sol.box_doublings = d + 1;
        if (!improves) break;
    }

    sol.b_star = best;
    sol.f_star = f_best;
    sol.certificate = feasible(best, problem);
    sol.search_box = box;
    if (!sol.certificate.feasible)
        throw NumericError("optimize_noise: incumbent is infeasible (" + sol.certificate.reason + ")");
    return sol;
}

}  // namespace dprls
