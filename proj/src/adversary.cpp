#include "dprls/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dprls/error.hpp"
#include "dprls/stability.hpp"

namespace dprls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kWindowTol = 1e-9;

double circle_distance(double angle) {
    double r = std::fmod(angle, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return std::min(r, kTwoPi - r);
}

}  // namespace

bool ResonantSequence::selected(std::size_t k) const {
    return std::binary_search(k_indices.begin(), k_indices.end(), k);
}

ResonantSequence resonant_sequence(const ArxModel& model, std::size_t T) {
    return resonant_sequence(model.a(), T);
}

ResonantSequence resonant_sequence(std::span<const double> a, std::size_t T) {
    if (T < 1) throw ArgumentError("resonant_sequence: T must be at least 1");
    const auto cert = certify(a);
    if (cert.stable)
        throw ConstructionImpossible(
            "resonant_sequence: all characteristic roots lie outside the closed unit disk; the system is "
            "asymptotically stable and Laplace perturbation can be calibrated");
    if (cert.roots.empty()) throw ConstructionImpossible("resonant_sequence: no characteristic roots");

    ResonantSequence seq;
    seq.ar.assign(a.begin(), a.end());
    seq.z0 = cert.roots.front();  // sorted by modulus
    const std::complex<double> mu = 1.0 / seq.z0;
    seq.r = std::abs(mu);
    seq.beta = std::arg(mu);
    if (seq.beta < 0.0) seq.beta += kTwoPi;
    // Snap numerically real roots so that beta = 0 or pi exactly.
    if (std::fabs(mu.imag()) <= 1e-12 * seq.r) seq.beta = mu.real() > 0.0 ? 0.0 : std::numbers::pi;

    // First window: smallest n0 with dist(n0 beta, 2 pi Z) < pi / 2. n0 <= 4
    // always exists since beta, 2beta, 3beta, 4beta cannot all avoid it.
    for (int n = 1;; ++n) {
        const double d = circle_distance(n * seq.beta);
        if (d < std::numbers::pi / 2.0) {
            seq.n0 = n;
            seq.alpha0 = d;
            break;
        }
    }
    seq.gamma = std::cos(seq.alpha0);

    seq.delta_seq.resize(T + 1);
    for (std::size_t k = 0; k <= T; ++k) {
        const double kk = static_cast<double>(k);
        seq.delta_seq[k] = 2.0 * std::pow(seq.r, kk) * std::cos(kk * seq.beta);
        if (!std::isfinite(seq.delta_seq[k]))
            throw ArgumentError("resonant_sequence: Delta_k overflows at k = " + std::to_string(k));
    }
    for (std::size_t k = static_cast<std::size_t>(seq.n0); k <= T; k += static_cast<std::size_t>(seq.n0))
        if (circle_distance(static_cast<double>(k) * seq.beta) <= seq.alpha0 + kWindowTol) seq.k_indices.push_back(k);
    return seq;
}

std::string_view pair_kind_name(PairKind k) {
    return k == PairKind::output_pair ? "output-pair" : "input-pair";
}

std::vector<double> AdjacentPair::output_difference(std::size_t T2) const {
    std::vector<double> x(T2, 0.0);
    const std::size_t p = ar.size();
    // Input increment d_k = shifted - base for k < t1 (input pairs).
    auto d_in = [&](long k) -> double {
        if (kind != PairKind::input_pair || k < 0 || static_cast<std::size_t>(k) >= t1) return 0.0;
        return shifted[k] - base[k];
    };
    for (std::size_t k = 1; k <= T2; ++k) {
        if (kind == PairKind::output_pair && k <= t1) {
            x[k - 1] = shifted[k - 1] - base[k - 1];
            continue;
        }
        double v = 0.0;
        for (std::size_t j = 1; j <= p && j < k; ++j) v += ar[j - 1] * x[k - 1 - j];
        for (std::size_t l = 1; l <= taps.size(); ++l) v += taps[l - 1] * d_in(static_cast<long>(k) - static_cast<long>(l));
        x[k - 1] = v;
    }
    return x;
}

AdjacentPair adjacent_output_pair(const ResonantSequence& seq, std::span<const double> y_base, std::size_t T1,
                                  double delta_adj) {
    if (T1 < seq.p() || T1 < 1) throw ArgumentError("adjacent_output_pair: T1 must be at least p and at least 1");
    if (T1 > seq.horizon()) throw ArgumentError("adjacent_output_pair: T1 exceeds the resonant sequence length");
    if (y_base.size() != T1) throw ArgumentError("adjacent_output_pair: y_base must have length T1");
    if (!(delta_adj > 0.0)) throw ArgumentError("adjacent_output_pair: delta must be positive");

    AdjacentPair pair;
    pair.kind = PairKind::output_pair;
    pair.t1 = T1;
    pair.delta_adj = delta_adj;
    pair.ar = seq.ar;
    pair.base.assign(y_base.begin(), y_base.end());
    for (std::size_t k = 1; k <= T1; ++k) pair.v_l1 += std::fabs(seq.delta_seq[k]);
    if (!(pair.v_l1 > 0.0)) throw ConstructionImpossible("adjacent_output_pair: v1 vanishes");
    pair.direction.resize(T1);
    pair.shifted.resize(T1);
    for (std::size_t k = 1; k <= T1; ++k) {
        pair.direction[k - 1] = seq.delta_seq[k] / pair.v_l1;
        pair.shifted[k - 1] = pair.base[k - 1] + delta_adj * pair.direction[k - 1];
    }
    pair.observed = seq.k_indices;
    return pair;
}

AdjacentPair adjacent_input_pair(const ResonantSequence& seq, const ArxModel& model, std::size_t i, std::size_t T1,
                                 double delta_adj, std::span<const double> u_base) {
    const std::size_t p = seq.p();
    if (i >= model.m()) throw ArgumentError("adjacent_input_pair: participant index out of range");
    if (T1 < p || T1 < 1) throw ArgumentError("adjacent_input_pair: T1 must be at least p and at least 1");
    if (u_base.size() != T1) throw ArgumentError("adjacent_input_pair: u_base must have length T1");
    if (!(delta_adj > 0.0)) throw ArgumentError("adjacent_input_pair: delta must be positive");
    const auto& taps = model.b()[i];
    if (taps[0] == 0.0) throw ConstructionImpossible("adjacent_input_pair: b_{i,1} = 0, the input cannot steer y");

    // d_k = 0 for k < T1 - p; x_{T1-p+j} = Delta_j for j = 1..p.
    const std::size_t s = T1 - p;
    std::vector<double> d(T1, 0.0);
    std::vector<double> x(T1 + 1, 0.0);  // x[k] = x_k
    for (std::size_t j = 1; j <= p; ++j) {
        const std::size_t k = s + j - 1;  // d_k drives x_{k+1}
        double rest = 0.0;
        for (std::size_t l = 1; l <= p; ++l)
            if (k + 1 >= l + 1) rest += seq.ar[l - 1] * x[k + 1 - l];
        for (std::size_t l = 2; l <= taps.size(); ++l)
            if (k + 1 >= l) rest += taps[l - 1] * d[k + 1 - l];
        d[k] = (seq.delta_seq[j] - rest) / taps[0];
        x[k + 1] = seq.delta_seq[j];
    }

    AdjacentPair pair;
    pair.kind = PairKind::input_pair;
    pair.t1 = T1;
    pair.participant = i;
    pair.delta_adj = delta_adj;
    pair.ar = seq.ar;
    pair.taps = taps;
    pair.base.assign(u_base.begin(), u_base.end());
    for (double v : d) pair.v_l1 += std::fabs(v);
    if (!(pair.v_l1 > 0.0)) throw ConstructionImpossible("adjacent_input_pair: v2 vanishes");
    pair.direction.resize(T1);
    pair.shifted.resize(T1);
    for (std::size_t k = 0; k < T1; ++k) {
        pair.direction[k] = d[k] / pair.v_l1;
        pair.shifted[k] = pair.base[k] + delta_adj * pair.direction[k];
    }
    for (std::size_t k : seq.k_indices) pair.observed.push_back(k + s);
    return pair;
}

AdjacentPair output_pair_from_direction(std::span<const double> ar, std::span<const double> y_base,
                                        std::span<const double> direction, double delta_adj) {
    if (y_base.size() != direction.size() || y_base.empty())
        throw ArgumentError("output_pair_from_direction: base and direction lengths differ");
    AdjacentPair pair;
    pair.kind = PairKind::output_pair;
    pair.t1 = y_base.size();
    pair.delta_adj = delta_adj;
    pair.ar.assign(ar.begin(), ar.end());
    pair.base.assign(y_base.begin(), y_base.end());
    double l1 = 0.0;
    for (double v : direction) l1 += std::fabs(v);
    if (!(l1 > 0.0)) throw ArgumentError("output_pair_from_direction: zero direction");
    pair.v_l1 = l1;
    for (std::size_t k = 0; k < direction.size(); ++k) {
        pair.direction.push_back(direction[k] / l1);
        pair.shifted.push_back(pair.base[k] + delta_adj * pair.direction.back());
    }
    return pair;
}

DistinguishingResult distinguishing_ratio(const AdjacentPair& pair, double b0, std::size_t T2) {
    if (!(b0 > 0.0)) throw ArgumentError("distinguishing_ratio: b0 must be positive");
    if (T2 < pair.t1) throw ArgumentError("distinguishing_ratio: T2 must be at least T1");
    const auto x = pair.output_difference(T2);
    DistinguishingResult res;
    auto visit = [&](std::size_t k) {
        // Half-line event {ybar_k <= y_k} (or its mirror when x_k < 0): the
        // Laplace density ratio is exp(|x_k| / b0) on the event.
        const double term = std::fabs(x[k - 1]) / b0;
        res.log_ratio += term;
        res.single_index_log_ratio = term;
        ++res.n_selected;
        res.trajectory.push_back(res.log_ratio);
    };
    if (pair.observed.empty()) {
        for (std::size_t k = 1; k <= T2; ++k) visit(k);
    } else {
        for (std::size_t k : pair.observed)
            if (k >= 1 && k <= T2) visit(k);
    }
    res.base_probability = 0.5;
    res.shifted_probability = 0.5 * std::exp(-res.single_index_log_ratio);
    return res;
}

CrossingReport first_crossing(const AdjacentPair& pair, double b0, double epsilon, std::size_t T2_max) {
    if (T2_max < pair.t1) throw ArgumentError("first_crossing: T2_max must be at least T1");
    const auto x = pair.output_difference(T2_max);
    CrossingReport rep;
    std::size_t next_obs = 0;
    for (std::size_t k = 1; k <= T2_max; ++k) {
        bool observed = pair.observed.empty();
        while (!observed && next_obs < pair.observed.size() && pair.observed[next_obs] < k) ++next_obs;
        if (!observed && next_obs < pair.observed.size() && pair.observed[next_obs] == k) observed = true;
        if (!observed) continue;
        rep.exponent += std::fabs(x[k - 1]) / b0;
        ++rep.n_required;
        if (k >= pair.t1 && rep.exponent >= epsilon) {
            rep.found = true;
            rep.t2 = k;
            return rep;
        }
    }
    return rep;
}

double proof_count_bound(const AdjacentPair& pair, double gamma, double b0, double epsilon) {
    return pair.v_l1 * b0 * epsilon / (2.0 * pair.delta_adj * gamma);
}

double geometric_count_bound(const AdjacentPair& pair, double r, double b0, double epsilon) {
    const double target = pair.v_l1 * b0 * epsilon / (2.0 * pair.delta_adj);
    if (r <= 1.0 + 1e-12) return target;
    // sum_{k=1}^n r^k = r (r^n - 1) / (r - 1) >= target
    return std::log1p(target * (r - 1.0) / r) / std::log(r);
}

}  // namespace dprls
