#pragma once

// Necessity constructions for unstable autoregressions: an adjacent pair of
// sensitive sequences whose output difference grows along a homogeneous
// solution Delta_k = 2 r^k cos(k beta), and the analytic Laplace likelihood
// ratio of half-line events built on it.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "dprls/arx_model.hpp"

namespace dprls {

struct ResonantSequence {
    std::complex<double> z0;  // smallest-modulus characteristic root, |z0| <= 1
    double r = 1.0;           // |1/z0|
    double beta = 0.0;        // arg(1/z0) in [0, 2 pi)
    int n0 = 1;               // first multiple with n0 beta inside the pi/2 window
    double alpha0 = 0.0;      // dist(n0 beta, 2 pi Z)
    double gamma = 1.0;       // cos(alpha0)
    std::vector<double> ar;   // a_1..a_p
    std::vector<double> delta_seq;        // delta_seq[k] = Delta_k, k = 0..T
    std::vector<std::size_t> k_indices;   // selected k in 1..T, increasing

    std::size_t p() const { return ar.size(); }
    std::size_t horizon() const { return delta_seq.empty() ? 0 : delta_seq.size() - 1; }
    bool selected(std::size_t k) const;
};

// Throws ConstructionImpossible for a stable model.
ResonantSequence resonant_sequence(const ArxModel& model, std::size_t T);
ResonantSequence resonant_sequence(std::span<const double> a, std::size_t T);

enum class PairKind { output_pair, input_pair };
std::string_view pair_kind_name(PairKind k);

struct AdjacentPair {
    PairKind kind = PairKind::output_pair;
    std::vector<double> base;
    std::vector<double> shifted;
    std::vector<double> direction;  // v / ||v||_1
    double delta_adj = 0.0;
    double v_l1 = 0.0;              // ||v||_1 before normalisation
    std::size_t t1 = 0;
    std::size_t participant = 0;    // input pairs only

    // Linear response data: AR part, and the input taps of the perturbed
    // participant (input pairs only).
    std::vector<double> ar;
    std::vector<double> taps;
    // Observation indices (in output time k >= 1) on which the half-line
    // events are placed, increasing. Empty means every index.
    std::vector<std::size_t> observed;

    // y'_k - y_k for k = 1..T2 under zero system noise; entry k-1 is x_k.
    std::vector<double> output_difference(std::size_t T2) const;
};

AdjacentPair adjacent_output_pair(const ResonantSequence& seq, std::span<const double> y_base, std::size_t T1,
                                  double delta_adj);

// u_base is u_{i,0..T1-1}; i is zero-based.
AdjacentPair adjacent_input_pair(const ResonantSequence& seq, const ArxModel& model, std::size_t i, std::size_t T1,
                                 double delta_adj, std::span<const double> u_base);

// Pair from an arbitrary L1-normalised output prefix perturbation; every
// index is observed. Used for the stable-model comparison.
AdjacentPair output_pair_from_direction(std::span<const double> ar, std::span<const double> y_base,
                                        std::span<const double> direction, double delta_adj);

struct DistinguishingResult {
    double log_ratio = 0.0;         // sum over observed k <= T2 of |x_k| / b0
    std::size_t n_selected = 0;
    double base_probability = 0.5;  // P(ybar_k <= y_k) under the base sequence
    // Single-index event at the last observed index: P under the shifted
    // sequence, 0.5 exp(-|x_k| / b0).
    double shifted_probability = 0.5;
    double single_index_log_ratio = 0.0;
    std::vector<double> trajectory;  // cumulative exponent after each observed index
};

DistinguishingResult distinguishing_ratio(const AdjacentPair& pair, double b0, std::size_t T2);

struct CrossingReport {
    bool found = false;
    std::size_t t2 = 0;           // first horizon with exponent >= epsilon
    std::size_t n_required = 0;   // observed indices used up to t2
    double exponent = 0.0;
};

CrossingReport first_crossing(const AdjacentPair& pair, double b0, double epsilon, std::size_t T2_max);

// n >= ||v||_1 b0 eps / (2 delta gamma): index count sufficient when r = 1.
double proof_count_bound(const AdjacentPair& pair, double gamma, double b0, double epsilon);
// Same inversion with the geometric growth r^k kept (beta = 0 only).
double geometric_count_bound(const AdjacentPair& pair, double r, double b0, double epsilon);

}  // namespace dprls
