#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nuhlab/maps.hpp"

namespace nuhlab::cocycle {

struct PlissResult {
    std::vector<long> times;
    double density = 0.0;      // count / window length
    double delta_bound = 0.0;  // eps / (alpha2 + eps - alpha1)
    double window_average = 0.0;
    bool hypothesis_violated = false;  // window average above alpha2
};

/// Finite-window Pliss times: indices 0 <= m < L such that
///   (a_m + ... + a_{n-1}) / (n - m) <= alpha2 + eps   for every m < n <= L.
/// Requires alpha1 < alpha2, eps > 0 and every a_i > alpha1.
PlissResult pliss_times(std::span<const double> seq, double alpha1, double alpha2, double eps);

/// True iff a_0 + ... + a_{n-1} < -n chi / 2 for all 1 <= n <= N.
bool z_chi_test(std::span<const double> log_expansion, double chi, int N);

/// Log-expansions log |df_{x_k} e_k|, k < N, along the forward orbit, where e_k is the stable
/// direction at x_k obtained by pulling a vector back from 40 steps past the window.
/// Throws NoGap when two pulled-back seeds disagree (no dominated splitting).
std::vector<double> center_log_expansions(const maps::TorusEndo& map, maps::TorusPoint x, int N);

struct FractionEstimate {
    double fraction = 0.0;
    double ci_halfwidth = 0.0;  // 95% normal approximation
    long samples = 0;
    long passed = 0;
    long skipped = 0;  // no splitting detected at the sample
};

/// Monte-Carlo frequency of z_chi_test over uniform points of the torus.
FractionEstimate z_chi_fraction(const maps::TorusEndo& map, double chi, int N, long samples,
                                std::uint64_t seed, int workers = 1);

}  // namespace nuhlab::cocycle
