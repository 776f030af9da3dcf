#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nuhlab/maps.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::preimage {

struct TreeOptions {
    long budget = 1'000'000;  // maximum number of depth-N leaves
    int workers = 1;          // parallel over first-level preimages
};

/// A depth-N branch y with f^N(y) = x: its mu^-_x weight |det df^N_y|^{-1} and the pull-back
/// (df^N_y)^{-1}, which maps vectors at x to vectors at y.
struct Leaf {
    maps::TorusPoint y;
    double weight = 1.0;
    RealMatrix2 pullback;
};

/// All deg^N leaves in depth-first order (first-level preimage order, then recursively).
/// Throws BudgetExceeded when deg^N exceeds the budget.
std::vector<Leaf> preimage_leaves(const maps::TorusEndo& map, maps::TorusPoint x, int N,
                                  const TreeOptions& opt = {});

struct TreeSummary {
    long leaves = 0;
    double weight_sum = 0.0;
    double max_roundtrip_error = 0.0;  // torus distance of f^N(leaf) to x, evaluated in long double
};
TreeSummary preimage_tree_summary(const maps::TorusEndo& map, maps::TorusPoint x, int N,
                                  const TreeOptions& opt = {});

/// I(x, v, f^N) = sum over leaves of weight * log |(df^N_y)^{-1} v|.
double backward_functional(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, int N,
                           const TreeOptions& opt = {});

struct FunctionalRow {
    maps::TorusPoint x;
    Vec2 v;
    int N = 0;
    double value = 0.0;  // I(x, v, f^N)
};

struct CLowerEstimate {
    double value = 0.0;  // min over the sample of I / N; a sampled infimum, not a certified bound
    maps::TorusPoint argmin_x;
    Vec2 argmin_v;
    int N = 0;
    std::vector<FunctionalRow> rows;
};

/// Grid points ((i + 1/2) / g, (j + 1/2) / g) and directions at angles pi k / m.
CLowerEstimate c_lower_estimate(const maps::TorusEndo& map, int grid, int directions, int N,
                                const TreeOptions& opt = {});

/// Mean of log |(df^N)^{-1} v| over sampled pre-orbits, with a 95% interval.
stats::MeanCI monte_carlo_functional(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, int N,
                                     long samples, std::uint64_t seed, int workers = 1);

/// Exact s-moment: sum over leaves of weight * |(df^N_y)^{-1} v|^{-s}.
double backward_moment(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, double s, int N,
                       const TreeOptions& opt = {});

struct MomentRow {
    int N = 0;
    double moment = 0.0;
    double log_moment = 0.0;
};

struct MomentReport {
    double s = 0.0;
    std::vector<MomentRow> rows;
    double chi_hat = 0.0;    // minus the least-squares slope of log moment against N
    bool monotone = false;   // strictly decreasing along the (sorted) N list
};

/// s must lie in [0, 0.5].
MomentReport moment_bound_check(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v, double s,
                                std::vector<int> N_list, const TreeOptions& opt = {});

struct TailFit {
    std::vector<double> eta_grid;
    std::vector<double> empirical_cdf;
    double beta_hat = 0.0;
    double A_hat = 0.0;
    std::pair<double, double> ci;  // 95% bootstrap percentile interval for beta
    long samples = 0;
    long used = 0;
    long unconverged = 0;  // pre-orbits whose unstable direction failed the depth test
};

struct TailOptions {
    double tail_fraction = 0.2;
    int bootstrap = 200;
    int workers = 1;
};

/// Angles between E and E^u over M sampled pre-orbits of x. Throws DegenerateTail when fewer than
/// 50 angles fall below max(eta_grid) or the lower tail has no spread.
TailFit angle_tail_experiment(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 E, long M, int depth,
                              std::vector<double> eta_grid, std::uint64_t seed, const TailOptions& opt = {});

struct HyperbolicTimeStats {
    int depth = 0;
    long samples = 0;
    std::vector<long> histogram;         // index n0 in [1, depth + 1]; slot 0 unused
    std::vector<double> tail_frequency;  // P(n0 > n), n = 0..depth
    long censored = 0;                   // samples with n0 = depth + 1
    double tail_slope = 0.0;             // least-squares slope of log P(n0 > n) where positive
    bool slope_available = false;
    std::vector<double> size_proxy;      // exp(-n0) per sample, the unstable-size surrogate
};

/// n0 is the smallest index with |(df^n)^{-1} v|^{-s} < exp(-n chi_bar) for every n0 <= n <= depth.
HyperbolicTimeStats hyperbolic_time_stats(const maps::TorusEndo& map, maps::TorusPoint x, Vec2 v,
                                          double chi_bar, double s, long M, int depth,
                                          std::uint64_t seed, int workers = 1);

}  // namespace nuhlab::preimage
