#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nuhlab::stats {

struct MeanCI {
    double mean = 0.0;
    double halfwidth = 0.0;  // 95% two-sided
};

/// Two-sided 97.5% Student t quantile.
double student_t975(int dof);

/// Non-overlapping batch means; the trailing remainder is folded into the last batch.
MeanCI batch_means(std::span<const double> xs, int batches = 20);

/// Sample mean with the normal-approximation 95% interval of the mean.
MeanCI mean_ci(std::span<const double> xs);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x values.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

struct BirkhoffTail {
    double mean = 0.0;         // S_n / n
    double cauchy_tail = 0.0;  // max |S_k / k - S_n / n| over n / 10 <= k <= n
    long n = 0;
};

/// Running-mean convergence over the last decade of a sequence.
BirkhoffTail birkhoff_tail(std::span<const double> xs);

/// Linear-interpolated quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> xs, double q);

/// Per-sample generator: the stream depends only on (seed, index), never on scheduling.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

}  // namespace nuhlab::stats
