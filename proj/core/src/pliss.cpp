#include "nuhlab/pliss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nuhlab/cocycle.hpp"
#include "nuhlab/errors.hpp"
#include "nuhlab/parallel.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::cocycle {

PlissResult pliss_times(std::span<const double> seq, double alpha1, double alpha2, double eps) {
    if (!(alpha1 < alpha2)) throw std::invalid_argument("Pliss times need alpha1 < alpha2");
    if (!(eps > 0.0)) throw std::invalid_argument("Pliss times need eps > 0");
    for (double a : seq)
        if (!(a > alpha1)) throw std::invalid_argument("every entry must exceed alpha1");
    PlissResult out;
    out.delta_bound = eps / (alpha2 + eps - alpha1);
    const long L = static_cast<long>(seq.size());
    if (L == 0) return out;
    // S(n) = sum_{i<n} (a_i - alpha2 - eps); m is a Pliss time iff S(m) >= max_{m<n<=L} S(n).
    std::vector<double> S(static_cast<std::size_t>(L) + 1, 0.0);
    double total = 0.0;
    for (long i = 0; i < L; ++i) {
        total += seq[static_cast<std::size_t>(i)];
        S[static_cast<std::size_t>(i) + 1] = S[static_cast<std::size_t>(i)] + (seq[static_cast<std::size_t>(i)] - alpha2 - eps);
    }
    double best_after = S[static_cast<std::size_t>(L)];
    for (long m = L - 1; m >= 0; --m) {
        if (S[static_cast<std::size_t>(m)] >= best_after) out.times.push_back(m);
        best_after = std::max(best_after, S[static_cast<std::size_t>(m)]);
    }
    std::reverse(out.times.begin(), out.times.end());
    out.density = double(out.times.size()) / double(L);
    out.window_average = total / double(L);
    out.hypothesis_violated = out.window_average > alpha2;
    return out;
}

bool z_chi_test(std::span<const double> log_expansion, double chi, int N) {
    if (N < 0 || static_cast<std::size_t>(N) > log_expansion.size())
        throw std::invalid_argument("sequence shorter than the requested horizon N");
    double s = 0.0;
    for (int n = 1; n <= N; ++n) {
        s += log_expansion[static_cast<std::size_t>(n - 1)];
        if (!(s < -double(n) * chi / 2.0)) return false;
    }
    return true;
}

std::vector<double> center_log_expansions(const maps::TorusEndo& map, maps::TorusPoint x, int N) {
    constexpr int kLookahead = 40;
    std::vector<RealMatrix2> jac;
    jac.reserve(static_cast<std::size_t>(N + kLookahead));
    for (int k = 0; k < N + kLookahead; ++k) {
        jac.push_back(map.jacobian(x));
        x = map.apply(x);
    }
    // Pulling back contracts every direction onto E^s; two seeds that end apart mean no splitting.
    const auto pull_back = [&](Vec2 u, std::vector<double>* logs) {
        for (int k = N + kLookahead - 1; k >= 0; --k) {
            const Vec2 w = solve(jac[static_cast<std::size_t>(k)], u);
            const double g = norm(w);
            if (logs && k < N) (*logs)[static_cast<std::size_t>(k)] = -std::log(g);
            u = w / g;
        }
        return u;
    };
    std::vector<double> out(static_cast<std::size_t>(N));
    const Vec2 a = pull_back(normalized(Vec2{1.0, 0.7548776662466927}), &out);
    const Vec2 b = pull_back(normalized(Vec2{-0.3, 1.0}), nullptr);
    if (std::abs(cross(a, b)) > 1e-6) throw NoGap("pulled-back directions did not converge to a stable direction");
    return out;
}

FractionEstimate z_chi_fraction(const maps::TorusEndo& map, double chi, int N, long samples,
                                std::uint64_t seed, int workers) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    // 0 = failed, 1 = passed, 2 = skipped
    std::vector<int> outcome(static_cast<std::size_t>(samples), 0);
    parallel_for(outcome.size(), workers, [&](std::size_t i) {
        auto rng = stats::sample_rng(seed, i);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double px = u(rng);
        const double py = u(rng);
        try {
            outcome[i] = z_chi_test(center_log_expansions(map, maps::TorusPoint::reduced(px, py), N), chi, N) ? 1 : 0;
        } catch (const NoGap&) {
            outcome[i] = 2;
        }
    });
    FractionEstimate out;
    for (int o : outcome) {
        if (o == 2) {
            ++out.skipped;
            continue;
        }
        ++out.samples;
        out.passed += o;
    }
    if (out.samples > 0) {
        const double p = double(out.passed) / double(out.samples);
        out.fraction = p;
        out.ci_halfwidth = 1.959964 * std::sqrt(p * (1.0 - p) / double(out.samples));
    }
    return out;
}

}  // namespace nuhlab::cocycle
