#include "nuhlab/viana.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nuhlab/errors.hpp"
#include "nuhlab/maps.hpp"

namespace nuhlab::maps {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double preperiodic_quadratic_parameter() {
    // g(a) = q_a^2(0) + p(a); g(1.5) > 0 > g(1.6).
    const auto g = [](double a) { return a - a * a + (std::sqrt(1.0 + 4.0 * a) - 1.0) / 2.0; };
    double lo = 1.5, hi = 1.6;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

Interval find_invariant_interval(double a0, double alpha, double margin) {
    // Fiber image of S^1 x [lo, hi] is [a0 - alpha - max t^2, a0 + alpha - min t^2].
    const auto image = [&](Interval j) {
        const double max_sq = std::max(j.lo * j.lo, j.hi * j.hi);
        const double min_sq = (j.lo <= 0.0 && 0.0 <= j.hi) ? 0.0 : std::min(j.lo * j.lo, j.hi * j.hi);
        return Interval{a0 - alpha - max_sq, a0 + alpha - min_sq};
    };
    // Start from the critical values and grow the hull until it is forward invariant.
    Interval j{a0 - alpha, a0 + alpha};
    for (int it = 0; it < 1000; ++it) {
        const Interval img = image(j);
        const Interval next{std::min(j.lo, img.lo), std::max(j.hi, img.hi)};
        if (next.lo == j.lo && next.hi == j.hi) break;
        j = next;
        if (j.lo < -2.0 || j.hi > 2.0) throw InvalidMap("fiber hull escapes (-2, 2); alpha too large");
    }
    Interval I0{j.lo - margin, j.hi + margin};
    for (int it = 0; it < 1000; ++it) {
        const Interval img = image(I0);
        if (img.lo >= I0.lo + margin && img.hi <= I0.hi - margin) break;
        I0.lo = std::min(I0.lo, img.lo - margin);
        I0.hi = std::max(I0.hi, img.hi + margin);
    }
    if (I0.lo <= -2.0 || I0.hi >= 2.0) throw InvalidMap("no invariant interval inside (-2, 2)");
    return I0;
}

VianaMap::VianaMap(double a0, int d, double alpha, Interval I0)
    : a0_(a0), d_(d), alpha_(alpha), I0_(I0) {
    if (!(a0 > 1.0 && a0 < 2.0)) throw InvalidMap("Viana parameter a0 must lie in (1, 2)");
    if (d < 2) throw InvalidMap("Viana degree d must be >= 2");
    if (!(alpha > 0.0)) throw InvalidMap("Viana coupling alpha must be positive");
    if (!(I0.lo < I0.hi) || I0.lo <= -2.0 || I0.hi >= 2.0)
        throw InvalidMap("I0 must be a nondegenerate interval inside (-2, 2)");
    if (!(invariance_margin(1000) > 0.0))
        throw InvalidMap("S^1 x I0 is not mapped into its interior");
}

VianaMap VianaMap::with_defaults(int d, double alpha) {
    const double a0 = preperiodic_quadratic_parameter();
    return VianaMap(a0, d, alpha, find_invariant_interval(a0, alpha, 0.05));
}

CylinderPoint VianaMap::apply(CylinderPoint p) const {
    return {reduce_mod1(double(d_) * p.theta), a0_ + alpha_ * std::sin(kTwoPi * p.theta) - p.t * p.t};
}

RealMatrix2 VianaMap::jacobian(CylinderPoint p) const {
    return {double(d_), 0.0, kTwoPi * alpha_ * std::cos(kTwoPi * p.theta), -2.0 * p.t};
}

std::vector<CylinderPoint> VianaMap::preimages(CylinderPoint p) const {
    std::vector<CylinderPoint> out;
    for (int j = 0; j < d_; ++j) {
        const double theta = (p.theta + double(j)) / double(d_);
        const double radicand = a0_ + alpha_ * std::sin(kTwoPi * theta) - p.t;
        if (radicand < 0.0) continue;
        const double root = std::sqrt(radicand);
        if (I0_.contains(root)) out.push_back({theta, root});
        if (root > 0.0 && I0_.contains(-root)) out.push_back({theta, -root});
    }
    return out;
}

double VianaMap::invariance_margin(int n_theta) const {
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_theta; ++i) {
        const double theta = (double(i) + 0.5) / double(n_theta);
        for (double t : {I0_.lo, I0_.hi, 0.0}) {
            const double img = apply({theta, t}).t;
            margin = std::min({margin, img - I0_.lo, I0_.hi - img});
        }
    }
    return margin;
}

VianaOrbit::VianaOrbit(const VianaMap& map, CylinderPoint start, std::mt19937_64& rng)
    : map_(&map), rng_(&rng), t_(start.t) {
    theta_bits_ = static_cast<std::uint64_t>(std::ldexp(reduce_mod1(start.theta), 64));
}

CylinderPoint VianaOrbit::point() const {
    return {std::ldexp(static_cast<double>(theta_bits_ >> 11), -53), t_};
}

void VianaOrbit::advance() {
    const CylinderPoint p = point();
    t_ = map_->apply(p).t;
    std::uniform_int_distribution<std::uint64_t> low(0, static_cast<std::uint64_t>(map_->d()) - 1);
    theta_bits_ = theta_bits_ * static_cast<std::uint64_t>(map_->d()) + low(*rng_);
}

stats::BirkhoffTail viana_adaptedness(const VianaMap& map, CylinderPoint start, long n, std::mt19937_64& rng) {
    VianaOrbit orbit(map, start, rng);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(std::max(n, 0L)));
    for (long k = 0; k < n; ++k) {
        orbit.advance();
        terms.push_back(std::abs(std::log(std::abs(orbit.point().t))));
    }
    return stats::birkhoff_tail(terms);
}

}  // namespace nuhlab::maps
