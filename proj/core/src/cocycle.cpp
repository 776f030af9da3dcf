#include "nuhlab/cocycle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nuhlab/errors.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::cocycle {

namespace {

constexpr double kSingularDet = 1e-14;

// Orientation-free representative of a line direction.
Vec2 canonical(Vec2 v) {
    v = normalized(v);
    if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = -v;
    return v;
}

Vec2 random_frame(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double a = angle(rng);
    return {std::cos(a), std::sin(a)};
}

void require_length(long n) {
    if (n < 1000) throw std::invalid_argument("Lyapunov estimates need n >= 1000 steps");
}

}  // namespace

LyapunovEstimate lyapunov_from_jacobians(const std::function<RealMatrix2()>& next_jacobian, long n,
                                         Vec2 initial_frame, const QrOptions& opt) {
    if (n < opt.batches) throw std::invalid_argument("too few steps for batch means");
    Vec2 q = normalized(initial_frame);
    std::vector<double> top, bottom;
    top.reserve(static_cast<std::size_t>(n));
    bottom.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < opt.burn_in + n; ++k) {
        const RealMatrix2 m = next_jacobian();
        const double det = std::abs(m.det());
        if (!(det > kSingularDet) || !m.finite())
            throw SingularJacobian("|det df| = " + std::to_string(det) + " at step " + std::to_string(k));
        const Vec2 w = m * q;
        const double r11 = norm(w);
        q = w / r11;
        if (k < opt.burn_in) continue;
        const double l11 = std::log(r11);
        top.push_back(l11);
        bottom.push_back(std::log(det) - l11);
    }
    const auto a = stats::batch_means(top, opt.batches);
    const auto b = stats::batch_means(bottom, opt.batches);
    LyapunovEstimate out;
    out.n_iter = n;
    out.exponents = {a.mean, b.mean};
    out.halfwidths = {a.halfwidth, b.halfwidth};
    if (out.exponents[1] > out.exponents[0]) {
        std::swap(out.exponents[0], out.exponents[1]);
        std::swap(out.halfwidths[0], out.halfwidths[1]);
    }
    out.ci_halfwidth = std::max(out.halfwidths[0], out.halfwidths[1]);
    out.mean_log_det = a.mean + b.mean;
    return out;
}

LyapunovEstimate lyapunov_qr(const maps::TorusEndo& map, maps::TorusPoint start, long n,
                             std::mt19937_64& rng, const QrOptions& opt) {
    require_length(n);
    maps::TorusPoint p = start;
    const auto step = [&] {
        const RealMatrix2 j = map.jacobian(p);
        p = map.apply(p);
        return j;
    };
    return lyapunov_from_jacobians(step, n, random_frame(rng), opt);
}

LyapunovEstimate lyapunov_qr(const maps::VianaMap& map, maps::CylinderPoint start, long n,
                             std::mt19937_64& rng, const QrOptions& opt) {
    require_length(n);
    const Vec2 frame = random_frame(rng);
    maps::VianaOrbit orbit(map, start, rng);
    const auto step = [&] {
        const RealMatrix2 j = map.jacobian(orbit.point());
        orbit.advance();
        return j;
    };
    return lyapunov_from_jacobians(step, n, frame, opt);
}

LyapunovEstimate lyapunov_qr(const billiard::BilliardTable& table, billiard::CollisionState start,
                             long n, std::mt19937_64& rng, const QrOptions& opt) {
    require_length(n);
    billiard::CollisionState s = start;
    const auto step = [&] {
        const billiard::Collision c = billiard::collide(table, s);
        const RealMatrix2 j = billiard::derivative(table, s, c.next, c.tau);
        s = c.next;
        return j;
    };
    return lyapunov_from_jacobians(step, n, random_frame(rng), opt);
}

Vec2 unstable_direction(const maps::TorusEndo& map, const maps::PreOrbit& preorbit, double tol) {
    const std::size_t n = preorbit.depth();
    if (n < 20) throw DepthTooSmall("pre-orbit depth " + std::to_string(n) + " is below 20");
    const Vec2 generic = normalized(Vec2{1.0, 0.7548776662466927});
    const auto push_from = [&](std::size_t depth) {
        Vec2 v = generic;
        for (std::size_t k = depth; k >= 1; --k) v = normalized(map.jacobian(preorbit.branch[k]) * v);
        return v;
    };
    const Vec2 full = push_from(n);
    const Vec2 shorter = push_from(n - 1);
    const double change = line_angle(full, shorter);
    if (change > tol)
        throw DepthTooSmall("direction still moves by " + std::to_string(change) + " rad at depth " +
                            std::to_string(n));
    return canonical(full);
}

Vec2 stable_direction(const std::vector<RealMatrix2>& jacobians, double min_gap) {
    if (jacobians.empty()) throw NoGap("empty Jacobian product");
    RealMatrix2 prod = RealMatrix2::identity();
    double log_scale = 0.0;
    double log_det = 0.0;
    for (const RealMatrix2& j : jacobians) {
        const double det = std::abs(j.det());
        if (!(det > 0.0)) throw SingularJacobian("singular step in stable-direction product");
        log_det += std::log(det);
        prod = j * prod;
        const double s = prod.max_abs();
        prod = prod * (1.0 / s);
        log_scale += std::log(s);
    }
    // Top eigenpair of the symmetric matrix prod^T prod.
    const RealMatrix2 g = prod.transposed() * prod;
    const double half_tr = 0.5 * (g.a + g.d);
    const double mu = half_tr + std::hypot(0.5 * (g.a - g.d), g.b);
    const double log_gap = 2.0 * (log_scale + 0.5 * std::log(mu)) - log_det;
    if (log_gap < std::log(min_gap))
        throw NoGap("singular values differ by a factor " + std::to_string(std::exp(log_gap)) +
                    " < " + std::to_string(min_gap));
    const Vec2 e1{g.b, mu - g.a};
    const Vec2 e2{mu - g.d, g.b};
    const Vec2 top = norm(e1) >= norm(e2) ? e1 : e2;
    return canonical(perp(top));
}

Vec2 stable_direction(const maps::TorusEndo& map, maps::TorusPoint x, int n, double min_gap) {
    std::vector<RealMatrix2> js;
    js.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int k = 0; k < n; ++k) {
        js.push_back(map.jacobian(x));
        x = map.apply(x);
    }
    return stable_direction(js, min_gap);
}

Vec2 stable_direction(const billiard::BilliardTable& table, billiard::CollisionState x, int n,
                      double min_gap) {
    std::vector<RealMatrix2> js;
    js.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int k = 0; k < n; ++k) {
        const auto c = billiard::collide(table, x);
        js.push_back(billiard::derivative(table, x, c.next, c.tau));
        x = c.next;
    }
    return stable_direction(js, min_gap);
}

double unstable_slope(const billiard::BilliardTable& table, const billiard::CollisionState& x, int depth) {
    std::vector<billiard::CollisionState> past{x};
    std::vector<double> taus;
    for (int k = 0; k < depth; ++k) {
        const auto c = billiard::collide_backward(table, past.back());
        past.push_back(c.next);
        taus.push_back(c.tau);
    }
    double v = table.disc(past.back().disc).curvature();
    for (int k = depth; k >= 1; --k) {
        const auto& from = past[static_cast<std::size_t>(k)];
        const auto& to = past[static_cast<std::size_t>(k - 1)];
        v = billiard::push_slope(billiard::derivative(table, from, to, taus[static_cast<std::size_t>(k - 1)]), v);
    }
    return v;
}

double geometric_potential(const billiard::BilliardTable& table, const billiard::CollisionState& x, int depth) {
    if (std::cos(x.phi) < 1e-12) throw NearGrazing("potential undefined at a grazing state");
    const double v = unstable_slope(table, x, depth);
    const auto c = billiard::collide(table, x);
    return -std::log(billiard::p_metric_expansion(table, x, v, c.tau));
}

PesinEstimate pesin_entropy_estimate(const maps::TorusEndo& map, maps::TorusPoint start, long n,
                                     std::mt19937_64& rng, const QrOptions& opt) {
    if (!map.volume_preserving())
        throw NotVolumePreserving("the entropy formula is stated for volume-preserving maps");
    PesinEstimate out;
    out.lyapunov = lyapunov_qr(map, start, n, rng, opt);
    const double lower = out.lyapunov.exponents[1];
    const double hw = out.lyapunov.halfwidths[1];
    if (std::abs(lower) <= hw)
        throw NotHyperbolic("lower exponent " + std::to_string(lower) + " +- " + std::to_string(hw) +
                            " is not separated from zero");
    out.log_degree = std::log(double(map.degree()));
    out.entropy = out.log_degree + std::abs(lower);
    out.ci_halfwidth = hw;
    return out;
}

}  // namespace nuhlab::cocycle
