#include "nuhlab/maps.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nuhlab/errors.hpp"

namespace nuhlab::maps {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSnap = 1e-12;

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Returns g = gcd(a, b) >= 0 with u a + v b = g.
std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& u, std::int64_t& v) {
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        const std::int64_t q = old_r / r;
        old_r = old_r - q * r; std::swap(old_r, r);
        old_s = old_s - q * s; std::swap(old_s, s);
        old_t = old_t - q * t; std::swap(old_t, t);
    }
    if (old_r < 0) {
        old_r = -old_r; old_s = -old_s; old_t = -old_t;
    }
    u = old_s;
    v = old_t;
    return old_r;
}

Vec2 apply_int(const IntMatrix2& m, Vec2 v) { return m.to_real() * v; }

using Ld = long double;
constexpr Ld kTwoPiL = 2.0L * std::numbers::pi_v<Ld>;

Ld reduce_mod1_ext(Ld v) {
    const Ld r = v - std::floor(v);
    return r >= 1.0L ? 0.0L : r;
}

TorusPointX reduced_ext(Ld x, Ld y) { return {reduce_mod1_ext(x), reduce_mod1_ext(y)}; }

TorusPointX apply_int_ext(const IntMatrix2& m, TorusPointX p) {
    return {Ld(m.e11) * p.x + Ld(m.e12) * p.y, Ld(m.e21) * p.x + Ld(m.e22) * p.y};
}

Ld shear_value_ext(const ShearFunction& s, Ld x) {
    Ld v = 0.0L;
    for (std::size_t k = 0; k < s.sine_coeffs().size(); ++k)
        v += Ld(s.sine_coeffs()[k]) * std::sin(kTwoPiL * Ld(k + 1) * x);
    for (std::size_t k = 0; k < s.cosine_coeffs().size(); ++k)
        v += Ld(s.cosine_coeffs()[k]) * std::cos(kTwoPiL * Ld(k + 1) * x);
    return v;
}

Ld circle_lift_ext(const CircleMap& g, Ld x) {
    return Ld(g.degree) * x + Ld(g.amplitude) / kTwoPiL * std::sin(kTwoPiL * x);
}

std::vector<Ld> circle_preimages_ext(const CircleMap& g, Ld y) {
    const std::int64_t k = g.degree;
    const std::int64_t m_lo = k > 0 ? 0 : k;
    const std::int64_t m_hi = k > 0 ? k - 1 : -1;
    std::vector<Ld> out;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
        const Ld target = y + Ld(m);
        Ld lo = 0.0L, hi = 1.0L;
        for (int it = 0; it < 200; ++it) {
            const Ld mid = 0.5L * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if ((k > 0) == (circle_lift_ext(g, mid) < target)) lo = mid; else hi = mid;
        }
        out.push_back(reduce_mod1_ext(0.5L * (lo + hi)));
    }
    return out;
}

}  // namespace

double reduce_mod1(double v) {
    double r = v - std::floor(v);
    if (r >= 1.0 - kSnap) r = 0.0;
    return r;
}

TorusPoint TorusPointX::rounded() const {
    return TorusPoint::reduced(static_cast<double>(x), static_cast<double>(y));
}

long double torus_distance(TorusPointX a, TorusPointX b) {
    Ld dx = a.x - b.x;
    Ld dy = a.y - b.y;
    dx -= std::round(dx);
    dy -= std::round(dy);
    return std::hypot(dx, dy);
}

double torus_distance(TorusPoint a, TorusPoint b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    dx -= std::round(dx);
    dy -= std::round(dy);
    return std::hypot(dx, dy);
}

ShearFunction::ShearFunction(std::vector<double> sine_coeffs, std::vector<double> cosine_coeffs)
    : sin_(std::move(sine_coeffs)), cos_(std::move(cosine_coeffs)) {
    for (double c : sin_)
        if (!std::isfinite(c)) throw InvalidMap("shear coefficients must be finite");
    for (double c : cos_)
        if (!std::isfinite(c)) throw InvalidMap("shear coefficients must be finite");
}

double ShearFunction::value(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < sin_.size(); ++k) s += sin_[k] * std::sin(kTwoPi * double(k + 1) * x);
    for (std::size_t k = 0; k < cos_.size(); ++k) s += cos_[k] * std::cos(kTwoPi * double(k + 1) * x);
    return s;
}

double ShearFunction::derivative(double x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < sin_.size(); ++k) {
        const double w = kTwoPi * double(k + 1);
        s += sin_[k] * w * std::cos(w * x);
    }
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        const double w = kTwoPi * double(k + 1);
        s -= cos_[k] * w * std::sin(w * x);
    }
    return s;
}

double CircleMap::apply(double x) const {
    return reduce_mod1(double(degree) * x + amplitude / kTwoPi * std::sin(kTwoPi * x));
}

double CircleMap::derivative(double x) const {
    return double(degree) + amplitude * std::cos(kTwoPi * x);
}

std::vector<double> CircleMap::preimages(double y) const {
    // The lift G(x) = k x + a/(2pi) sin(2pi x) is monotone on [0, 1] with G(0) = 0, G(1) = k,
    // so each target y + m inside that range has exactly one root.
    const auto lift = [this](double x) {
        return double(degree) * x + amplitude / kTwoPi * std::sin(kTwoPi * x);
    };
    const std::int64_t k = degree;
    const std::int64_t m_lo = k > 0 ? 0 : k;
    const std::int64_t m_hi = k > 0 ? k - 1 : -1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::abs(k)));
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
        const double target = y + double(m);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double g = lift(mid) - target;
            if ((k > 0) == (g < 0.0)) lo = mid; else hi = mid;
        }
        out.push_back(reduce_mod1(0.5 * (lo + hi)));
    }
    return out;
}

std::vector<std::array<std::int64_t, 2>> coset_representatives(const IntMatrix2& E) {
    const std::int64_t det = E.det();
    if (det == 0) throw InvalidMap("linear part must have nonzero determinant");
    // Column operations on E: bring the first row to (g, 0). The lattice E Z^2 is then spanned
    // by the columns of [[g, 0], [b, c]] with c = det / g.
    std::int64_t u = 0, v = 0;
    std::int64_t g = extended_gcd(E.e11, E.e12, u, v);
    std::int64_t b = 0, c = 0;
    if (g == 0) {
        throw CosetEnumerationFailure("first row of E vanishes");
    }
    b = E.e21 * u + E.e22 * v;
    c = (E.e22 * E.e11 - E.e21 * E.e12) / g;
    if (c < 0) c = -c;
    b = floor_mod(b, c);
    std::vector<std::array<std::int64_t, 2>> reps;
    reps.reserve(static_cast<std::size_t>(g * c));
    for (std::int64_t i = 0; i < g; ++i)
        for (std::int64_t j = 0; j < c; ++j) reps.push_back({i, j});
    if (static_cast<std::int64_t>(reps.size()) != std::abs(det))
        throw CosetEnumerationFailure("found " + std::to_string(reps.size()) +
                                      " coset representatives, expected |det E| = " +
                                      std::to_string(std::abs(det)));
    return reps;
}

TorusEndo::TorusEndo(Family family) : family_(std::move(family)) {
    if (auto* lin = std::get_if<LinearEndo>(&family_)) {
        cosets_ = coset_representatives(lin->E);
        degree_ = std::abs(lin->E.det());
        e_inverse_ = lin->E.to_real().inverse();
    } else if (auto* sh = std::get_if<ShearedEndo>(&family_)) {
        const auto pdet = sh->P.det();
        if (pdet != 1 && pdet != -1) throw InvalidMap("conjugacy P must have det +-1");
        if (!std::isfinite(sh->t)) throw InvalidMap("shear parameter t must be finite");
        cosets_ = coset_representatives(sh->E);
        degree_ = std::abs(sh->E.det());
        e_inverse_ = sh->E.to_real().inverse();
    } else {
        const auto& pr = std::get<ProductEndo>(family_);
        for (const CircleMap* g : {&pr.horizontal, &pr.vertical}) {
            if (g->degree == 0) throw InvalidMap("circle factor must have nonzero degree");
            if (!(std::abs(g->amplitude) < std::abs(double(g->degree))))
                throw InvalidMap("circle factor needs |amplitude| < |degree| to be a covering");
        }
        degree_ = std::abs(pr.horizontal.degree * pr.vertical.degree);
        volume_preserving_ = pr.horizontal.amplitude == 0.0 && pr.vertical.amplitude == 0.0;
    }
}

std::string_view TorusEndo::family_name() const {
    switch (family_.index()) {
        case 0: return "linear";
        case 1: return "sheared";
        default: return "product";
    }
}

IntMatrix2 TorusEndo::linear_part() const {
    if (auto* lin = std::get_if<LinearEndo>(&family_)) return lin->E;
    if (auto* sh = std::get_if<ShearedEndo>(&family_)) return sh->E;
    const auto& pr = std::get<ProductEndo>(family_);
    return {pr.horizontal.degree, 0, 0, pr.vertical.degree};
}

TorusPoint TorusEndo::apply(TorusPoint p) const {
    if (auto* lin = std::get_if<LinearEndo>(&family_)) {
        return TorusPoint::reduced(apply_int(lin->E, p.vec()));
    }
    if (auto* sh = std::get_if<ShearedEndo>(&family_)) {
        const TorusPoint z = TorusPoint::reduced(apply_int(unimodular_inverse(sh->P), p.vec()));
        const TorusPoint zs = TorusPoint::reduced(z.x, z.y + sh->t * sh->shear.value(z.x));
        const TorusPoint w = TorusPoint::reduced(apply_int(sh->P, zs.vec()));
        return TorusPoint::reduced(apply_int(sh->E, w.vec()));
    }
    const auto& pr = std::get<ProductEndo>(family_);
    return {pr.horizontal.apply(p.x), pr.vertical.apply(p.y)};
}

RealMatrix2 TorusEndo::jacobian(TorusPoint p) const {
    if (auto* lin = std::get_if<LinearEndo>(&family_)) return lin->E.to_real();
    if (auto* sh = std::get_if<ShearedEndo>(&family_)) {
        const IntMatrix2 pinv = unimodular_inverse(sh->P);
        const TorusPoint z = TorusPoint::reduced(apply_int(pinv, p.vec()));
        const RealMatrix2 dh{1.0, 0.0, sh->t * sh->shear.derivative(z.x), 1.0};
        return sh->E.to_real() * sh->P.to_real() * dh * pinv.to_real();
    }
    const auto& pr = std::get<ProductEndo>(family_);
    return {pr.horizontal.derivative(p.x), 0.0, 0.0, pr.vertical.derivative(p.y)};
}

std::vector<TorusPoint> TorusEndo::preimages(TorusPoint p) const {
    std::vector<TorusPoint> out;
    out.reserve(static_cast<std::size_t>(degree_));
    if (auto* pr = std::get_if<ProductEndo>(&family_)) {
        const auto xs = pr->horizontal.preimages(p.x);
        const auto ys = pr->vertical.preimages(p.y);
        for (double x : xs)
            for (double y : ys) out.push_back({x, y});
        return out;
    }
    const ShearedEndo* sh = std::get_if<ShearedEndo>(&family_);
    for (const auto& k : cosets_) {
        const Vec2 lifted{p.x + double(k[0]), p.y + double(k[1])};
        const TorusPoint w = TorusPoint::reduced(e_inverse_ * lifted);
        if (!sh) {
            out.push_back(w);
            continue;
        }
        const TorusPoint zs = TorusPoint::reduced(apply_int(unimodular_inverse(sh->P), w.vec()));
        const TorusPoint z = TorusPoint::reduced(zs.x, zs.y - sh->t * sh->shear.value(zs.x));
        out.push_back(TorusPoint::reduced(apply_int(sh->P, z.vec())));
    }
    return out;
}

TorusPointX TorusEndo::apply_extended(TorusPointX p) const {
    if (auto* lin = std::get_if<LinearEndo>(&family_)) {
        const TorusPointX w = apply_int_ext(lin->E, p);
        return reduced_ext(w.x, w.y);
    }
    if (auto* sh = std::get_if<ShearedEndo>(&family_)) {
        TorusPointX z = apply_int_ext(unimodular_inverse(sh->P), p);
        z = reduced_ext(z.x, z.y);
        const TorusPointX zs = reduced_ext(z.x, z.y + Ld(sh->t) * shear_value_ext(sh->shear, z.x));
        const TorusPointX w = apply_int_ext(sh->E, apply_int_ext(sh->P, zs));
        return reduced_ext(w.x, w.y);
    }
    const auto& pr = std::get<ProductEndo>(family_);
    return reduced_ext(circle_lift_ext(pr.horizontal, p.x), circle_lift_ext(pr.vertical, p.y));
}

std::vector<TorusPointX> TorusEndo::preimages_extended(TorusPointX p) const {
    std::vector<TorusPointX> out;
    out.reserve(static_cast<std::size_t>(degree_));
    if (auto* pr = std::get_if<ProductEndo>(&family_)) {
        const auto xs = circle_preimages_ext(pr->horizontal, p.x);
        const auto ys = circle_preimages_ext(pr->vertical, p.y);
        for (Ld x : xs)
            for (Ld y : ys) out.push_back({x, y});
        return out;
    }
    const ShearedEndo* sh = std::get_if<ShearedEndo>(&family_);
    const IntMatrix2 E = sh ? sh->E : std::get<LinearEndo>(family_).E;
    const Ld det = Ld(E.det());
    for (const auto& k : cosets_) {
        // E^-1 = adj(E) / det, applied exactly in integer-coefficient form
        const TorusPointX lifted{p.x + Ld(k[0]), p.y + Ld(k[1])};
        const TorusPointX w = reduced_ext((Ld(E.e22) * lifted.x - Ld(E.e12) * lifted.y) / det,
                                          (Ld(E.e11) * lifted.y - Ld(E.e21) * lifted.x) / det);
        if (!sh) {
            out.push_back(w);
            continue;
        }
        TorusPointX zs = apply_int_ext(unimodular_inverse(sh->P), w);
        zs = reduced_ext(zs.x, zs.y);
        const TorusPointX z = reduced_ext(zs.x, zs.y - Ld(sh->t) * shear_value_ext(sh->shear, zs.x));
        const TorusPointX y = apply_int_ext(sh->P, z);
        out.push_back(reduced_ext(y.x, y.y));
    }
    return out;
}

AcsMatrixReport validate_acs_matrix(const IntMatrix2& E) {
    AcsMatrixReport r;
    r.det = E.det();
    r.gcd = std::gcd(std::gcd(E.e11, E.e12), std::gcd(E.e21, E.e22));
    r.not_homothety = !(E.e12 == 0 && E.e21 == 0 && E.e11 == E.e22);
    const std::int64_t tr = E.trace();
    // char poly l^2 - tr l + det evaluated at +1 and -1
    r.no_unit_eigenvalue = (1 - tr + r.det) != 0 && (1 + tr + r.det) != 0;
    r.det_over_gcd_above_four = r.gcd != 0 && std::abs(r.det) > 4 * r.gcd;
    const double disc = double(tr) * double(tr) - 4.0 * double(r.det);
    const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
    r.eigenvalue_1 = (double(tr) + root) / 2.0;
    r.eigenvalue_2 = (double(tr) - root) / 2.0;
    return r;
}

}  // namespace nuhlab::maps
