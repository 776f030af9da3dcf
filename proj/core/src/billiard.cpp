#include "nuhlab/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nuhlab/errors.hpp"

namespace nuhlab::billiard {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kDiscriminantGuard = 1e-14;
constexpr double kMinFlight = 1e-12;
constexpr double kNearGrazingCos = 1e-12;

double wrap_arclength(double r, double perimeter) {
    double w = std::fmod(r, perimeter);
    if (w < 0.0) w += perimeter;
    if (w >= perimeter) w = 0.0;
    return w;
}

// Earliest hit along the ray p + s v, 0 < s <= bound, over the given translate lists.
template <class ShiftsFor>
std::optional<Collision> earliest_hit(const BilliardTable& table, const CollisionState& state,
                                      double bound, ShiftsFor&& shifts_for) {
    const Vec2 p = table.position(state);
    const Vec2 v = table.velocity(state);
    double best = std::numeric_limits<double>::infinity();
    int best_disc = -1;
    LatticeShift best_shift;
    Vec2 best_center;
    for (int j = 0; j < table.size(); ++j) {
        const Disc& dj = table.disc(j);
        for (const LatticeShift& T : shifts_for(state.disc, j)) {
            const Vec2 c = dj.center + table.lattice().at(T.m, T.n);
            const Vec2 w = p - c;
            const double b = dot(w, v);
            if (b >= 0.0) continue;  // moving away from this copy
            const double cc = dot(w, w) - dj.radius * dj.radius;
            const double disc = b * b - cc;
            if (disc < -kDiscriminantGuard) continue;
            const double s = -b - std::sqrt(std::max(disc, 0.0));
            if (s <= kMinFlight || s > bound || s >= best) continue;
            best = s;
            best_disc = j;
            best_shift = T;
            best_center = c;
        }
    }
    if (best_disc < 0) return std::nullopt;
    const Vec2 q = p + v * best;
    const Vec2 n1 = normalized(q - best_center);
    const Vec2 v1 = v - n1 * (2.0 * dot(v, n1));
    Collision out;
    out.next = table.state_at(best_disc, n1, v1);
    out.tau = best;
    out.shift = best_shift;
    return out;
}

void require_non_grazing(const CollisionState& s) {
    if (!(std::abs(s.phi) < kHalfPi))
        throw GrazingInput("|phi| = " + std::to_string(std::abs(s.phi)) + " is not below pi/2");
}

}  // namespace

double Lattice::hexagonal_site_spacing() { return std::sqrt(2.0 / (3.0 * std::sqrt(3.0))); }

Lattice Lattice::hexagonal_three_site() {
    const double s = hexagonal_site_spacing();
    const double h = std::sqrt(3.0) * s;
    return {{1.5 * s, h / 2.0}, {0.0, h}};
}

double Disc::perimeter() const { return 2.0 * kPi * radius; }

BilliardTable::BilliardTable(std::vector<Disc> discs, double tau_max, Lattice lattice)
    : discs_(std::move(discs)), lattice_(lattice), tau_max_(tau_max) {
    if (discs_.empty()) throw InvalidTable("table needs at least one disc");
    if (!(lattice_.covolume() > 0.0)) throw InvalidTable("lattice basis is degenerate");
    if (!(tau_max_ > 0.0) || !std::isfinite(tau_max_)) throw InvalidTable("tau_max must be positive");
    k_min_ = std::numeric_limits<double>::infinity();
    k_max_ = 0.0;
    for (const Disc& d : discs_) {
        if (!(d.radius > 0.0) || !std::isfinite(d.center.x) || !std::isfinite(d.center.y))
            throw InvalidTable("disc radius must be positive and center finite");
        k_min_ = std::min(k_min_, d.curvature());
        k_max_ = std::max(k_max_, d.curvature());
    }
    const double cell_diameter = norm(lattice_.b1) + norm(lattice_.b2);
    tau_min_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        for (int j = 0; j < size(); ++j) {
            for (const LatticeShift& T : reachable_shifts(i, j, cell_diameter)) {
                if (i == j && T.zero()) continue;
                const Vec2 c = disc(j).center + lattice_.at(T.m, T.n);
                const double gap = norm(c - disc(i).center) - disc(i).radius - disc(j).radius;
                if (!(gap > 0.0))
                    throw InvalidTable("discs " + std::to_string(i) + " and " + std::to_string(j) +
                                       " overlap (translates included)");
                tau_min_ = std::min(tau_min_, gap);
            }
        }
    }
    flight_shifts_.resize(discs_.size() * discs_.size());
    for (int i = 0; i < size(); ++i)
        for (int j = 0; j < size(); ++j) {
            auto shifts = reachable_shifts(i, j, tau_max_);
            if (i == j) std::erase_if(shifts, [](const LatticeShift& T) { return T.zero(); });
            flight_shifts_[static_cast<std::size_t>(i * size() + j)] = std::move(shifts);
        }
}

std::vector<LatticeShift> BilliardTable::reachable_shifts(int i, int j, double bound) const {
    const RealMatrix2 basis{lattice_.b1.x, lattice_.b2.x, lattice_.b1.y, lattice_.b2.y};
    const RealMatrix2 inv = basis.inverse();
    const Vec2 d0 = disc(j).center - disc(i).center;
    const double reach = bound + disc(i).radius + disc(j).radius;
    const Vec2 base = inv * d0;
    const double rm = std::hypot(inv.a, inv.b) * reach;
    const double rn = std::hypot(inv.c, inv.d) * reach;
    std::vector<LatticeShift> out;
    const long m_lo = static_cast<long>(std::floor(-base.x - rm)) - 1;
    const long m_hi = static_cast<long>(std::ceil(-base.x + rm)) + 1;
    const long n_lo = static_cast<long>(std::floor(-base.y - rn)) - 1;
    const long n_hi = static_cast<long>(std::ceil(-base.y + rn)) + 1;
    for (long m = m_lo; m <= m_hi; ++m)
        for (long n = n_lo; n <= n_hi; ++n)
            if (norm(d0 + lattice_.at(m, n)) <= reach) out.push_back({m, n});
    return out;
}

BilliardTable BilliardTable::with_validated_horizon(int n_rays) const {
    const HorizonReport report = finite_horizon_check(*this, n_rays);
    if (!report.passed)
        throw InvalidTable("finite-horizon check failed: worst free path " +
                           std::to_string(report.worst_free_path) + " exceeds tau_max " +
                           std::to_string(tau_max_));
    BilliardTable out = *this;
    out.horizon_validated_ = true;
    return out;
}

Vec2 BilliardTable::outward_normal(const CollisionState& s) const {
    const double theta = s.r / disc(s.disc).radius;
    return {std::cos(theta), std::sin(theta)};
}

Vec2 BilliardTable::position(const CollisionState& s) const {
    const Disc& d = disc(s.disc);
    return d.center + outward_normal(s) * d.radius;
}

Vec2 BilliardTable::velocity(const CollisionState& s) const {
    const Vec2 n = outward_normal(s);
    return n * std::cos(s.phi) + perp(n) * std::sin(s.phi);
}

CollisionState BilliardTable::state_at(int disc_index, Vec2 normal, Vec2 v) const {
    const Disc& d = disc(disc_index);
    const double theta = std::atan2(normal.y, normal.x);
    CollisionState s;
    s.disc = disc_index;
    s.r = wrap_arclength(theta * d.radius, d.perimeter());
    s.phi = std::atan2(dot(v, perp(normal)), dot(v, normal));
    return s;
}

std::optional<Collision> cast_ray(const BilliardTable& table, const CollisionState& state, double bound) {
    require_non_grazing(state);
    if (bound <= table.tau_max())
        return earliest_hit(table, state, bound,
                            [&](int i, int j) -> const std::vector<LatticeShift>& { return table.flight_shifts(i, j); });
    return earliest_hit(table, state, bound, [&](int i, int j) {
        auto shifts = table.reachable_shifts(i, j, bound);
        if (i == j) std::erase_if(shifts, [](const LatticeShift& T) { return T.zero(); });
        return shifts;
    });
}

Collision collide(const BilliardTable& table, const CollisionState& state) {
    auto hit = cast_ray(table, state, table.tau_max());
    if (!hit)
        throw HorizonExceeded("no collision within tau_max = " + std::to_string(table.tau_max()));
    return *hit;
}

Collision collide_backward(const BilliardTable& table, const CollisionState& state) {
    Collision c = collide(table, reversed(state));
    c.next = reversed(c.next);
    return c;
}

RealMatrix2 derivative(const BilliardTable& table, const CollisionState& from,
                       const CollisionState& to, double tau) {
    const double K = table.disc(from.disc).curvature();
    const double K1 = table.disc(to.disc).curvature();
    const double c = std::cos(from.phi);
    const double c1 = std::cos(to.phi);
    if (c1 < kNearGrazingCos)
        throw NearGrazing("cos(phi') = " + std::to_string(c1) + " below 1e-12");
    const double k = -1.0 / c1;
    return RealMatrix2{tau * K + c, tau, tau * K * K1 + K * c1 + K1 * c, tau * K1 + c1} * k;
}

double push_slope(const RealMatrix2& m, double slope) {
    double dr, dphi;
    if (std::isinf(slope)) {
        dr = m.b;
        dphi = m.d;
    } else {
        dr = m.a + m.b * slope;
        dphi = m.c + m.d * slope;
    }
    if (dr == 0.0) return std::numeric_limits<double>::infinity();
    return dphi / dr;
}

bool cone_membership(const BilliardTable& table, const CollisionState& state, double slope,
                     ConeKind kind, double tau) {
    if (!std::isfinite(slope)) return false;
    const double K = table.disc(state.disc).curvature();
    const double width = std::cos(state.phi) / tau;
    if (kind == ConeKind::Unstable) return K <= slope && slope <= K + width;
    return -K - width <= slope && slope <= -K;
}

double p_metric_expansion(const BilliardTable& table, const CollisionState& state, double slope,
                          double tau) {
    const double K = table.disc(state.disc).curvature();
    return 1.0 + tau * (K + slope) / std::cos(state.phi);
}

double min_expansion_Lambda(const BilliardTable& table) {
    if (table.size() < 2)
        throw InvalidTable("a dispersing table needs at least two scatterers");
    return 1.0 + 2.0 * table.tau_min() * table.k_min();
}

double singularity_distance(const BilliardTable& table, const CollisionState& state) {
    const double here = kHalfPi - std::abs(state.phi);
    if (!(here > 0.0)) return 0.0;
    const Collision next = collide(table, state);
    return std::min(here, kHalfPi - std::abs(next.next.phi));
}

HorizonReport finite_horizon_check(const BilliardTable& table, int n_rays) {
    if (n_rays < 1000) throw std::invalid_argument("finite_horizon_check needs n_rays >= 1000");
    const double bound = std::max(20.0 * table.tau_max(), 20.0);
    const int nd = table.size();
    std::vector<std::vector<LatticeShift>> shifts(static_cast<std::size_t>(nd * nd));
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
            auto s = table.reachable_shifts(i, j, bound);
            if (i == j) std::erase_if(s, [](const LatticeShift& T) { return T.zero(); });
            shifts[static_cast<std::size_t>(i * nd + j)] = std::move(s);
        }
    const int per_disc = (n_rays + nd - 1) / nd;
    const int n_pos = static_cast<int>(std::ceil(std::sqrt(double(per_disc))));
    const int n_dir = (per_disc + n_pos - 1) / n_pos;
    HorizonReport report;
    for (int i = 0; i < nd; ++i) {
        const double perim = table.disc(i).perimeter();
        for (int a = 0; a < n_pos; ++a) {
            for (int b = 0; b < n_dir; ++b) {
                const CollisionState s{i, perim * (double(a) + 0.5) / n_pos,
                                       -kHalfPi + kPi * (double(b) + 0.5) / n_dir};
                const auto hit = earliest_hit(table, s, bound,
                    [&](int p, int q) -> const std::vector<LatticeShift>& {
                        return shifts[static_cast<std::size_t>(p * nd + q)];
                    });
                ++report.rays;
                if (!hit) {
                    ++report.escaped;
                    report.worst_free_path = std::numeric_limits<double>::infinity();
                } else {
                    report.worst_free_path = std::max(report.worst_free_path, hit->tau);
                }
            }
        }
    }
    report.passed = report.worst_free_path <= table.tau_max();
    return report;
}

std::vector<Collision> trajectory(const BilliardTable& table, const CollisionState& start, long n) {
    std::vector<Collision> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 0L)));
    CollisionState s = start;
    for (long k = 0; k < n; ++k) {
        out.push_back(collide(table, s));
        s = out.back().next;
    }
    return out;
}

InvariantReport check_invariants(const BilliardTable& table, const CollisionState& start, long n) {
    InvariantReport rep;
    rep.Lambda = min_expansion_Lambda(table);
    rep.min_expansion = std::numeric_limits<double>::infinity();
    rep.min_flight = std::numeric_limits<double>::infinity();
    CollisionState s = start;
    double tau_prev = 0.0;
    for (long k = 0; k < n; ++k) {
        const Collision c = collide(table, s);
        const RealMatrix2 J = derivative(table, s, c.next, c.tau);
        rep.max_det_error = std::max(rep.max_det_error, std::abs(J.det() * std::cos(c.next.phi) / std::cos(s.phi) - 1.0));

        const Collision back = collide_backward(table, c.next);
        const double per = table.disc(s.disc).perimeter();
        double dr = std::remainder(back.next.r - s.r, per);
        if (back.next.disc != s.disc) dr = std::numeric_limits<double>::infinity();
        rep.max_reversal_error = std::max(rep.max_reversal_error, std::hypot(dr, back.next.phi - s.phi));

        if (k > 0) {
            const double K = table.disc(s.disc).curvature();
            const double w = std::cos(s.phi) / tau_prev;
            for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const double V = K + f * w;
                ++rep.cone_checks;
                if (!cone_membership(table, c.next, push_slope(J, V), ConeKind::Unstable, c.tau)) ++rep.cone_violations;
                rep.min_expansion = std::min(rep.min_expansion, p_metric_expansion(table, s, V, c.tau));
            }
        }
        rep.min_flight = std::min(rep.min_flight, c.tau);
        rep.max_flight = std::max(rep.max_flight, c.tau);
        tau_prev = c.tau;
        s = c.next;
        ++rep.steps;
    }
    return rep;
}

stats::BirkhoffTail billiard_adaptedness(const BilliardTable& table, const CollisionState& start, long n) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(std::max(n, 0L)));
    double here = kHalfPi - std::abs(start.phi);
    CollisionState s = start;
    for (long k = 0; k < n; ++k) {
        s = collide(table, s).next;
        const double next = kHalfPi - std::abs(s.phi);
        terms.push_back(std::abs(std::log(std::min(here, next))));
        here = next;
    }
    return stats::birkhoff_tail(terms);
}

}  // namespace nuhlab::billiard
