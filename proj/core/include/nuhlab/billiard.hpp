#pragma once

#include <compare>
#include <optional>
#include <vector>

#include "nuhlab/linalg.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::billiard {

/// Lattice of the torus R^2 / (Z b1 + Z b2).
struct Lattice {
    Vec2 b1{1.0, 0.0};
    Vec2 b2{0.0, 1.0};

    static Lattice unit_square() { return {}; }
    /// Hexagonal lattice of unit covolume containing three triangular-lattice sites per cell:
    /// b1 = (3s/2, sqrt(3) s/2), b2 = (0, sqrt(3) s) with s = sqrt(2 / (3 sqrt 3)).
    static Lattice hexagonal_three_site();
    /// Nearest-neighbour spacing s of the triangular sites for hexagonal_three_site().
    static double hexagonal_site_spacing();

    double covolume() const { return std::abs(cross(b1, b2)); }
    Vec2 at(long m, long n) const { return b1 * double(m) + b2 * double(n); }
};

/// Integer translate (m, n) of the fundamental cell.
struct LatticeShift {
    long m = 0;
    long n = 0;
    constexpr auto operator<=>(const LatticeShift&) const = default;
    constexpr LatticeShift operator+(LatticeShift o) const { return {m + o.m, n + o.n}; }
    constexpr LatticeShift operator-(LatticeShift o) const { return {m - o.m, n - o.n}; }
    constexpr LatticeShift operator-() const { return {-m, -n}; }
    constexpr bool zero() const { return m == 0 && n == 0; }
};

struct Disc {
    Vec2 center;
    double radius = 0.1;
    double curvature() const { return 1.0 / radius; }
    double perimeter() const;
};

/// Phase point on the collision space: disc index, counter-clockwise arclength r along that
/// disc, and the post-collision angle phi between the outgoing velocity and the outward normal,
/// measured counter-clockwise. Grazing iff |phi| = pi/2.
struct CollisionState {
    int disc = 0;
    double r = 0.0;
    double phi = 0.0;
};

/// Result of one free flight: the next phase point, the flight time, and the lattice translate
/// of the disc that was hit, relative to the cell of the departing disc.
struct Collision {
    CollisionState next;
    double tau = 0.0;
    LatticeShift shift;
};

/// Dispersing scatterer configuration on a lattice torus. Construction checks that all discs
/// (including their lattice translates) are pairwise disjoint. Immutable afterwards; the
/// finite-horizon flag is only set through with_validated_horizon().
class BilliardTable {
public:
    BilliardTable(std::vector<Disc> discs, double tau_max, Lattice lattice = Lattice::unit_square());

    const std::vector<Disc>& discs() const { return discs_; }
    const Disc& disc(int i) const { return discs_.at(static_cast<std::size_t>(i)); }
    int size() const { return static_cast<int>(discs_.size()); }
    const Lattice& lattice() const { return lattice_; }
    double tau_max() const { return tau_max_; }
    /// Smallest gap between two scatterers (translates included); the shortest free flight.
    double tau_min() const { return tau_min_; }
    double k_min() const { return k_min_; }
    double k_max() const { return k_max_; }
    bool finite_horizon_validated() const { return horizon_validated_; }

    /// Runs finite_horizon_check and returns a copy flagged as validated.
    /// Throws InvalidTable if the check fails.
    BilliardTable with_validated_horizon(int n_rays) const;

    Vec2 position(const CollisionState& s) const;
    Vec2 outward_normal(const CollisionState& s) const;
    Vec2 velocity(const CollisionState& s) const;
    /// Phase point on disc i where the outward unit normal is `normal`, leaving with velocity v.
    CollisionState state_at(int disc, Vec2 normal, Vec2 velocity) const;

    /// Translates T with |c_j + T - c_i| <= bound + R_i + R_j, i.e. copies of disc j that a
    /// ray of length <= bound leaving disc i can reach.
    std::vector<LatticeShift> reachable_shifts(int i, int j, double bound) const;
    const std::vector<LatticeShift>& flight_shifts(int i, int j) const {
        return flight_shifts_[static_cast<std::size_t>(i * size() + j)];
    }

private:
    std::vector<Disc> discs_;
    Lattice lattice_;
    double tau_max_;
    double tau_min_ = 0.0;
    double k_min_ = 0.0;
    double k_max_ = 0.0;
    bool horizon_validated_ = false;
    std::vector<std::vector<LatticeShift>> flight_shifts_;
};

/// Time reversal (r, phi) -> (r, -phi).
inline CollisionState reversed(const CollisionState& s) { return {s.disc, s.r, -s.phi}; }

/// Earliest collision within the given flight bound, if any. Throws GrazingInput on grazing input.
std::optional<Collision> cast_ray(const BilliardTable& table, const CollisionState& state, double bound);

/// One step of the billiard map: the next collision within tau_max.
/// Throws GrazingInput if |phi| = pi/2, HorizonExceeded if nothing is hit within tau_max.
Collision collide(const BilliardTable& table, const CollisionState& state);

/// One step of the inverse billiard map, via time reversal.
Collision collide_backward(const BilliardTable& table, const CollisionState& state);

/// One-step derivative d(r', phi') / d(r, phi). det = cos(phi) / cos(phi').
/// Throws NearGrazing if cos(phi') < 1e-12.
RealMatrix2 derivative(const BilliardTable& table, const CollisionState& from,
                       const CollisionState& to, double tau);

/// Image of a tangent slope dphi/dr under a one-step derivative; +infinity stands for vertical.
double push_slope(const RealMatrix2& m, double slope);

enum class ConeKind { Stable, Unstable };

/// Unstable cone: K <= slope <= K + cos(phi) / tau_prev, where tau_prev is the flight into
/// the state. Stable cone: -K - cos(phi) / tau_next <= slope <= -K, tau_next the flight out.
bool cone_membership(const BilliardTable& table, const CollisionState& state, double slope,
                     ConeKind kind, double tau);

/// Expansion factor, in the p-metric |cos(phi) dr|, of a tangent vector of slope V at state
/// under the flight of length tau: 1 + tau (K + V) / cos(phi).
double p_metric_expansion(const BilliardTable& table, const CollisionState& state, double slope,
                          double tau);

/// Lambda = 1 + 2 tau_min K_min, the uniform expansion of unstable-cone vectors in the p-metric.
/// Throws InvalidTable for tables with fewer than two discs.
double min_expansion_Lambda(const BilliardTable& table);

/// Angle-gap proxy for the distance to the singular set: min(pi/2 - |phi|, pi/2 - |phi'|) where
/// phi' is the angle at the next collision. Not a metric distance.
double singularity_distance(const BilliardTable& table, const CollisionState& state);

struct HorizonReport {
    bool passed = false;
    double worst_free_path = 0.0;  // +infinity if some ray escaped the probe bound
    long rays = 0;
    long escaped = 0;
};

/// Heuristic finite-horizon certificate: casts rays from a grid of boundary points and
/// directions and records the longest free path (probe bound max(20 tau_max, 20)).
/// Fails if any observed path exceeds tau_max. Requires n_rays >= 1000.
HorizonReport finite_horizon_check(const BilliardTable& table, int n_rays);

struct InvariantReport {
    long steps = 0;
    double max_det_error = 0.0;  // max |det df * cos(phi') / cos(phi) - 1|
    long cone_checks = 0;
    long cone_violations = 0;    // pushed unstable-cone slopes landing outside the next cone
    double min_expansion = 0.0;  // smallest p-metric expansion of a cone vector
    double Lambda = 0.0;
    double max_reversal_error = 0.0;  // |collide_backward(collide(x)) - x| in (r, phi)
    double min_flight = 0.0;
    double max_flight = 0.0;
};

/// Measure invariance, cone invariance, minimum expansion and reversibility along n collisions.
/// Five slopes spanning the unstable cone are pushed at every step after the first.
InvariantReport check_invariants(const BilliardTable& table, const CollisionState& start, long n);

/// Birkhoff mean of |log singularity_distance| along n collisions from start.
stats::BirkhoffTail billiard_adaptedness(const BilliardTable& table, const CollisionState& start, long n);

/// Forward orbit of n collisions starting at start (start itself not included).
std::vector<Collision> trajectory(const BilliardTable& table, const CollisionState& start, long n);

}  // namespace nuhlab::billiard
