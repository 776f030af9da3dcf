#pragma once

#include <random>
#include <string>
#include <vector>

#include "nuhlab/billiard.hpp"

namespace nuhlab::billiard {

/// One step of an itinerary: the disc hit at step k and the lattice translate, relative to the
/// cell of that disc, of the disc hit at step k + 1.
struct Symbol {
    int disc = 0;
    LatticeShift shift;
    constexpr auto operator<=>(const Symbol&) const = default;
};

struct Itinerary {
    std::vector<Symbol> symbols;

    int period() const { return static_cast<int>(symbols.size()); }
    /// "d:m,n d:m,n ..." e.g. "0:0,0 1:0,0".
    std::string to_string() const;
    static Itinerary parse(const std::string& text);
    bool operator==(const Itinerary&) const = default;
};

Itinerary rotated(const Itinerary& it, int k);
/// The itinerary of the time-reversed orbit: (d_{p-1}, -s_{p-2}), ..., (d_0, -s_{p-1}).
Itinerary reversed(const Itinerary& it);
/// Lexicographically smallest itinerary among all rotations and their reversals.
Itinerary canonical_form(const Itinerary& it);
bool is_primitive(const Itinerary& it);

struct PeriodicOrbit {
    Itinerary itinerary;
    std::vector<CollisionState> points;
    std::vector<double> taus;  // taus[k]: flight from points[k] to points[k + 1]
    double expansion_rate = 0.0;  // (1/p) log |lambda_u| of the p-step derivative
    double min_angle_gap = 0.0;   // min_k (pi/2 - |phi_k|)
    double gradient_norm = 0.0;   // |grad L| at the solution, in arclength coordinates
    double closure_error = 0.0;   // deviation of the collision map from the solved cycle
    double reflection_error = 0.0;
    double trace = 0.0;
    double determinant = 0.0;

    int period() const { return itinerary.period(); }
    bool non_grazing(double delta_graze = 1e-6) const { return min_angle_gap > delta_graze; }
};

struct SolveOptions {
    int max_iterations = 100;
    double gradient_tol = 1e-12;
};

/// Critical point of the cyclic length functional L(r_0, ..., r_{p-1}) for the itinerary, by Newton
/// with a backtracking fallback, followed by the reflection, occlusion and closure checks.
/// Throws NoConvergence, Occluded, or InvalidTable for inadmissible itineraries.
PeriodicOrbit solve_orbit(const BilliardTable& table, const Itinerary& itinerary, const SolveOptions& opt = {});

struct EnumerationFailure {
    Itinerary itinerary;
    std::string kind;
    std::string message;
};

struct OrbitDatabase {
    int max_period = 0;
    long itineraries = 0;  // candidates after the rotation/reversal quotient
    std::vector<PeriodicOrbit> orbits;
    std::vector<EnumerationFailure> failures;
};

/// Canonical primitive itineraries up to max_period (<= 8) with shifts from the flight lists,
/// solved in parallel and deduplicated by point set at 1e-7.
OrbitDatabase enumerate_orbits(const BilliardTable& table, int max_period, int workers = 1);

/// Isometry x -> A x + t of the plane preserving the scatterer configuration.
struct TableSymmetry {
    RealMatrix2 linear;
    Vec2 translation;
    std::vector<int> disc_map;
};

/// Symmetries with rotations by k pi/6 and reflections in lines at angles k pi/12.
std::vector<TableSymmetry> table_symmetries(const BilliardTable& table);

/// Image of a collision state under a symmetry.
CollisionState apply_symmetry(const BilliardTable& table, const TableSymmetry& g, const CollisionState& s);

/// Class id per orbit: orbits mapped to one another by some symmetry share an id.
std::vector<int> symmetry_classes(const BilliardTable& table, const std::vector<PeriodicOrbit>& orbits);

struct MmeRow {
    std::string itinerary;
    int period = 0;
    double expansion_rate = 0.0;
    double min_angle_gap = 0.0;
    int symmetry_class = 0;
    bool non_grazing = true;
};

struct MmeReport {
    bool no_data = true;
    int max_period = 0;
    std::vector<MmeRow> rows;
    std::vector<long> count_by_period;  // index p
    double mean_rate = 0.0;
    double min_rate = 0.0;
    double max_rate = 0.0;
    double spread = 0.0;            // max - min over non-grazing orbits
    double max_class_spread = 0.0;  // largest spread inside one symmetry class
    double log_Lambda = 0.0;
    bool all_above_log_Lambda = true;
    double entropy_lower_proxy = 0.0;  // sup_p (1/p) log #orbits of period <= p
    long failures = 0;
};

MmeReport mme_criterion_report(const BilliardTable& table, const OrbitDatabase& db, double delta_graze = 1e-6);
MmeReport mme_criterion_report(const BilliardTable& table, int max_period, int workers = 1,
                               double delta_graze = 1e-6);

enum class PotentialDirection { Unstable, Stable };

struct PressureCheck {
    double birkhoff_minus_phi = 0.0;
    double lambda_plus = 0.0;
    double lambda_ci = 0.0;
    double residual = 0.0;
    long steps = 0;
    long skipped = 0;  // near-grazing steps
};

/// |Birkhoff mean of -phi - lambda^+(QR)| along one orbit of n_steps (>= 1e5) collisions.
/// The Stable variant replaces E^u by E^s as a deliberately wrong potential.
PressureCheck pressure_zero_check(const BilliardTable& table, CollisionState start, long n_steps,
                                  std::mt19937_64& rng, PotentialDirection direction = PotentialDirection::Unstable,
                                  long burn_in = 100);

}  // namespace nuhlab::billiard
