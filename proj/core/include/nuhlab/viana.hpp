#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nuhlab/linalg.hpp"
#include "nuhlab/stats.hpp"

namespace nuhlab::maps {

/// Point of S^1 x R: theta in [0, 1), t real.
struct CylinderPoint {
    double theta = 0.0;
    double t = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }
};

/// Parameter a0 in (1, 2) for which t = 0 is strictly preperiodic under t -> a0 - t^2:
/// 0 -> a0 -> a0 - a0^2 = -p -> p, with p = (sqrt(1 + 4 a0) - 1) / 2 the positive fixed point.
/// Found by bisection on [1.5, 1.6].
double preperiodic_quadratic_parameter();

/// Hull of the fiber images of the critical orbit, widened by margin. The returned interval
/// is mapped into its own interior with at least that margin.
Interval find_invariant_interval(double a0, double alpha, double margin);

/// f(theta, t) = (d theta, a0 + alpha sin(2 pi theta) - t^2) restricted to S^1 x I0.
class VianaMap {
public:
    VianaMap(double a0, int d, double alpha, Interval I0);

    /// d = 16, alpha = 1e-2, a0 from preperiodic_quadratic_parameter(), I0 from
    /// find_invariant_interval(.., margin = 0.05).
    static VianaMap with_defaults(int d = 16, double alpha = 1e-2);

    double a0() const { return a0_; }
    int d() const { return d_; }
    double alpha() const { return alpha_; }
    Interval I0() const { return I0_; }

    CylinderPoint apply(CylinderPoint p) const;
    /// [[d, 0], [2 pi alpha cos(2 pi theta), -2 t]]; singular on the critical circle t = 0.
    RealMatrix2 jacobian(CylinderPoint p) const;
    /// All preimages inside S^1 x I0 (between 0 and 2d points).
    std::vector<CylinderPoint> preimages(CylinderPoint p) const;

    /// Smallest distance from the image of a boundary grid of S^1 x I0 to the boundary of I0.
    /// Positive iff every sampled boundary image lies in the interior.
    double invariance_margin(int n_theta) const;

private:
    double a0_;
    int d_;
    double alpha_;
    Interval I0_;
};

/// Forward orbit with theta held as a 64-bit binary fraction. Multiplication by d pushes
/// known digits out of the word; the missing low digits are drawn uniformly from rng, so
/// theta follows a true orbit of the circle map instead of collapsing to 0 in floating point.
class VianaOrbit {
public:
    VianaOrbit(const VianaMap& map, CylinderPoint start, std::mt19937_64& rng);

    CylinderPoint point() const;
    void advance();

private:
    const VianaMap* map_;
    std::mt19937_64* rng_;
    std::uint64_t theta_bits_;
    double t_;
};

/// Birkhoff mean of |log |t|| (log-distance to the critical circle) along n iterates.
stats::BirkhoffTail viana_adaptedness(const VianaMap& map, CylinderPoint start, long n, std::mt19937_64& rng);

}  // namespace nuhlab::maps
