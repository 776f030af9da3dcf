#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "nuhlab/linalg.hpp"

namespace nuhlab::maps {

/// Reduces a real number to [0, 1). Results within 1e-12 below 1 snap to 0.
double reduce_mod1(double v);

/// Point of the flat torus R^2 / Z^2, both coordinates in [0, 1).
struct TorusPoint {
    double x = 0.0;
    double y = 0.0;

    static TorusPoint reduced(double x, double y) { return {reduce_mod1(x), reduce_mod1(y)}; }
    static TorusPoint reduced(Vec2 v) { return reduced(v.x, v.y); }
    Vec2 vec() const { return {x, y}; }
};

/// Euclidean distance on the torus (shortest lift).
double torus_distance(TorusPoint a, TorusPoint b);

/// Long-double torus point for deep preimage trees, where f^N amplifies rounding by |df^N|.
struct TorusPointX {
    long double x = 0.0L;
    long double y = 0.0L;

    TorusPoint rounded() const;
};

long double torus_distance(TorusPointX a, TorusPointX b);

/// A 1-periodic shear profile given as a truncated Fourier series
///   s(x) = sum_k sin_k sin(2 pi k x) + cos_k cos(2 pi k x),  k = 1, 2, ...
class ShearFunction {
public:
    ShearFunction() : ShearFunction(std::vector<double>{1.0}, {}) {}
    ShearFunction(std::vector<double> sine_coeffs, std::vector<double> cosine_coeffs);

    static ShearFunction sine() { return {}; }

    double value(double x) const;
    double derivative(double x) const;

    const std::vector<double>& sine_coeffs() const { return sin_; }
    const std::vector<double>& cosine_coeffs() const { return cos_; }

private:
    std::vector<double> sin_;
    std::vector<double> cos_;
};

/// x -> degree * x + amplitude / (2 pi) * sin(2 pi x)  (mod 1).
/// Requires |amplitude| < |degree| so the lift is strictly monotone.
struct CircleMap {
    std::int64_t degree = 2;
    double amplitude = 0.0;

    double apply(double x) const;
    double derivative(double x) const;
    std::vector<double> preimages(double y) const;
};

struct LinearEndo {
    IntMatrix2 E;
};

/// f_t = E o P o h_t o P^{-1} with the shear h_t(x, y) = (x, y + t s(x)).
struct ShearedEndo {
    IntMatrix2 E;
    IntMatrix2 P;
    double t = 0.0;
    ShearFunction shear;
};

/// (x, y) -> (g1(x), g2(y)).
struct ProductEndo {
    CircleMap horizontal;
    CircleMap vertical;
};

/// Coset representatives of Z^2 / E Z^2 from the column Hermite normal form of E.
/// Throws CosetEnumerationFailure if the count differs from |det E|.
std::vector<std::array<std::int64_t, 2>> coset_representatives(const IntMatrix2& E);

/// An exact torus endomorphism from one of the supported families.
/// Immutable after construction; construction validates the family invariants.
class TorusEndo {
public:
    using Family = std::variant<LinearEndo, ShearedEndo, ProductEndo>;

    explicit TorusEndo(Family family);

    static TorusEndo linear(const IntMatrix2& E) { return TorusEndo(LinearEndo{E}); }
    static TorusEndo sheared(const IntMatrix2& E, const IntMatrix2& P, double t,
                             ShearFunction shear = ShearFunction::sine()) {
        return TorusEndo(ShearedEndo{E, P, t, std::move(shear)});
    }
    static TorusEndo product(const CircleMap& horizontal, const CircleMap& vertical) {
        return TorusEndo(ProductEndo{horizontal, vertical});
    }

    const Family& family() const { return family_; }
    std::string_view family_name() const;
    std::int64_t degree() const { return degree_; }
    /// True when Lebesgue measure is invariant (|det df| constant = degree).
    bool volume_preserving() const { return volume_preserving_; }
    /// The linear part E for Linear/Sheared maps; diag(k1, k2) for products.
    IntMatrix2 linear_part() const;

    TorusPoint apply(TorusPoint p) const;
    RealMatrix2 jacobian(TorusPoint p) const;
    /// All y with apply(y) = p; exactly degree() points.
    std::vector<TorusPoint> preimages(TorusPoint p) const;

    TorusPointX apply_extended(TorusPointX p) const;
    std::vector<TorusPointX> preimages_extended(TorusPointX p) const;

private:
    Family family_;
    std::int64_t degree_ = 1;
    bool volume_preserving_ = true;
    std::vector<std::array<std::int64_t, 2>> cosets_;
    RealMatrix2 e_inverse_;
};

struct AcsMatrixReport {
    std::int64_t det = 0;
    std::int64_t gcd = 0;
    bool not_homothety = false;
    bool no_unit_eigenvalue = false;
    bool det_over_gcd_above_four = false;
    std::complex<double> eigenvalue_1;
    std::complex<double> eigenvalue_2;

    bool all_pass() const { return not_homothety && no_unit_eigenvalue && det_over_gcd_above_four; }
};

/// Checks the three conditions on the integer linear part of a sheared ACS example.
AcsMatrixReport validate_acs_matrix(const IntMatrix2& E);

}  // namespace nuhlab::maps
