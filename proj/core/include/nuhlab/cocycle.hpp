#pragma once

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "nuhlab/billiard.hpp"
#include "nuhlab/linalg.hpp"
#include "nuhlab/maps.hpp"
#include "nuhlab/preorbit.hpp"
#include "nuhlab/viana.hpp"

namespace nuhlab::cocycle {

/// Exponents in nats per iterate, largest first, with batch-means 95% half-widths.
struct LyapunovEstimate {
    std::array<double, 2> exponents{};
    std::array<double, 2> halfwidths{};
    double ci_halfwidth = 0.0;  // max of the two
    double mean_log_det = 0.0;
    long n_iter = 0;
};

struct QrOptions {
    long burn_in = 100;
    int batches = 20;
};

/// Core QR accumulation over a stream of one-step Jacobians. next_jacobian() advances the orbit
/// and returns df at the point it left. In two dimensions the R factor's second diagonal entry
/// is |det df| / r11, so the exponent sum equals the mean of log|det df| exactly.
LyapunovEstimate lyapunov_from_jacobians(const std::function<RealMatrix2()>& next_jacobian, long n,
                                         Vec2 initial_frame, const QrOptions& opt = {});

/// The initial frame is drawn from rng. Requires n >= 1000.
LyapunovEstimate lyapunov_qr(const maps::TorusEndo& map, maps::TorusPoint start, long n,
                             std::mt19937_64& rng, const QrOptions& opt = {});
/// Throws SingularJacobian if the orbit lands within 1e-14 of the critical circle.
LyapunovEstimate lyapunov_qr(const maps::VianaMap& map, maps::CylinderPoint start, long n,
                             std::mt19937_64& rng, const QrOptions& opt = {});
LyapunovEstimate lyapunov_qr(const billiard::BilliardTable& table, billiard::CollisionState start,
                             long n, std::mt19937_64& rng, const QrOptions& opt = {});

/// Pushes a fixed generic vector from x_{-n} to x_0 along the branch. Throws DepthTooSmall when
/// the result moves by more than tol (angle) between depths n - 1 and n. Depth must be >= 20.
Vec2 unstable_direction(const maps::TorusEndo& map, const maps::PreOrbit& preorbit, double tol = 1e-6);

/// Most contracted right singular direction of the n-step Jacobian product.
/// Throws NoGap when the singular values are within a factor min_gap.
Vec2 stable_direction(const std::vector<RealMatrix2>& jacobians, double min_gap = 10.0);
Vec2 stable_direction(const maps::TorusEndo& map, maps::TorusPoint x, int n, double min_gap = 10.0);
/// Stable direction in (dr, dphi) coordinates at a collision state.
Vec2 stable_direction(const billiard::BilliardTable& table, billiard::CollisionState x, int n,
                      double min_gap = 10.0);

/// Unstable slope dphi/dr at x: the lower edge K of the unstable cone at x_{-depth} pushed
/// forward along the backward orbit.
double unstable_slope(const billiard::BilliardTable& table, const billiard::CollisionState& x, int depth);

/// phi(x) = -log of the p-metric expansion of E^u_x over the flight out of x. Always <= -log Lambda.
double geometric_potential(const billiard::BilliardTable& table, const billiard::CollisionState& x,
                           int depth = 40);

struct PesinEstimate {
    double entropy = 0.0;  // log deg + |lambda^-|
    double ci_halfwidth = 0.0;
    double log_degree = 0.0;
    LyapunovEstimate lyapunov;
};

/// Throws NotVolumePreserving for maps without invariant volume and NotHyperbolic when the CI
/// of the lower exponent contains zero.
PesinEstimate pesin_entropy_estimate(const maps::TorusEndo& map, maps::TorusPoint start, long n,
                                     std::mt19937_64& rng, const QrOptions& opt = {});

}  // namespace nuhlab::cocycle
