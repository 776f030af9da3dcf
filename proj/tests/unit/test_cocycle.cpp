#include <doctest.h>

#include <cmath>

#include "nuhlab/cocycle.hpp"
#include "nuhlab/errors.hpp"
#include "nuhlab/stats.hpp"
#include "unit/tables.hpp"

using namespace nuhlab;
using namespace nuhlab::cocycle;

namespace {

const IntMatrix2 kCat{6, 1, 1, 1};
const double kLu = (7 + std::sqrt(29.0)) / 2;
const double kLs = (7 - std::sqrt(29.0)) / 2;

// eigenvector of [[6,1],[1,1]] for eigenvalue l: (1, l - 6)
Vec2 eigvec(double l) { return normalized(Vec2{1.0, l - 6.0}); }

const auto sheared = [] { return maps::TorusEndo::sheared({2, -1, 1, 2}, {1, 1, 0, 1}, 3.0); };

}  // namespace

TEST_CASE("linear exponents are the log eigenvalues") {
    const auto f = maps::TorusEndo::linear(kCat);
    auto rng = stats::sample_rng(1, 0);
    const auto est = lyapunov_qr(f, {0.1234, 0.5678}, 10000, rng);
    CHECK(std::abs(est.exponents[0] - std::log(kLu)) < 1e-8);
    CHECK(std::abs(est.exponents[1] - std::log(kLs)) < 1e-8);
    CHECK(std::abs(est.exponents[0] + est.exponents[1] - std::log(5.0)) < 1e-8);
    CHECK(est.n_iter == 10000);
}

TEST_CASE("exponent sum is log det for the sheared map") {
    auto rng = stats::sample_rng(2, 0);
    const auto est = lyapunov_qr(sheared(), {0.3, 0.4}, 20000, rng);
    CHECK(std::abs(est.exponents[0] + est.exponents[1] - std::log(5.0)) < 1e-8);
    CHECK(est.exponents[0] > est.exponents[1]);
}

TEST_CASE("QR needs enough steps") {
    auto rng = stats::sample_rng(2, 0);
    CHECK_THROWS_AS(lyapunov_qr(maps::TorusEndo::linear(kCat), {0.1, 0.2}, 100, rng), std::invalid_argument);
}

TEST_CASE("billiard exponents are symmetric") {
    auto rng = stats::sample_rng(3, 0);
    const auto est = lyapunov_qr(testtables::three_disc(), {0, 0.1, 0.2}, 100000, rng);
    CHECK(est.exponents[0] > 0.0);
    CHECK(std::abs(est.exponents[0] + est.exponents[1]) <= est.halfwidths[0] + est.halfwidths[1] + 1e-12);
}

TEST_CASE("unstable direction of a linear pre-orbit") {
    const auto f = maps::TorusEndo::linear(kCat);
    auto rng = stats::sample_rng(4, 0);
    const auto po = maps::sample_preorbit(f, {0.3, 0.7}, 40, rng);
    const Vec2 u = unstable_direction(f, po);
    CHECK(line_angle(u, eigvec(kLu)) < 1e-8);
    const auto shallow = maps::sample_preorbit(f, {0.3, 0.7}, 10, rng);
    CHECK_THROWS_AS(unstable_direction(f, shallow), DepthTooSmall);
}

TEST_CASE("unstable directions of the sheared map depend on the pre-orbit") {
    const auto f = sheared();
    const maps::TorusPoint x{0.3, 0.7};
    auto r1 = stats::sample_rng(5, 0), r2 = stats::sample_rng(5, 1);
    const auto p1 = maps::sample_preorbit(f, x, 40, r1);
    const auto p2 = maps::sample_preorbit(f, x, 40, r2);
    const Vec2 u1 = unstable_direction(f, p1), u2 = unstable_direction(f, p2);
    CHECK(line_angle(u1, u2) > 1e-3);

    // doubling the depth along the same branch barely moves the direction
    auto r3 = stats::sample_rng(5, 2);
    const auto deep = maps::sample_preorbit(f, x, 80, r3);
    maps::PreOrbit half;
    half.branch.assign(deep.branch.begin(), deep.branch.begin() + 41);
    CHECK(line_angle(unstable_direction(f, half), unstable_direction(f, deep)) < 1e-8);
}

TEST_CASE("stable direction") {
    const auto f = maps::TorusEndo::linear(kCat);
    CHECK(line_angle(stable_direction(f, {0.2, 0.9}, 20), eigvec(kLs)) < 1e-8);

    const double c = std::cos(0.3), s = std::sin(0.3);
    const std::vector<RealMatrix2> rotations(10, RealMatrix2{c, -s, s, c});
    CHECK_THROWS_AS(stable_direction(rotations), NoGap);

    const auto t = testtables::three_disc();
    for (const billiard::CollisionState x : {billiard::CollisionState{0, 0.1, 0.2}, {1, 1.0, -0.5}, {2, 0.7, 0.9}}) {
        const Vec2 e = stable_direction(t, x, 30);
        const double slope = e.y / e.x;
        const double tau_next = billiard::collide(t, x).tau;
        CHECK(billiard::cone_membership(t, x, slope, billiard::ConeKind::Stable, tau_next));
    }
}

TEST_CASE("geometric potential is bounded by -log Lambda") {
    const auto t = testtables::three_disc();
    const double bound = -std::log(billiard::min_expansion_Lambda(t));
    billiard::CollisionState x{0, 0.1, 0.2};
    for (int k = 0; k < 2000; ++k) {
        CHECK(geometric_potential(t, x) <= bound + 1e-12);
        x = billiard::collide(t, x).next;
    }
}

TEST_CASE("unstable slope lies in the unstable cone") {
    const auto t = testtables::three_disc();
    billiard::CollisionState x{1, 0.5, 0.3};
    for (int k = 0; k < 50; ++k) {
        const auto back = billiard::collide_backward(t, x);
        const double slope = unstable_slope(t, x, 30);
        CHECK(billiard::cone_membership(t, x, slope, billiard::ConeKind::Unstable, back.tau));
        x = billiard::collide(t, x).next;
    }
}

TEST_CASE("Pesin entropy") {
    auto rng = stats::sample_rng(6, 0);
    const auto lin = pesin_entropy_estimate(maps::TorusEndo::linear(kCat), {0.1234, 0.5678}, 10000, rng);
    // log 5 + |log lambda_s| = log lambda_u
    CHECK(std::abs(lin.entropy - std::log(kLu)) < 1e-8);
    CHECK(std::abs(lin.log_degree - std::log(5.0)) < 1e-15);

    CHECK_THROWS_AS(pesin_entropy_estimate(maps::TorusEndo::linear({5, 0, 0, 1}), {0.1234, 0.5678}, 10000, rng),
                    NotHyperbolic);
    CHECK_THROWS_AS(pesin_entropy_estimate(maps::TorusEndo::product({2, 0.5}, {3, 0.0}), {0.1, 0.2}, 10000, rng),
                    NotVolumePreserving);
}

TEST_CASE("Viana exponents") {
    const auto f = maps::VianaMap::with_defaults();
    auto rng = stats::sample_rng(7, 0);
    const auto est = lyapunov_qr(f, {0.1234, 0.3}, 200000, rng);
    CHECK(est.exponents[0] == doctest::Approx(std::log(16.0)).epsilon(1e-2));
    CHECK(est.exponents[1] > est.halfwidths[1]);
}
