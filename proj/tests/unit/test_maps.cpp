#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nuhlab/errors.hpp"
#include "nuhlab/maps.hpp"
#include "nuhlab/preorbit.hpp"
#include "nuhlab/stats.hpp"
#include "nuhlab/viana.hpp"

using namespace nuhlab;
using namespace nuhlab::maps;

namespace {

const IntMatrix2 kCat{6, 1, 1, 1};
const IntMatrix2 kAcsE{2, -1, 1, 2};
const IntMatrix2 kAcsP{1, 1, 0, 1};

double wrap(double d) { return d - std::round(d); }

// Central differences on the lift, wrapped back into (-1/2, 1/2].
RealMatrix2 numeric_jacobian(const TorusEndo& f, TorusPoint p, double h = 1e-6) {
    auto col = [&](double dx, double dy) {
        const auto a = f.apply(TorusPoint::reduced(p.x + dx, p.y + dy));
        const auto b = f.apply(TorusPoint::reduced(p.x - dx, p.y - dy));
        return Vec2{wrap(a.x - b.x) / (2 * h), wrap(a.y - b.y) / (2 * h)};
    };
    const Vec2 c1 = col(h, 0), c2 = col(0, h);
    return {c1.x, c2.x, c1.y, c2.y};
}

}  // namespace

TEST_CASE("reduce_mod1") {
    CHECK(reduce_mod1(-0.25) == 0.75);
    CHECK(reduce_mod1(2.5) == 0.5);
    CHECK(reduce_mod1(1.0 - 1e-13) == 0.0);
    CHECK(reduce_mod1(0.0) == 0.0);
}

TEST_CASE("linear apply by integer arithmetic") {
    const auto f = TorusEndo::linear(kCat);
    const auto z = f.apply({0.0, 0.0});
    CHECK(z.x == 0.0);
    CHECK(z.y == 0.0);
    const auto q = f.apply({0.5, 0.5});
    CHECK(q.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q.y == doctest::Approx(0.0));
    CHECK(f.degree() == 5);
    CHECK(f.volume_preserving());
}

TEST_CASE("sheared map with t = 0 is the linear map") {
    const auto lin = TorusEndo::linear(kAcsE);
    const auto sh = TorusEndo::sheared(kAcsE, kAcsP, 0.0);
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const TorusPoint p{(i + 0.3) / 10.0, (j + 0.7) / 10.0};
            CHECK(torus_distance(lin.apply(p), sh.apply(p)) < 1e-12);
        }
}

TEST_CASE("sheared jacobian: det E and finite differences") {
    const auto f = TorusEndo::sheared(kAcsE, kAcsP, 3.0);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            const TorusPoint p{(i + 0.17) / 7.0, (j + 0.61) / 7.0};
            const auto J = f.jacobian(p);
            CHECK(std::abs(J.det() - 5.0) < 1e-12);
            const auto Jn = numeric_jacobian(f, p);
            CHECK(std::abs(J.a - Jn.a) < 1e-5);
            CHECK(std::abs(J.b - Jn.b) < 1e-5);
            CHECK(std::abs(J.c - Jn.c) < 1e-5);
            CHECK(std::abs(J.d - Jn.d) < 1e-5);
        }
}

TEST_CASE("linear preimages of the origin are the coset grid") {
    const auto f = TorusEndo::linear({2, 0, 0, 3});
    const auto pre = f.preimages({0.0, 0.0});
    REQUIRE(pre.size() == 6);
    // brute-force oracle: scan (i/2, j/3) and keep what maps to 0
    std::vector<TorusPoint> oracle;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            const TorusPoint y{i / 2.0, j / 3.0};
            if (torus_distance(f.apply(y), {0, 0}) < 1e-12) oracle.push_back(y);
        }
    REQUIRE(oracle.size() == 6);
    for (const auto& y : oracle) {
        const bool found = std::any_of(pre.begin(), pre.end(), [&](TorusPoint z) { return torus_distance(y, z) < 1e-12; });
        CHECK(found);
    }
}

TEST_CASE("sheared preimages round-trip and are distinct") {
    const auto f = TorusEndo::sheared(kAcsE, kAcsP, 3.0);
    double total_mass_error = 0.0;
    for (int k = 0; k < 50; ++k) {
        const TorusPoint p{std::fmod(0.1 + 0.618033988 * k, 1.0), std::fmod(0.05 + 0.414213562 * k, 1.0)};
        const auto pre = f.preimages(p);
        REQUIRE(pre.size() == 5);
        double mass = 0.0;
        for (std::size_t a = 0; a < pre.size(); ++a) {
            CHECK(torus_distance(f.apply(pre[a]), p) < 1e-9);
            for (std::size_t b = a + 1; b < pre.size(); ++b) CHECK(torus_distance(pre[a], pre[b]) > 1e-6);
            mass += 1.0 / std::abs(f.jacobian(pre[a]).det());
        }
        total_mass_error = std::max(total_mass_error, std::abs(mass - 1.0));
    }
    CHECK(total_mass_error < 1e-12);
}

TEST_CASE("long-double overloads match the double path") {
    const TorusEndo maps[] = {TorusEndo::linear(kCat), TorusEndo::sheared(kAcsE, kAcsP, 3.0),
                              TorusEndo::product({3, 0.0}, {2, 0.5})};
    for (const auto& f : maps) {
        CAPTURE(f.family_name());
        for (int k = 0; k < 20; ++k) {
            const TorusPoint p{std::fmod(0.1 + 0.618033988 * k, 1.0), std::fmod(0.05 + 0.414213562 * k, 1.0)};
            const TorusPointX px{p.x, p.y};
            CHECK(torus_distance(f.apply_extended(px).rounded(), f.apply(p)) < 1e-12);
            const auto pre = f.preimages(p);
            const auto prex = f.preimages_extended(px);
            REQUIRE(prex.size() == pre.size());
            for (std::size_t a = 0; a < pre.size(); ++a) {
                CHECK(torus_distance(prex[a].rounded(), pre[a]) < 1e-12);
                CHECK(torus_distance(f.apply_extended(prex[a]), px) < 1e-17L);
            }
        }
    }
}

TEST_CASE("section property") {
    const auto f = TorusEndo::linear(kCat);
    for (int k = 0; k < 20; ++k) {
        const TorusPoint y{std::fmod(0.37 * k + 0.01, 1.0), std::fmod(0.73 * k + 0.02, 1.0)};
        const auto pre = f.preimages(f.apply(y));
        const bool found = std::any_of(pre.begin(), pre.end(), [&](TorusPoint z) { return torus_distance(y, z) < 1e-9; });
        CHECK(found);
    }
}

TEST_CASE("product map") {
    const auto f = TorusEndo::product({3, 0.0}, {2, 0.5});
    CHECK(f.degree() == 6);
    CHECK_FALSE(f.volume_preserving());
    const TorusPoint p{0.2, 0.9};
    const auto pre = f.preimages(p);
    REQUIRE(pre.size() == 6);
    for (const auto& y : pre) CHECK(torus_distance(f.apply(y), p) < 1e-9);
    CHECK_THROWS_AS(TorusEndo::product({2, 3.0}, {2, 0.0}), InvalidMap);
}

TEST_CASE("Viana jacobian and determinant") {
    const auto f = VianaMap::with_defaults();
    const double d = f.d(), alpha = f.alpha();
    for (double theta : {0.0, 0.13, 0.5, 0.77})
        for (double t : {-1.0, -0.2, 0.0, 0.4, 1.5}) {
            const auto J = f.jacobian({theta, t});
            CHECK(J.a == d);
            CHECK(J.b == 0.0);
            CHECK(std::abs(J.c - 2 * std::numbers::pi * alpha * std::cos(2 * std::numbers::pi * theta)) < 1e-14);
            CHECK(J.d == -2 * t);
            CHECK(std::abs(J.det() + 2 * d * t) <= 1e-12 * std::max(1.0, std::abs(2 * d * t)));
        }
    CHECK(f.jacobian({0.3, 0.0}).det() == 0.0);
}

TEST_CASE("Viana parameter is preperiodic") {
    const double a0 = preperiodic_quadratic_parameter();
    CHECK(a0 > 1.5);
    CHECK(a0 < 1.6);
    const double t2 = a0 - a0 * a0;
    const double p = a0 - t2 * t2;
    CHECK(std::abs(a0 - p * p - p) < 1e-12);
    CHECK(std::abs(p + t2) < 1e-12);
    const auto f = VianaMap::with_defaults();
    CHECK(f.invariance_margin(1000) > 0.0);
}

TEST_CASE("Viana preimages") {
    const auto f = VianaMap::with_defaults();
    CHECK(f.preimages({0.3, f.a0() + f.alpha() + 0.01}).empty());
    // radicand ~ 0.5 on every branch, both square roots inside I0
    const CylinderPoint p{0.41, f.a0() - 0.5};
    const auto pre = f.preimages(p);
    CHECK(pre.size() == static_cast<std::size_t>(2 * f.d()));
    for (const auto& y : pre) {
        const auto q = f.apply(y);
        CHECK(std::abs(wrap(q.theta - p.theta)) < 1e-9);
        CHECK(std::abs(q.t - p.t) < 1e-9);
    }
}

TEST_CASE("sample_preorbit on the sheared map") {
    const auto f = TorusEndo::sheared(kAcsE, kAcsP, 3.0);
    const TorusPoint x{0.3, 0.7};
    auto rng = stats::sample_rng(5, 0);
    const auto p0 = sample_preorbit(f, x, 0, rng);
    CHECK(p0.depth() == 0);
    CHECK(p0.weight == 1.0);
    CHECK(p0.base().x == x.x);

    const auto p3 = sample_preorbit(f, x, 3, rng);
    REQUIRE(p3.depth() == 3);
    CHECK(std::abs(p3.weight - 1.0 / 125.0) < 1e-15);
    for (std::size_t k = 0; k < 3; ++k) CHECK(torus_distance(f.apply(p3.branch[k + 1]), p3.branch[k]) < 1e-9);

    const auto sh = p3.shifted(f);
    CHECK(sh.depth() == 4);
    CHECK(torus_distance(sh.branch[1], x) < 1e-15);
}

TEST_CASE("depth-1 branch frequencies are uniform") {
    const auto f = TorusEndo::sheared(kAcsE, kAcsP, 3.0);
    const TorusPoint x{0.3, 0.7};
    const auto pre = f.preimages(x);
    std::vector<long> counts(pre.size(), 0);
    const long n = 100000;
    auto rng = stats::sample_rng(11, 0);
    for (long s = 0; s < n; ++s) {
        const auto y = sample_preorbit(f, x, 1, rng).branch[1];
        for (std::size_t k = 0; k < pre.size(); ++k)
            if (torus_distance(y, pre[k]) < 1e-12) ++counts[k];
    }
    const double sigma = std::sqrt(0.2 * 0.8 / n);
    long total = 0;
    for (long c : counts) {
        CHECK(std::abs(double(c) / n - 0.2) < 3 * sigma);
        total += c;
    }
    CHECK(total == n);
}

TEST_CASE("sample_preorbit rejects non-volume-preserving maps") {
    auto rng = stats::sample_rng(1, 0);
    CHECK_THROWS_AS(sample_preorbit(VianaMap::with_defaults(), CylinderPoint{0.1, 0.2}, 3, rng), NotVolumePreserving);
    CHECK_THROWS_AS(sample_preorbit(TorusEndo::product({2, 0.5}, {2, 0.0}), TorusPoint{0.1, 0.2}, 3, rng),
                    NotVolumePreserving);
}

TEST_CASE("validate_acs_matrix") {
    const auto ok = validate_acs_matrix(kCat);
    CHECK(ok.all_pass());
    const double l1 = (7 + std::sqrt(29.0)) / 2, l2 = (7 - std::sqrt(29.0)) / 2;
    const double e1 = ok.eigenvalue_1.real(), e2 = ok.eigenvalue_2.real();
    CHECK(std::abs(std::max(e1, e2) - l1) < 1e-12);
    CHECK(std::abs(std::min(e1, e2) - l2) < 1e-12);

    const auto hom = validate_acs_matrix({2, 0, 0, 2});
    CHECK_FALSE(hom.not_homothety);
    CHECK_FALSE(hom.all_pass());

    const auto small = validate_acs_matrix({2, 1, 1, 1});
    CHECK(small.det == 1);
    CHECK_FALSE(small.det_over_gcd_above_four);

    CHECK(validate_acs_matrix(kAcsE).all_pass());
}

TEST_CASE("coset representatives") {
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& c : coset_representatives(kAcsE)) seen.insert({c[0], c[1]});
    CHECK(seen.size() == 5);
}
