#pragma once

#include "nuhlab/billiard.hpp"

namespace testtables {

inline nuhlab::billiard::BilliardTable three_disc(double radius = 0.3, double tau_max = 0.55) {
    using namespace nuhlab::billiard;
    const Lattice L = Lattice::hexagonal_three_site();
    auto site = [&](double a, double b) { return L.b1 * a + L.b2 * b; };
    return BilliardTable({{site(0, 0), radius}, {site(2.0 / 3, -1.0 / 3), radius}, {site(1.0 / 3, 1.0 / 3), radius}},
                         tau_max, L);
}

inline nuhlab::billiard::BilliardTable two_disc(double tau_max = 0.5) {
    using namespace nuhlab::billiard;
    return BilliardTable({{{0.25, 0.25}, 0.1}, {{0.75, 0.25}, 0.1}}, tau_max);
}

}  // namespace testtables
