#pragma once

#include <random>
#include <vector>

#include "nuhlab/maps.hpp"
#include "nuhlab/viana.hpp"

namespace nuhlab::maps {

/// A finite backward branch x_0, x_{-1}, ..., x_{-n} of the natural extension, with
/// f(x_{-k-1}) = x_{-k}. weight is the mass the disintegrated measure assigns to the branch:
/// the product of |det df| at x_{-1}, ..., x_{-n}, inverted.
struct PreOrbit {
    std::vector<TorusPoint> branch;  // branch[k] = x_{-k}; branch[0] is the base point
    double weight = 1.0;

    TorusPoint base() const { return branch.front(); }
    std::size_t depth() const { return branch.size() - 1; }
    /// The pre-orbit (f(x_0), x_0, x_{-1}, ...) one step further along the natural extension.
    PreOrbit shifted(const TorusEndo& map) const;
};

/// Backward random walk: from each x_{-k}, picks preimage y with probability 1/|det df_y|.
/// For volume-preserving maps these probabilities sum to one, so the branch law is the
/// disintegration of Lebesgue measure along pre-orbits of x.
/// Throws NotVolumePreserving otherwise.
PreOrbit sample_preorbit(const TorusEndo& map, TorusPoint x, int depth, std::mt19937_64& rng);

/// Viana maps are not volume preserving; always throws NotVolumePreserving.
PreOrbit sample_preorbit(const VianaMap& map, CylinderPoint x, int depth, std::mt19937_64& rng);

}  // namespace nuhlab::maps
