#include "nuhlab/preorbit.hpp"

#include <cmath>

#include "nuhlab/errors.hpp"

namespace nuhlab::maps {

PreOrbit PreOrbit::shifted(const TorusEndo& map) const {
    PreOrbit out;
    out.branch.reserve(branch.size() + 1);
    out.branch.push_back(map.apply(branch.front()));
    out.branch.insert(out.branch.end(), branch.begin(), branch.end());
    out.weight = weight / std::abs(map.jacobian(branch.front()).det());
    return out;
}

PreOrbit sample_preorbit(const TorusEndo& map, TorusPoint x, int depth, std::mt19937_64& rng) {
    if (!map.volume_preserving())
        throw NotVolumePreserving("pre-orbit sampling needs an invariant volume (family " +
                                  std::string(map.family_name()) + ")");
    if (depth < 0) throw std::invalid_argument("pre-orbit depth must be non-negative");
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    PreOrbit out;
    out.branch.reserve(static_cast<std::size_t>(depth) + 1);
    out.branch.push_back(x);
    std::vector<double> probs;
    for (int k = 0; k < depth; ++k) {
        const auto ys = map.preimages(out.branch.back());
        probs.resize(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) probs[i] = 1.0 / std::abs(map.jacobian(ys[i]).det());
        const double u = uniform(rng);
        double acc = 0.0;
        std::size_t pick = ys.size() - 1;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            acc += probs[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        out.branch.push_back(ys[pick]);
        out.weight *= probs[pick];
    }
    return out;
}

PreOrbit sample_preorbit(const VianaMap&, CylinderPoint, int, std::mt19937_64&) {
    throw NotVolumePreserving("Viana maps carry no invariant volume; pre-orbit law undefined");
}

}  // namespace nuhlab::maps
