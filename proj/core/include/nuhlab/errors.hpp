#pragma once

#include <stdexcept>
#include <string>

namespace nuhlab {

/// Base of every typed computation failure. kind() names the failure for reports.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define NUHLAB_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}         \
    }

// maps
NUHLAB_DEFINE_ERROR(CosetEnumerationFailure);
NUHLAB_DEFINE_ERROR(NotVolumePreserving);
NUHLAB_DEFINE_ERROR(InvalidMap);
// billiards
NUHLAB_DEFINE_ERROR(InvalidTable);
NUHLAB_DEFINE_ERROR(HorizonExceeded);
NUHLAB_DEFINE_ERROR(GrazingInput);
NUHLAB_DEFINE_ERROR(NearGrazing);
// cocycles
NUHLAB_DEFINE_ERROR(SingularJacobian);
NUHLAB_DEFINE_ERROR(DepthTooSmall);
NUHLAB_DEFINE_ERROR(NoGap);
NUHLAB_DEFINE_ERROR(NotHyperbolic);
// preimage statistics
NUHLAB_DEFINE_ERROR(BudgetExceeded);
NUHLAB_DEFINE_ERROR(DegenerateTail);
// periodic orbits
NUHLAB_DEFINE_ERROR(NoConvergence);
NUHLAB_DEFINE_ERROR(Occluded);
// markov shifts
NUHLAB_DEFINE_ERROR(NonConvergence);
NUHLAB_DEFINE_ERROR(MonotonicityViolation);
NUHLAB_DEFINE_ERROR(InvalidGraph);
// configuration
NUHLAB_DEFINE_ERROR(ConfigError);

#undef NUHLAB_DEFINE_ERROR

}  // namespace nuhlab
