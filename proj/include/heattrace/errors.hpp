#pragma once

#include <stdexcept>
#include <string>

namespace heattrace {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DatumInvalid : Error {
    using Error::Error;
};
struct NotARoot : Error {
    using Error::Error;
};
struct GroupTooLarge : Error {
    using Error::Error;
};
struct NonIntegralDimension : Error {
    using Error::Error;
};
struct IncompatibleSystem : Error {
    using Error::Error;
};
struct ToleranceAmbiguity : Error {
    using Error::Error;
};
struct MaxSubdivisions : Error {
    using Error::Error;
};
struct LowAcceptance : Error {
    using Error::Error;
};
struct IllConditioned : Error {
    using Error::Error;
};
struct NotEqualRankRegular : Error {
    using Error::Error;
};
struct IntegrabilityViolated : Error {
    using Error::Error;
};
struct TheoremViolation : Error {
    using Error::Error;
};
struct NotDiscreteSeriesCase : Error {
    using Error::Error;
};
struct AssumptionViolated : Error {
    using Error::Error;
};
struct UnknownName : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

}  // namespace heattrace
