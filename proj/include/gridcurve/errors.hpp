#ifndef GRIDCURVE_ERRORS_HPP
#define GRIDCURVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridcurve {

// Base class for every failure this library reports. Fatal pipeline errors
// (broken algebraic invariants) and plain usage errors both derive from it;
// callers that need to distinguish catch the concrete type.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionTooLarge : Error {
    using Error::Error;
};

struct NotOneModFour : Error {
    using Error::Error;
};

struct ZeroInverse : Error {
    using Error::Error;
};

struct ContextMismatch : Error {
    using Error::Error;
};

struct DuplicateNodes : Error {
    using Error::Error;
};

struct DegreeBoundExceeded : Error {
    using Error::Error;
};

struct InterpolationCheckFailed : Error {
    using Error::Error;
};

struct NoValidG : Error {
    using Error::Error;
};

struct TooManySelfIntersections : Error {
    using Error::Error;
};

struct GridLargerThanField : Error {
    using Error::Error;
};

struct WrongArity : Error {
    using Error::Error;
};

struct TooFewPoints : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

struct RetriesExhausted : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

}  // namespace gridcurve

#endif
