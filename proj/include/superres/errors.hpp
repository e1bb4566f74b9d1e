#pragma once

#include <stdexcept>
#include <string>

namespace superres {

/// Raised when a numerical stage cannot produce a trustworthy answer
/// (ill-conditioned solves, too few usable projections, failed matching).
/// Bad caller input is reported with std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientProjections : public NumericalError {
public:
    explicit InsufficientProjections(const std::string& what)
        : NumericalError("insufficient projections: " + what) {}
};

class MatchingFailure : public NumericalError {
public:
    MatchingFailure(const std::string& what, int orphan)
        : NumericalError("matching failure: " + what), orphan_index(orphan) {}

    int orphan_index;
};

} // namespace superres
