#pragma once

#include <stdexcept>
#include <string>

namespace rbe {

enum class ErrorKind {
    AtomAtZero,
    NonPositiveProb,
    UnsortedAtoms,
    MassNotOne,
    EmptyLaw,
    NotCentered,
    DomainError,
    SeriesNotConverged,
    NumericalError,
    TargetExceedsMass,
    BothSidesInfinite,
    HorizonTruncationExcess,
    ConfigError,
    IoError,
};

const char* error_kind_name(ErrorKind k);

/// Library-wide exception; `kind()` gives the machine-readable condition,
/// what() a human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace rbe
