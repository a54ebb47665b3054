#include "rbe/errors.hpp"

namespace rbe {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::AtomAtZero: return "AtomAtZero";
        case ErrorKind::NonPositiveProb: return "NonPositiveProb";
        case ErrorKind::UnsortedAtoms: return "UnsortedAtoms";
        case ErrorKind::MassNotOne: return "MassNotOne";
        case ErrorKind::EmptyLaw: return "EmptyLaw";
        case ErrorKind::NotCentered: return "NotCentered";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::SeriesNotConverged: return "SeriesNotConverged";
        case ErrorKind::NumericalError: return "NumericalError";
        case ErrorKind::TargetExceedsMass: return "TargetExceedsMass";
        case ErrorKind::BothSidesInfinite: return "BothSidesInfinite";
        case ErrorKind::HorizonTruncationExcess: return "HorizonTruncationExcess";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace rbe
