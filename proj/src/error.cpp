#include "salbench/error.hpp"

namespace salbench {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::NonFinite: return "NonFinite";
        case Errc::NegativeValue: return "NegativeValue";
        case Errc::ZeroMass: return "ZeroMass";
        case Errc::DegenerateMap: return "DegenerateMap";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::EmptyFixations: return "EmptyFixations";
        case Errc::EmptySet: return "EmptySet";
        case Errc::OutOfBounds: return "OutOfBounds";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::MissingCenterbias: return "MissingCenterbias";
        case Errc::ZeroCenterbias: return "ZeroCenterbias";
        case Errc::NegativeSigma: return "NegativeSigma";
        case Errc::CapReached: return "CapReached";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::TooFewStimuli: return "TooFewStimuli";
        case Errc::EmptyAfterExclusion: return "EmptyAfterExclusion";
        case Errc::IoError: return "IoError";
        case Errc::FormatError: return "FormatError";
        case Errc::InvariantViolation: return "InvariantViolation";
        case Errc::BadArgument: return "BadArgument";
    }
    return "Unknown";
}

int cli_exit_code(Errc code) {
    switch (code) {
        case Errc::ZeroMass:
        case Errc::DegenerateMap:
        case Errc::ZeroVariance:
        case Errc::ZeroCenterbias:
        case Errc::CapReached:
            return 3;
        default:
            return 2;
    }
}

} // namespace salbench
