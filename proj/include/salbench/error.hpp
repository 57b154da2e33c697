#pragma once

#include <stdexcept>
#include <string>

namespace salbench {

// Failure categories used across the toolkit. The CLI maps these onto exit
// codes: contract/format problems exit with 2, numeric degeneracies with 3.
enum class Errc {
    NonFinite,
    NegativeValue,
    ZeroMass,
    DegenerateMap,
    ZeroVariance,
    EmptyFixations,
    EmptySet,
    OutOfBounds,
    ShapeMismatch,
    MissingCenterbias,
    ZeroCenterbias,
    NegativeSigma,
    CapReached,
    EmptyDataset,
    TooFewStimuli,
    EmptyAfterExclusion,
    IoError,
    FormatError,
    InvariantViolation,
    BadArgument,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

const char* errc_name(Errc code);

// 2 = format/contract error, 3 = numeric error (degenerate input).
int cli_exit_code(Errc code);

} // namespace salbench
