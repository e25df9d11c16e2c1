#pragma once

#include <stdexcept>
#include <string>

namespace logsob {

enum class ErrorCode {
    // mesh validation
    BoundaryDetected,
    DegenerateCell,
    IndexOutOfRange,
    UnsupportedSpec,
    // differential operators
    IllConditionedFit,
    // densities and solves
    NonpositiveDensity,
    IncompatibleRhs,
    NoConvergence,
    DisconnectedInput,
    MixedForms,
    Overflow,
    Diverged,
    QuadratureUnderflow,
    // configuration and I/O
    InvalidConfig,
    ParseError,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace logsob
