#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revflow {

enum class ErrorCode {
    NonImmersed,
    NegativeRadius,
    InteriorPole,
    UnsupportedTopology,
    QuadratureFailure,
    PoleEvaluation,
    WrongTopology,
    InversionFailure,
    TruncationTooWide,
    NewtonDivergence,
    PositivityLoss,
    NearExtinction,
    NotEmbeddable,
    CrossCheckFailure,
    IoFailure,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type for every failure raised by the library. The code is
/// stable and machine-readable; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace revflow
