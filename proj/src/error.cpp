#include "revflow/error.hpp"

namespace revflow {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonImmersed: return "NonImmersed";
        case ErrorCode::NegativeRadius: return "NegativeRadius";
        case ErrorCode::InteriorPole: return "InteriorPole";
        case ErrorCode::UnsupportedTopology: return "UnsupportedTopology";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::PoleEvaluation: return "PoleEvaluation";
        case ErrorCode::WrongTopology: return "WrongTopology";
        case ErrorCode::InversionFailure: return "InversionFailure";
        case ErrorCode::TruncationTooWide: return "TruncationTooWide";
        case ErrorCode::NewtonDivergence: return "NewtonDivergence";
        case ErrorCode::PositivityLoss: return "PositivityLoss";
        case ErrorCode::NearExtinction: return "NearExtinction";
        case ErrorCode::NotEmbeddable: return "NotEmbeddable";
        case ErrorCode::CrossCheckFailure: return "CrossCheckFailure";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace revflow
