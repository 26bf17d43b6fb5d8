#include "rarehit/error.hpp"

namespace rarehit {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyAlphabet: return "EmptyAlphabet";
        case ErrorCode::NonStochastic: return "NonStochastic";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::Periodic: return "Periodic";
        case ErrorCode::SymbolOutOfRange: return "SymbolOutOfRange";
        case ErrorCode::EmptyWord: return "EmptyWord";
        case ErrorCode::GapNonPositive: return "GapNonPositive";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ExpansionTooLarge: return "ExpansionTooLarge";
        case ErrorCode::RankMismatch: return "RankMismatch";
        case ErrorCode::EmptyTarget: return "EmptyTarget";
        case ErrorCode::HorizonNonPositive: return "HorizonNonPositive";
        case ErrorCode::ZeroMeasureSet: return "ZeroMeasureSet";
        case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
        case ErrorCode::HorizonMismatch: return "HorizonMismatch";
        case ErrorCode::HorizonTooShort: return "HorizonTooShort";
        case ErrorCode::ZeroTail: return "ZeroTail";
        case ErrorCode::GridEmpty: return "GridEmpty";
        case ErrorCode::RateExceedsEntropy: return "RateExceedsEntropy";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

bool is_resource_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ExpansionTooLarge:
        case ErrorCode::EnumerationTooLarge:
        case ErrorCode::RejectionBudgetExceeded:
        case ErrorCode::HorizonTooShort:
            return true;
        default:
            return false;
    }
}

}  // namespace rarehit
