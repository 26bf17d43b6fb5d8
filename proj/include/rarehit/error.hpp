#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rarehit {

enum class ErrorCode {
    EmptyAlphabet,
    NonStochastic,
    Reducible,
    Periodic,
    SymbolOutOfRange,
    EmptyWord,
    GapNonPositive,
    InvalidArgument,
    ExpansionTooLarge,
    RankMismatch,
    EmptyTarget,
    HorizonNonPositive,
    ZeroMeasureSet,
    EnumerationTooLarge,
    SingularSystem,
    RejectionBudgetExceeded,
    HorizonMismatch,
    HorizonTooShort,
    ZeroTail,
    GridEmpty,
    RateExceedsEntropy,
    NoCrossing,
    ConfigInvalid,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by a size/work cap rather than bad input.
bool is_resource_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rarehit
