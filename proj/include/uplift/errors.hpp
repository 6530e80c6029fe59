#pragma once

#include <stdexcept>
#include <string>

namespace uplift {

// Typed failure conditions surfaced by the library. Every throwing operation
// documents which codes it can raise; callers that need to branch on the
// condition match on code() instead of parsing messages.
enum class ErrorCode {
    NonFiniteScore,
    EmptyPopulation,
    InvalidConfig,
    DegenerateLabels,
    DimensionMismatch,
    MissingKpi,
    MissingEndFeatures,
    SizeMismatch,
    LengthMismatch,
    NonBinaryInput,
    EmptyGroup,
    ZeroDenominator,
    UndefinedRate,
    MissingCounterfactuals,
    MissingModels,
    DegenerateGap,
    MalformedRow,
    MissingColumn,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace uplift
