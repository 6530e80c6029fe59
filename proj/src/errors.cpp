#include "uplift/errors.hpp"

namespace uplift {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteScore: return "NonFiniteScore";
        case ErrorCode::EmptyPopulation: return "EmptyPopulation";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingKpi: return "MissingKpi";
        case ErrorCode::MissingEndFeatures: return "MissingEndFeatures";
        case ErrorCode::SizeMismatch: return "SizeMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NonBinaryInput: return "NonBinaryInput";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::UndefinedRate: return "UndefinedRate";
        case ErrorCode::MissingCounterfactuals: return "MissingCounterfactuals";
        case ErrorCode::MissingModels: return "MissingModels";
        case ErrorCode::DegenerateGap: return "DegenerateGap";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace uplift
