// SPDX-License-Identifier: Apache-2.0
#include <companion/error.hpp>

namespace companion
{

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
        case ErrorCode::DegenerateStroke: return "DegenerateStroke";
        case ErrorCode::EmptyElement: return "EmptyElement";
        case ErrorCode::DuplicateElementId: return "DuplicateElementId";
        case ErrorCode::RejectedByConstraint: return "RejectedByConstraint";
        case ErrorCode::InvalidDocument: return "InvalidDocument";
        case ErrorCode::DegenerateSegment: return "DegenerateSegment";
        case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::InvalidPolygon: return "InvalidPolygon";
        case ErrorCode::InvalidDensity: return "InvalidDensity";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::SamplingFailed: return "SamplingFailed";
        case ErrorCode::InvalidPassCount: return "InvalidPassCount";
        case ErrorCode::UnknownTool: return "UnknownTool";
        case ErrorCode::ArgSchemaMismatch: return "ArgSchemaMismatch";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::MissingMethod: return "MissingMethod";
        case ErrorCode::InvalidImage: return "InvalidImage";
        case ErrorCode::BackendError: return "BackendError";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::EmptyStrokes: return "EmptyStrokes";
        case ErrorCode::TurnInProgress: return "TurnInProgress";
        case ErrorCode::BadConfig: return "BadConfig";
        case ErrorCode::UnknownAssertion: return "UnknownAssertion";
        case ErrorCode::EmptyCanvas: return "EmptyCanvas";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view text) noexcept
{
    for (int i = 0; i <= static_cast<int>(ErrorCode::Io); ++i)
        if (to_string(static_cast<ErrorCode>(i)) == text)
            return static_cast<ErrorCode>(i);
    return std::nullopt;
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json detail):
    std::runtime_error(message), _code(code), _detail(std::move(detail))
{
}

nlohmann::json Error::to_json() const
{
    auto doc = nlohmann::json { { "code", to_string(_code) }, { "message", what() } };
    if (!_detail.is_null())
        doc["detail"] = _detail;
    return doc;
}

} // namespace companion
