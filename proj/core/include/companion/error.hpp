// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace companion
{

enum class ErrorCode
{
    // geometry-canvas
    DegenerateStroke,
    EmptyElement,
    DuplicateElementId,
    RejectedByConstraint,
    InvalidDocument,

    // draw-tools
    DegenerateSegment,
    NonPositiveRadius,
    TooFewPoints,
    EmptyText,
    InvalidPolygon,
    InvalidDensity,
    InvalidArgument,
    SamplingFailed,
    InvalidPassCount,

    // agent-runtime
    UnknownTool,
    ArgSchemaMismatch,
    ConstraintViolation,
    MissingMethod,
    InvalidImage,
    BackendError,
    Timeout,

    // perception
    DegenerateConfiguration,
    ImageTooSmall,

    // session-service
    UnknownSession,
    EmptyStrokes,
    TurnInProgress,
    BadConfig,

    // cli
    UnknownAssertion,
    EmptyCanvas,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> error_code_from_string(std::string_view text) noexcept;

/// Every failure raised by the library. `detail` carries structured context,
/// e.g. the validation report behind a ConstraintViolation.
class Error: public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& message, nlohmann::json detail = nullptr);

    [[nodiscard]] ErrorCode code() const noexcept { return _code; }
    [[nodiscard]] const nlohmann::json& detail() const noexcept { return _detail; }

    [[nodiscard]] nlohmann::json to_json() const;

  private:
    ErrorCode _code;
    nlohmann::json _detail;
};

} // namespace companion
