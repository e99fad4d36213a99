// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <companion/canvas.hpp>
#include <companion/messages.hpp>

#include <string>
#include <vector>

namespace companion
{

struct DispatchResult
{
    CanvasState canvas;
    std::string element_id;
    std::vector<Polyline> polylines; ///< as stored, after clipping
};

/// Runs one model tool call against `canvas`: schema check, size minima,
/// tool execution with the call's seed, margin clipping, placement check
/// (buffer and height cap, `attach_to` exempt) and finally the mutation.
/// The input canvas is never modified; on any error nothing is returned.
///
/// Errors: UnknownTool, ArgSchemaMismatch, ConstraintViolation (detail holds
/// the report), and the draw-tool errors unchanged.
DispatchResult dispatch_tool_call(const ToolCall& call, const CanvasState& canvas);

} // namespace companion
