// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace companion
{

/// Function-declaration document handed to the model:
/// {"function_declarations": [{name, description, parameters}, ...]}.
const nlohmann::json& tool_schema();

/// Names of the declared drawing tools, in declaration order.
const std::vector<std::string>& tool_names();

/// Parameter schema of one tool, or nullptr for an unknown name.
const nlohmann::json* tool_parameters(std::string_view name);

/// Validates `value` against the JSON-Schema subset used by the declarations
/// (type, properties, required, items, minItems, maxItems, minimum, maximum,
/// minLength, enum). Object properties are closed: unknown keys fail.
/// Throws ArgSchemaMismatch naming the offending path.
void validate_against_schema(const nlohmann::json& value, const nlohmann::json& schema, const std::string& path = "$");

} // namespace companion
