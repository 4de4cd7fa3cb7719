#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "model.hpp"

namespace nrsim
{

//! Schema tag written into every scenario document.
inline constexpr std::string_view kScenarioSchema = "nrsim.scenario/1";

/*!
 * Parse a scenario document (JSON) and validate it.
 *
 * Malformed documents raise ScenarioError with a line/column or field path;
 * structurally valid documents that break model invariants raise
 * ValidationError carrying every violation.
 */
ScenarioModel load_scenario(std::string_view text);

//! Parse without validating. Used by the validate command to report all
//! violations instead of throwing.
ScenarioModel parse_scenario(std::string_view text);

ScenarioModel load_scenario_file(std::filesystem::path const& path);

//! Serialize to the scenario document format. Doubles are written in
//! shortest round-trip form, so load_scenario(serialize_scenario(m)) is
//! bit-exact.
std::string serialize_scenario(ScenarioModel const& model);

}  // namespace nrsim
