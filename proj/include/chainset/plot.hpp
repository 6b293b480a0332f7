#pragma once

#include <optional>
#include <string>

#include "chainset/json_io.hpp"

namespace chainset {

/// Deterministic SVG/CSV rendering of a saved ResultBundle. Bundles of
/// dimension > 2 need an explicit coordinate pair (project).
std::string render_svg(const Json& bundle, std::optional<std::pair<int, int>> project = {});
std::string render_csv(const Json& bundle, std::optional<std::pair<int, int>> project = {});

}  // namespace chainset
