#pragma once

#include <string>

#include "cover/configuration.hpp"

namespace cover {

// Standalone SVG of the configuration: circle polygon, rectangle, segment,
// and their convex hull, annotated with the hull area. Byte-deterministic
// for identical inputs.
std::string config_svg(const ConfigParams& params, const ShapeSpec& spec = {});

void render_config_svg(const ConfigParams& params, const std::string& out_path,
                       const ShapeSpec& spec = {});

}  // namespace cover
