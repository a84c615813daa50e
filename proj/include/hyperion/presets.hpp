#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hyperion/config.hpp"

namespace hyperion {

/// Names of the built-in experiment presets, in a fixed order.
std::vector<std::string> preset_names();

/// Config of a preset, in the same schema as a config file. Throws
/// ConfigError for an unknown name.
json preset_config(std::string_view name);

}  // namespace hyperion
