#pragma once

#include <string>
#include <string_view>

#include "mtfe/model.hpp"

namespace mtfe {

/// Flat `key = value` text mirroring ModelSpec. Numbers are written with 17 significant
/// digits so that parse_config(to_config(s)) == s.
std::string to_config(const ModelSpec& spec);

/// Throws SolverError(ConfigError) on syntax errors, unknown keys or bad values. Keys that are
/// absent keep their ModelSpec defaults.
ModelSpec parse_config(std::string_view text);

ModelSpec load_config(const std::string& path);

std::string format_double(double v);

}  // namespace mtfe
