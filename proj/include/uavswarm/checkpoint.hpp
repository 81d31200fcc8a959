#pragma once

#include <string>

#include "uavswarm/mlp.hpp"
#include "uavswarm/policy.hpp"

namespace uavswarm {

inline constexpr int kCheckpointFormatVersion = 1;

/// JSON: {"format_version", "actor": {"sizes", "params"}, "critic": {...}}.
/// Doubles are written with round-trip precision.
void save_checkpoint(const std::string& path, const PolicyParams& params);
/// Throws std::runtime_error on a missing file, version mismatch or a
/// parameter count that disagrees with the recorded shape.
PolicyParams load_checkpoint(const std::string& path);

std::string checkpoint_to_string(const PolicyParams& params);
PolicyParams checkpoint_from_string(const std::string& text);

}  // namespace uavswarm
