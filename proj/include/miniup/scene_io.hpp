#pragma once

#include <string>
#include <vector>

#include "miniup/scene.hpp"

namespace miniup {

/// Optional [sweep] block of a scene file: lists of parameter values used to
/// generate several variants of one scene for dataset construction. Empty
/// lists fall back to the scene's base value. Variants are expanded as the
/// cartesian product, mass outermost, time_step innermost.
struct SceneSweep {
    std::vector<double> masses;
    std::vector<double> stiffness_scales; // multiplies all three stiffnesses
    std::vector<double> time_steps;

    bool empty() const { return masses.empty() && stiffness_scales.empty() && time_steps.empty(); }
};

struct LoadedScene {
    SceneConfig scene;
    SceneSweep sweep;
};

/// Parses the key/value scene format with [section] headers and '#' comments.
/// Sections: [cloth], [scene], [wind] (optional), [collider] (repeatable),
/// [solver], [sweep] (optional). Throws ConfigError with "path:line:"
/// prefixes on syntax or value errors; the result is validated before return.
LoadedScene load_scene(const std::string& path);

/// Same parser over an in-memory string; `name` is used in error messages.
LoadedScene parse_scene(const std::string& text, const std::string& name);

/// All sweep variants of a scene, base scene first when the sweep is empty.
std::vector<SceneConfig> expand_sweep(const SceneConfig& base, const SceneSweep& sweep);

} // namespace miniup
