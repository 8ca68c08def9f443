#pragma once

#include <utility>

#include "miniup/frames.hpp"
#include "miniup/scene.hpp"

namespace miniup {

/// Correspondence between a target grid and its down-sampled miniature:
/// miniature (i, j) maps to target (f*i, f*j). Requires (rows-1) and
/// (cols-1) divisible by f.
struct DsdsMapping {
    int factor = 2;
    int target_rows = 0, target_cols = 0;
    int mini_rows = 0, mini_cols = 0;

    int mini_particle_count() const { return mini_rows * mini_cols; }
    int target_particle_count() const { return target_rows * target_cols; }
    int mini_index(int i, int j) const { return i * mini_cols + j; }
    // target particle index under miniature grid coordinates (i, j)
    int target_index(int i, int j) const { return (factor * i) * target_cols + factor * j; }
};

/// Down-samples the grid: dims become ((R-1)/f + 1, (C-1)/f + 1); spacing,
/// mass, stiffnesses and damping are kept, so rest lengths are preserved.
/// Rejects f < 2 and non-divisible dims, naming the offending dimension.
std::pair<GridClothSpec, DsdsMapping> down_sample_spec(const GridClothSpec& target, int f);

/// Builds the miniature scene: cloth replaced by the down-sampled spec, all
/// world lengths (origin, collider centers and radii) divided by f, gravity
/// and wind strength multiplied by 1/f, h / masses / stiffness / solver
/// settings unchanged. Pins are remapped to the miniature grid; pins not on
/// the kept lattice are dropped.
SceneConfig down_scale_scene(const SceneConfig& target_scene, int f);

/// Keeps only mapped particles and multiplies every position by 1/f; this is
/// the training-data path (the miniature trajectory derived from a target
/// simulation). Inference instead simulates the down-scaled scene directly;
/// both produce frames in the 1/f world (world_scale = input scale / f).
FrameSequence down_sample_frames(const FrameSequence& target_frames, const DsdsMapping& mapping);

} // namespace miniup
