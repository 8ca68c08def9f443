#pragma once

#include <string>
#include <vector>

#include "miniup/cloth.hpp"

namespace miniup {

/// An ordered trajectory of particle positions plus the cloth spec it was
/// produced with. world_scale is 1 for target-resolution runs and 1/f for
/// miniature runs. frame_ms (per-frame wall clock) is transient and is not
/// written to disk so that identical inputs produce identical files.
struct FrameSequence {
    GridClothSpec spec;
    std::vector<std::vector<Vec3>> frames;
    double world_scale = 1.0;
    uint64_t scene_hash = 0;
    double time_step = 0.0;
    uint32_t warm_up_frames = 0;

    std::vector<double> frame_ms; // transient, not serialized

    int frame_count() const { return static_cast<int>(frames.size()); }
    int particle_count() const { return spec.particle_count(); }

    void validate() const; // consistent particle counts, finite values
};

/// Binary trajectory file. Layout (all integers and floats little-endian):
///   magic "MUFR", u32 version,
///   u32 rows, u32 cols, f64 spacing, f64 particle_mass,
///   f64 k_structural, f64 k_shear, f64 k_bend, f64 damping,
///   u64 scene_hash, f64 time_step, u32 warm_up_frames,
///   u64 particle_count, u64 frame_count, f64 world_scale,
///   then frame_count frames of particle_count * 3 f64, particle-major (x,y,z).
void save_frames(const FrameSequence& seq, const std::string& path);
FrameSequence load_frames(const std::string& path);

/// Per-frame timing table: "frame_index,milliseconds" rows with a header.
void write_timing_csv(const std::vector<double>& frame_ms, const std::string& path);

} // namespace miniup
