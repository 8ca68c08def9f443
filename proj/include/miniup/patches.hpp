#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "miniup/dsds.hpp"
#include "miniup/frames.hpp"

namespace miniup {

/// What goes into the network input for one patch.
///   Pos3Frames: positions at t-2, t-1, t (36 values)
///   Pos:        positions at t (12 values)
///   PosVel:     positions at t plus finite-difference velocities (24 values)
enum class FeatureKind : uint8_t { Pos3Frames = 0, Pos = 1, PosVel = 2 };

/// Input coordinate frame. Centroid subtracts the patch's frame-t miniature
/// centroid from all input positions and predicts target positions relative
/// to factor * centroid; None feeds raw world coordinates.
enum class Normalization : uint8_t { None = 0, Centroid = 1 };

/// Fixed particle ordering inside patches (row-major); recorded in datasets
/// and models so artifacts built with a different layout are rejected.
inline constexpr uint32_t kPatchOrderRowMajor = 1;

int input_dim(FeatureKind kind);
int output_dim(int factor); // 3 * (factor + 1)^2

const char* feature_kind_name(FeatureKind kind);
FeatureKind parse_feature_kind(const std::string& name);

/// One miniature 2x2 grid cell and the (f+1)x(f+1) target block it spans.
/// mini holds (p, q, r, s) row-major; target holds the block row-major.
struct PatchPair {
    int i = 0, j = 0;
    std::array<int, 4> mini{};
    std::vector<int> target;
};

/// All (mini_rows-1) * (mini_cols-1) unit cells in row-major order.
std::vector<PatchPair> enumerate_patches(const DsdsMapping& mapping);

/// Mean of the patch's four miniature particle positions.
Vec3 patch_centroid(const std::vector<Vec3>& mini_frame, const PatchPair& patch);

/// Network input for the patch at frame t of a miniature trajectory.
/// With bootstrap, frame indices below 0 clamp to frame 0 (so t = 0 and 1
/// are usable); without it t < 2 throws for Pos3Frames/PosVel.
/// Centroid normalization subtracts the frame-t patch centroid from every
/// position block; velocities are translation-invariant and kept as-is.
std::vector<double> extract_input(const FrameSequence& mini_frames, int t, const PatchPair& patch,
                                  FeatureKind kind, Normalization norm, bool bootstrap = false);

/// Ground-truth output: the target block's positions minus the anchor.
/// The anchor is factor * patch_centroid for centroid normalization and the
/// zero vector in raw mode.
std::vector<double> extract_output(const std::vector<Vec3>& target_frame, const PatchPair& patch,
                                   const Vec3& anchor);

/// Per-target-particle gather lists (patch index, slot in the patch block),
/// in ascending patch order. Precomputed once, it makes assembly a fixed-
/// order mean: bitwise identical for any thread count.
struct AssemblyPlan {
    std::vector<std::vector<std::pair<int, int>>> sources;
    std::vector<int> coverage() const;
};

AssemblyPlan build_assembly_plan(const DsdsMapping& mapping, const std::vector<PatchPair>& patches);

/// Merges per-patch predictions (already denormalized, target scale) into a
/// full target frame: each particle is the arithmetic mean of every patch
/// value covering it.
std::vector<Vec3> assemble_target(const std::vector<std::vector<double>>& predictions,
                                  const DsdsMapping& mapping, const std::vector<PatchPair>& patches,
                                  const AssemblyPlan& plan, int threads = 1);
std::vector<Vec3> assemble_target(const std::vector<std::vector<double>>& predictions,
                                  const DsdsMapping& mapping, const std::vector<PatchPair>& patches,
                                  int threads = 1);

} // namespace miniup
