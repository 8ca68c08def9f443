#pragma once

#include <Eigen/Dense>
#include <string>

#include "miniup/patches.hpp"

namespace miniup {

/// Training pairs as row-per-sample matrices, plus the metadata needed to
/// check a model against the data it was trained on.
struct Dataset {
    FeatureKind kind = FeatureKind::Pos3Frames;
    int factor = 2;
    Normalization normalization = Normalization::Centroid;
    uint32_t patch_order = kPatchOrderRowMajor;
    Eigen::MatrixXd inputs;  // N x input_dim(kind)
    Eigen::MatrixXd outputs; // N x output_dim(factor)

    long size() const { return inputs.rows(); }
    int in_dim() const { return static_cast<int>(inputs.cols()); }
    int out_dim() const { return static_cast<int>(outputs.cols()); }

    /// Concatenates another run's pairs; kind, factor, normalization and
    /// dims must match.
    void append(const Dataset& other);
};

/// Builds (input, ground-truth output) pairs from one target trajectory:
/// down-samples it to the miniature, enumerates patches and emits one pair
/// per patch per frame t in [2, frame_count). Row order is frame-major,
/// patch-minor, so identical inputs give identical files.
Dataset build_dataset(const FrameSequence& target_frames, int factor, FeatureKind kind,
                      Normalization norm);

/// Binary dataset file. Layout (little-endian):
///   magic "MUDS", u32 version,
///   u32 kind, u32 input_dim, u32 output_dim, u64 pair_count,
///   u32 factor, u32 normalization, u32 patch_order,
///   then pair_count records of input_dim + output_dim f64.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace miniup
