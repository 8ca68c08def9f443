#pragma once

#include <string>
#include <vector>

#include "miniup/mlp.hpp"
#include "miniup/patches.hpp"

namespace miniup {

enum class InterpMethod : uint8_t { Bilinear = 0, Biquadratic = 1, Bicubic = 2 };

const char* interp_method_name(InterpMethod m);
InterpMethod parse_interp_method(const std::string& name);

/// Checks a model against a mapping + feature configuration; throws a
/// CompatError naming the mismatched field.
void check_model_compat(const MlpModel& model, const DsdsMapping& mapping);

/// One upscaled target frame from the miniature trajectory at frame t:
/// per patch extract_input -> forward -> denormalize, then overlap-mean
/// assembly. Frames t-1, t-2 bootstrap-clamp to frame 0 when allowed.
/// Output positions are in target world scale. Bitwise identical for any
/// thread count.
std::vector<Vec3> upscale_dnn(const MlpModel& model, const FrameSequence& mini_frames, int t,
                              const DsdsMapping& mapping, int threads = 1, bool bootstrap = true);

/// Same, with precomputed patches/plan for per-frame calls in a loop.
std::vector<Vec3> upscale_dnn(const MlpModel& model, const FrameSequence& mini_frames, int t,
                              const DsdsMapping& mapping, const std::vector<PatchPair>& patches,
                              const AssemblyPlan& plan, int threads = 1, bool bootstrap = true);

/// Classical baseline: per-coordinate tensor-product Lagrange interpolation
/// of the miniature grid at the target grid parameters (i/f, j/f), scaled by
/// f back to target world scale. Stencils are 2/3/4 points per axis for
/// bilinear/biquadratic/bicubic, clamped one-sided at the grid boundary.
/// Mapped miniature particles reproduce exactly (nodal weights are exact).
std::vector<Vec3> upscale_interp(const std::vector<Vec3>& mini_frame, const DsdsMapping& mapping,
                                 InterpMethod method, int threads = 1);

} // namespace miniup
