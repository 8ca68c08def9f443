#include "miniup/patches.hpp"

#include <stdexcept>
#include <string>

#include "miniup/errors.hpp"
#include "miniup/parallel.hpp"

namespace miniup {

int input_dim(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Pos3Frames: return 36;
        case FeatureKind::Pos: return 12;
        case FeatureKind::PosVel: return 24;
    }
    throw std::invalid_argument("unknown feature kind");
}

int output_dim(int factor) {
    if (factor < 2) throw std::invalid_argument("DSDS factor must be >= 2");
    return 3 * (factor + 1) * (factor + 1);
}

const char* feature_kind_name(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Pos3Frames: return "pos3frames";
        case FeatureKind::Pos: return "pos";
        case FeatureKind::PosVel: return "posvel";
    }
    throw std::invalid_argument("unknown feature kind");
}

FeatureKind parse_feature_kind(const std::string& name) {
    if (name == "pos3frames") return FeatureKind::Pos3Frames;
    if (name == "pos") return FeatureKind::Pos;
    if (name == "posvel") return FeatureKind::PosVel;
    throw std::invalid_argument("unknown feature kind '" + name + "' (expected pos3frames, pos or posvel)");
}

std::vector<PatchPair> enumerate_patches(const DsdsMapping& mapping) {
    if (mapping.mini_rows < 2 || mapping.mini_cols < 2)
        throw std::invalid_argument("patch enumeration needs a miniature grid of at least 2x2");

    const int f = mapping.factor;
    std::vector<PatchPair> patches;
    patches.reserve(static_cast<size_t>((mapping.mini_rows - 1) * (mapping.mini_cols - 1)));
    for (int i = 0; i + 1 < mapping.mini_rows; ++i)
        for (int j = 0; j + 1 < mapping.mini_cols; ++j) {
            PatchPair p;
            p.i = i;
            p.j = j;
            p.mini = {mapping.mini_index(i, j), mapping.mini_index(i, j + 1),
                      mapping.mini_index(i + 1, j), mapping.mini_index(i + 1, j + 1)};
            p.target.reserve(static_cast<size_t>((f + 1) * (f + 1)));
            for (int a = 0; a <= f; ++a)
                for (int b = 0; b <= f; ++b)
                    p.target.push_back((f * i + a) * mapping.target_cols + (f * j + b));
            patches.push_back(std::move(p));
        }
    return patches;
}

Vec3 patch_centroid(const std::vector<Vec3>& mini_frame, const PatchPair& patch) {
    Vec3 c = Vec3::Zero();
    for (int idx : patch.mini) c += mini_frame[idx];
    return c / 4.0;
}

namespace {

void append_positions(std::vector<double>& out, const std::vector<Vec3>& frame,
                      const PatchPair& patch, const Vec3& offset) {
    for (int idx : patch.mini) {
        const Vec3 p = frame[idx] - offset;
        out.push_back(p.x());
        out.push_back(p.y());
        out.push_back(p.z());
    }
}

} // namespace

std::vector<double> extract_input(const FrameSequence& mini_frames, int t, const PatchPair& patch,
                                  FeatureKind kind, Normalization norm, bool bootstrap) {
    const int n = mini_frames.frame_count();
    if (t < 0 || t >= n) throw std::out_of_range("frame " + std::to_string(t) + " out of range");
    const bool needs_history = kind != FeatureKind::Pos;
    if (needs_history && t < 2 && !bootstrap)
        throw std::out_of_range("frame " + std::to_string(t) + " needs two predecessors (enable bootstrap)");

    const auto frame_at = [&](int idx) -> const std::vector<Vec3>& {
        return mini_frames.frames[static_cast<size_t>(idx < 0 ? 0 : idx)];
    };
    const Vec3 centroid = norm == Normalization::Centroid
                              ? patch_centroid(mini_frames.frames[static_cast<size_t>(t)], patch)
                              : Vec3(Vec3::Zero());

    std::vector<double> values;
    values.reserve(static_cast<size_t>(input_dim(kind)));
    switch (kind) {
        case FeatureKind::Pos3Frames:
            append_positions(values, frame_at(t - 2), patch, centroid);
            append_positions(values, frame_at(t - 1), patch, centroid);
            append_positions(values, frame_at(t), patch, centroid);
            break;
        case FeatureKind::Pos:
            append_positions(values, frame_at(t), patch, centroid);
            break;
        case FeatureKind::PosVel: {
            if (!(mini_frames.time_step > 0.0))
                throw std::invalid_argument("velocity features need a positive time_step");
            append_positions(values, frame_at(t), patch, centroid);
            const auto& cur = frame_at(t);
            const auto& prev = frame_at(t - 1);
            for (int idx : patch.mini) {
                const Vec3 v = (cur[idx] - prev[idx]) / mini_frames.time_step;
                values.push_back(v.x());
                values.push_back(v.y());
                values.push_back(v.z());
            }
            break;
        }
    }
    return values;
}

std::vector<double> extract_output(const std::vector<Vec3>& target_frame, const PatchPair& patch,
                                   const Vec3& anchor) {
    for (int idx : patch.target)
        if (idx < 0 || idx >= static_cast<int>(target_frame.size()))
            throw std::invalid_argument("patch target index out of range for the given frame");

    std::vector<double> values;
    values.reserve(3 * patch.target.size());
    for (int idx : patch.target) {
        const Vec3 p = target_frame[idx] - anchor;
        values.push_back(p.x());
        values.push_back(p.y());
        values.push_back(p.z());
    }
    return values;
}

std::vector<int> AssemblyPlan::coverage() const {
    std::vector<int> counts;
    counts.reserve(sources.size());
    for (const auto& src : sources) counts.push_back(static_cast<int>(src.size()));
    return counts;
}

AssemblyPlan build_assembly_plan(const DsdsMapping& mapping, const std::vector<PatchPair>& patches) {
    AssemblyPlan plan;
    plan.sources.assign(static_cast<size_t>(mapping.target_particle_count()), {});
    for (size_t pi = 0; pi < patches.size(); ++pi)
        for (size_t slot = 0; slot < patches[pi].target.size(); ++slot) {
            const int idx = patches[pi].target[slot];
            if (idx < 0 || idx >= mapping.target_particle_count())
                throw std::invalid_argument("patch target index out of range for the mapping");
            plan.sources[static_cast<size_t>(idx)].emplace_back(static_cast<int>(pi),
                                                                static_cast<int>(slot));
        }
    for (const auto& src : plan.sources)
        if (src.empty()) throw std::invalid_argument("assembly plan leaves a target particle uncovered");
    return plan;
}

std::vector<Vec3> assemble_target(const std::vector<std::vector<double>>& predictions,
                                  const DsdsMapping& mapping, const std::vector<PatchPair>& patches,
                                  const AssemblyPlan& plan, int threads) {
    if (predictions.size() != patches.size())
        throw std::invalid_argument("need exactly one prediction per patch, got " +
                                    std::to_string(predictions.size()) + " for " +
                                    std::to_string(patches.size()) + " patches");
    const size_t dim = static_cast<size_t>(output_dim(mapping.factor));
    for (const auto& p : predictions)
        if (p.size() != dim)
            throw std::invalid_argument("prediction length " + std::to_string(p.size()) +
                                        " does not match output dim " + std::to_string(dim));

    const int n = mapping.target_particle_count();
    std::vector<Vec3> out(static_cast<size_t>(n));
    parallel_for(n, threads, [&](int begin, int end) {
        for (int p = begin; p < end; ++p) {
            Vec3 acc = Vec3::Zero();
            const auto& src = plan.sources[static_cast<size_t>(p)];
            for (const auto& [pi, slot] : src) {
                const double* v = &predictions[static_cast<size_t>(pi)][3 * static_cast<size_t>(slot)];
                acc += Vec3(v[0], v[1], v[2]);
            }
            out[static_cast<size_t>(p)] = acc / static_cast<double>(src.size());
        }
    });
    return out;
}

std::vector<Vec3> assemble_target(const std::vector<std::vector<double>>& predictions,
                                  const DsdsMapping& mapping, const std::vector<PatchPair>& patches,
                                  int threads) {
    return assemble_target(predictions, mapping, patches, build_assembly_plan(mapping, patches), threads);
}

} // namespace miniup
