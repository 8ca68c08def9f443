#include "miniup/upscale.hpp"

#include <cmath>
#include <stdexcept>

#include "miniup/errors.hpp"
#include "miniup/parallel.hpp"

namespace miniup {

const char* interp_method_name(InterpMethod m) {
    switch (m) {
        case InterpMethod::Bilinear: return "bilinear";
        case InterpMethod::Biquadratic: return "biquadratic";
        case InterpMethod::Bicubic: return "bicubic";
    }
    throw std::invalid_argument("unknown interpolation method");
}

InterpMethod parse_interp_method(const std::string& name) {
    if (name == "bilinear") return InterpMethod::Bilinear;
    if (name == "biquadratic") return InterpMethod::Biquadratic;
    if (name == "bicubic") return InterpMethod::Bicubic;
    throw std::invalid_argument("unknown interpolation method '" + name +
                                "' (expected bilinear, biquadratic or bicubic)");
}

void check_model_compat(const MlpModel& model, const DsdsMapping& mapping) {
    if (model.factor != mapping.factor)
        throw CompatError("model DSDS factor " + std::to_string(model.factor) +
                          " does not match scene factor " + std::to_string(mapping.factor));
    if (model.patch_order != kPatchOrderRowMajor)
        throw CompatError("model patch ordering tag " + std::to_string(model.patch_order) +
                          " is not the row-major ordering " + std::to_string(kPatchOrderRowMajor));
    if (model.in_dim() != input_dim(model.feature_kind))
        throw CompatError("model input dim " + std::to_string(model.in_dim()) +
                          " does not match its feature kind " + feature_kind_name(model.feature_kind) +
                          " (" + std::to_string(input_dim(model.feature_kind)) + ")");
    if (model.out_dim() != output_dim(mapping.factor))
        throw CompatError("model output dim " + std::to_string(model.out_dim()) +
                          " does not match factor-" + std::to_string(mapping.factor) + " blocks (" +
                          std::to_string(output_dim(mapping.factor)) + ")");
}

std::vector<Vec3> upscale_dnn(const MlpModel& model, const FrameSequence& mini_frames, int t,
                              const DsdsMapping& mapping, const std::vector<PatchPair>& patches,
                              const AssemblyPlan& plan, int threads, bool bootstrap) {
    check_model_compat(model, mapping);
    if (mini_frames.spec.rows != mapping.mini_rows || mini_frames.spec.cols != mapping.mini_cols)
        throw CompatError("miniature frames grid " + std::to_string(mini_frames.spec.rows) + "x" +
                          std::to_string(mini_frames.spec.cols) + " does not match mapping " +
                          std::to_string(mapping.mini_rows) + "x" + std::to_string(mapping.mini_cols));

    const int patch_count = static_cast<int>(patches.size());
    Eigen::MatrixXd inputs(patch_count, model.in_dim());
    parallel_for(patch_count, threads, [&](int begin, int end) {
        for (int pi = begin; pi < end; ++pi) {
            const std::vector<double> v = extract_input(mini_frames, t, patches[static_cast<size_t>(pi)],
                                                        model.feature_kind, model.normalization, bootstrap);
            for (size_t i = 0; i < v.size(); ++i) inputs(pi, static_cast<long>(i)) = v[i];
        }
    });

    // single batched forward; Eigen runs serially, so this is thread-count independent
    const Eigen::MatrixXd raw = forward_batch(model, inputs);

    std::vector<std::vector<double>> predictions(static_cast<size_t>(patch_count));
    const auto& anchor_frame = mini_frames.frames[static_cast<size_t>(t)];
    parallel_for(patch_count, threads, [&](int begin, int end) {
        for (int pi = begin; pi < end; ++pi) {
            const PatchPair& patch = patches[static_cast<size_t>(pi)];
            const Vec3 anchor = model.normalization == Normalization::Centroid
                                    ? Vec3(mapping.factor * patch_centroid(anchor_frame, patch))
                                    : Vec3(Vec3::Zero());
            std::vector<double>& out = predictions[static_cast<size_t>(pi)];
            out.resize(static_cast<size_t>(model.out_dim()));
            for (long i = 0; i < model.out_dim(); i += 3) {
                out[static_cast<size_t>(i)] = raw(pi, i) + anchor.x();
                out[static_cast<size_t>(i + 1)] = raw(pi, i + 1) + anchor.y();
                out[static_cast<size_t>(i + 2)] = raw(pi, i + 2) + anchor.z();
            }
        }
    });

    return assemble_target(predictions, mapping, patches, plan, threads);
}

std::vector<Vec3> upscale_dnn(const MlpModel& model, const FrameSequence& mini_frames, int t,
                              const DsdsMapping& mapping, int threads, bool bootstrap) {
    const std::vector<PatchPair> patches = enumerate_patches(mapping);
    const AssemblyPlan plan = build_assembly_plan(mapping, patches);
    return upscale_dnn(model, mini_frames, t, mapping, patches, plan, threads, bootstrap);
}

namespace {

struct Stencil {
    int base = 0;
    std::array<double, 4> w{}; // first `size` entries used
    int size = 0;
};

// Lagrange weights over `size` consecutive integer nodes starting at base.
Stencil make_stencil(double u, int nodes, int size, const char* method) {
    if (nodes < size)
        throw std::invalid_argument(std::string(method) + " needs at least " + std::to_string(size) +
                                    " points per axis, miniature has " + std::to_string(nodes));
    Stencil st;
    st.size = size;
    int base = 0;
    if (size == 2) base = static_cast<int>(std::floor(u));
    else if (size == 3) base = static_cast<int>(std::lround(u)) - 1;
    else base = static_cast<int>(std::floor(u)) - 1;
    st.base = std::clamp(base, 0, nodes - size);
    for (int i = 0; i < size; ++i) {
        double w = 1.0;
        for (int j = 0; j < size; ++j) {
            if (j == i) continue;
            w *= (u - (st.base + j)) / static_cast<double>(i - j);
        }
        st.w[static_cast<size_t>(i)] = w;
    }
    return st;
}

} // namespace

std::vector<Vec3> upscale_interp(const std::vector<Vec3>& mini_frame, const DsdsMapping& mapping,
                                 InterpMethod method, int threads) {
    if (static_cast<int>(mini_frame.size()) != mapping.mini_particle_count())
        throw CompatError("miniature frame has " + std::to_string(mini_frame.size()) +
                          " particles, mapping expects " + std::to_string(mapping.mini_particle_count()));

    const int size = method == InterpMethod::Bilinear ? 2 : method == InterpMethod::Biquadratic ? 3 : 4;
    const char* name = interp_method_name(method);
    const int f = mapping.factor;
    const int R = mapping.target_rows, C = mapping.target_cols;

    std::vector<Stencil> row_st, col_st;
    row_st.reserve(static_cast<size_t>(R));
    col_st.reserve(static_cast<size_t>(C));
    for (int rt = 0; rt < R; ++rt)
        row_st.push_back(make_stencil(static_cast<double>(rt) / f, mapping.mini_rows, size, name));
    for (int ct = 0; ct < C; ++ct)
        col_st.push_back(make_stencil(static_cast<double>(ct) / f, mapping.mini_cols, size, name));

    std::vector<Vec3> out(static_cast<size_t>(R) * static_cast<size_t>(C));
    parallel_for(R, threads, [&](int begin, int end) {
        for (int rt = begin; rt < end; ++rt) {
            const Stencil& sr = row_st[static_cast<size_t>(rt)];
            for (int ct = 0; ct < C; ++ct) {
                const Stencil& sc = col_st[static_cast<size_t>(ct)];
                Vec3 acc = Vec3::Zero();
                for (int a = 0; a < sr.size; ++a) {
                    Vec3 row_acc = Vec3::Zero();
                    for (int b = 0; b < sc.size; ++b)
                        row_acc += sc.w[static_cast<size_t>(b)] *
                                   mini_frame[static_cast<size_t>(
                                       mapping.mini_index(sr.base + a, sc.base + b))];
                    acc += sr.w[static_cast<size_t>(a)] * row_acc;
                }
                out[static_cast<size_t>(rt) * C + ct] = static_cast<double>(f) * acc;
            }
        }
    });
    return out;
}

} // namespace miniup
