#include "miniup/dataset.hpp"

#include <fstream>

#include "binio.hpp"
#include "miniup/errors.hpp"

namespace miniup {

namespace {
constexpr char kMagic[4] = {'M', 'U', 'D', 'S'};
constexpr uint32_t kVersion = 1;
} // namespace

void Dataset::append(const Dataset& other) {
    if (other.kind != kind)
        throw CompatError(std::string("feature kind mismatch: ") + feature_kind_name(kind) + " vs " +
                          feature_kind_name(other.kind));
    if (other.factor != factor)
        throw CompatError("DSDS factor mismatch: " + std::to_string(factor) + " vs " +
                          std::to_string(other.factor));
    if (other.normalization != normalization) throw CompatError("normalization mode mismatch");
    if (other.patch_order != patch_order) throw CompatError("patch ordering mismatch");
    if (other.in_dim() != in_dim() || other.out_dim() != out_dim())
        throw CompatError("pair dims " + std::to_string(other.in_dim()) + "/" +
                          std::to_string(other.out_dim()) + " do not match " + std::to_string(in_dim()) +
                          "/" + std::to_string(out_dim()));

    const long n = size(), m = other.size();
    inputs.conservativeResize(n + m, Eigen::NoChange);
    outputs.conservativeResize(n + m, Eigen::NoChange);
    inputs.bottomRows(m) = other.inputs;
    outputs.bottomRows(m) = other.outputs;
}

Dataset build_dataset(const FrameSequence& target_frames, int factor, FeatureKind kind,
                      Normalization norm) {
    target_frames.validate();
    auto [mini_spec, mapping] = down_sample_spec(target_frames.spec, factor);
    (void)mini_spec;
    const FrameSequence mini = down_sample_frames(target_frames, mapping);
    const std::vector<PatchPair> patches = enumerate_patches(mapping);

    Dataset ds;
    ds.kind = kind;
    ds.factor = factor;
    ds.normalization = norm;

    const int frames = target_frames.frame_count();
    const long usable = frames >= 3 ? frames - 2 : 0;
    const long pairs = usable * static_cast<long>(patches.size());
    ds.inputs.resize(pairs, input_dim(kind));
    ds.outputs.resize(pairs, output_dim(factor));

    long row = 0;
    for (int t = 2; t < frames; ++t) {
        const auto& target_frame = target_frames.frames[static_cast<size_t>(t)];
        const auto& mini_frame = mini.frames[static_cast<size_t>(t)];
        for (const PatchPair& patch : patches) {
            const Vec3 anchor = norm == Normalization::Centroid
                                    ? Vec3(factor * patch_centroid(mini_frame, patch))
                                    : Vec3(Vec3::Zero());
            const std::vector<double> in = extract_input(mini, t, patch, kind, norm);
            const std::vector<double> out = extract_output(target_frame, patch, anchor);
            for (size_t i = 0; i < in.size(); ++i) ds.inputs(row, static_cast<long>(i)) = in[i];
            for (size_t i = 0; i < out.size(); ++i) ds.outputs(row, static_cast<long>(i)) = out[i];
            ++row;
        }
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path);

    os.write(kMagic, 4);
    binio::put_u32(os, kVersion);
    binio::put_u32(os, static_cast<uint32_t>(ds.kind));
    binio::put_u32(os, static_cast<uint32_t>(ds.in_dim()));
    binio::put_u32(os, static_cast<uint32_t>(ds.out_dim()));
    binio::put_u64(os, static_cast<uint64_t>(ds.size()));
    binio::put_u32(os, static_cast<uint32_t>(ds.factor));
    binio::put_u32(os, static_cast<uint32_t>(ds.normalization));
    binio::put_u32(os, ds.patch_order);

    for (long n = 0; n < ds.size(); ++n) {
        for (long i = 0; i < ds.in_dim(); ++i) binio::put_f64(os, ds.inputs(n, i));
        for (long i = 0; i < ds.out_dim(); ++i) binio::put_f64(os, ds.outputs(n, i));
    }
    if (!os) throw FormatError("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path);

    binio::check_magic(is, kMagic, "dataset", path);
    const uint32_t version = binio::get_u32(is, "version");
    if (version != kVersion)
        throw FormatError("unsupported dataset format version " + std::to_string(version) + " in " + path);

    Dataset ds;
    const uint32_t kind = binio::get_u32(is, "kind");
    if (kind > 2) throw FormatError("unknown feature kind tag " + std::to_string(kind) + " in " + path);
    ds.kind = static_cast<FeatureKind>(kind);
    const uint32_t in_dim = binio::get_u32(is, "input_dim");
    const uint32_t out_dim = binio::get_u32(is, "output_dim");
    const uint64_t count = binio::get_u64(is, "pair_count");
    ds.factor = static_cast<int>(binio::get_u32(is, "factor"));
    const uint32_t norm = binio::get_u32(is, "normalization");
    if (norm > 1) throw FormatError("unknown normalization tag " + std::to_string(norm) + " in " + path);
    ds.normalization = static_cast<Normalization>(norm);
    ds.patch_order = binio::get_u32(is, "patch_order");

    if (static_cast<int>(in_dim) != input_dim(ds.kind))
        throw FormatError("input dim " + std::to_string(in_dim) + " inconsistent with feature kind in " + path);
    if (static_cast<int>(out_dim) != output_dim(ds.factor))
        throw FormatError("output dim " + std::to_string(out_dim) + " inconsistent with factor in " + path);

    ds.inputs.resize(static_cast<long>(count), static_cast<long>(in_dim));
    ds.outputs.resize(static_cast<long>(count), static_cast<long>(out_dim));
    for (uint64_t n = 0; n < count; ++n) {
        for (uint32_t i = 0; i < in_dim; ++i)
            ds.inputs(static_cast<long>(n), static_cast<long>(i)) = binio::get_f64(is, "pair input");
        for (uint32_t i = 0; i < out_dim; ++i)
            ds.outputs(static_cast<long>(n), static_cast<long>(i)) = binio::get_f64(is, "pair output");
    }
    return ds;
}

} // namespace miniup
