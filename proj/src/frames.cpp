#include "miniup/frames.hpp"

#include <fstream>

#include "binio.hpp"

#include "miniup/errors.hpp"

namespace miniup {

namespace {

constexpr char kMagic[4] = {'M', 'U', 'F', 'R'};
constexpr uint32_t kVersion = 1;

using binio::get_f64;
using binio::get_u32;
using binio::get_u64;
using binio::put_f64;
using binio::put_u32;
using binio::put_u64;

} // namespace

void FrameSequence::validate() const {
    const size_t n = static_cast<size_t>(spec.particle_count());
    for (size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() != n)
            throw FormatError("frame " + std::to_string(i) + " has " + std::to_string(frames[i].size()) +
                              " particles, expected " + std::to_string(n));
    }
}

void save_frames(const FrameSequence& seq, const std::string& path) {
    seq.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path);

    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u32(os, static_cast<uint32_t>(seq.spec.rows));
    put_u32(os, static_cast<uint32_t>(seq.spec.cols));
    put_f64(os, seq.spec.spacing);
    put_f64(os, seq.spec.particle_mass);
    put_f64(os, seq.spec.k_structural);
    put_f64(os, seq.spec.k_shear);
    put_f64(os, seq.spec.k_bend);
    put_f64(os, seq.spec.damping);
    put_u64(os, seq.scene_hash);
    put_f64(os, seq.time_step);
    put_u32(os, seq.warm_up_frames);
    put_u64(os, static_cast<uint64_t>(seq.particle_count()));
    put_u64(os, static_cast<uint64_t>(seq.frame_count()));
    put_f64(os, seq.world_scale);

    for (const auto& frame : seq.frames)
        for (const Vec3& p : frame) {
            put_f64(os, p.x());
            put_f64(os, p.y());
            put_f64(os, p.z());
        }
    if (!os) throw FormatError("write failed: " + path);
}

FrameSequence load_frames(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path);

    binio::check_magic(is, kMagic, "trajectory", path);
    const uint32_t version = get_u32(is, "version");
    if (version != kVersion)
        throw FormatError("unsupported trajectory format version " + std::to_string(version) + " in " + path);

    FrameSequence seq;
    seq.spec.rows = static_cast<int>(get_u32(is, "rows"));
    seq.spec.cols = static_cast<int>(get_u32(is, "cols"));
    seq.spec.spacing = get_f64(is, "spacing");
    seq.spec.particle_mass = get_f64(is, "particle_mass");
    seq.spec.k_structural = get_f64(is, "k_structural");
    seq.spec.k_shear = get_f64(is, "k_shear");
    seq.spec.k_bend = get_f64(is, "k_bend");
    seq.spec.damping = get_f64(is, "damping");
    seq.scene_hash = get_u64(is, "scene_hash");
    seq.time_step = get_f64(is, "time_step");
    seq.warm_up_frames = get_u32(is, "warm_up_frames");
    const uint64_t particle_count = get_u64(is, "particle_count");
    const uint64_t frame_count = get_u64(is, "frame_count");
    seq.world_scale = get_f64(is, "world_scale");

    if (particle_count != static_cast<uint64_t>(seq.spec.rows) * static_cast<uint64_t>(seq.spec.cols))
        throw FormatError("particle_count does not match grid dims in " + path);

    seq.frames.resize(frame_count);
    for (uint64_t f = 0; f < frame_count; ++f) {
        auto& frame = seq.frames[f];
        frame.resize(particle_count);
        for (uint64_t p = 0; p < particle_count; ++p) {
            double xyz[3];
            if (!is.read(reinterpret_cast<char*>(xyz), sizeof xyz))
                throw FormatError("truncated file reading frame " + std::to_string(f) + " of " + path);
            frame[p] = Vec3(xyz[0], xyz[1], xyz[2]);
        }
    }
    return seq;
}

void write_timing_csv(const std::vector<double>& frame_ms, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open for writing: " + path);
    os << "frame_index,milliseconds\n";
    for (size_t i = 0; i < frame_ms.size(); ++i) os << i << "," << frame_ms[i] << "\n";
}

} // namespace miniup
