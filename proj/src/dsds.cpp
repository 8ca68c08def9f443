#include "miniup/dsds.hpp"

#include <stdexcept>
#include <string>

#include "miniup/errors.hpp"

namespace miniup {

std::pair<GridClothSpec, DsdsMapping> down_sample_spec(const GridClothSpec& target, int f) {
    target.validate();
    if (f < 2) throw std::invalid_argument("DSDS factor must be >= 2, got " + std::to_string(f));
    if ((target.rows - 1) % f != 0)
        throw std::invalid_argument("rows " + std::to_string(target.rows) +
                                    ": (rows - 1) is not divisible by factor " + std::to_string(f));
    if ((target.cols - 1) % f != 0)
        throw std::invalid_argument("cols " + std::to_string(target.cols) +
                                    ": (cols - 1) is not divisible by factor " + std::to_string(f));

    DsdsMapping map;
    map.factor = f;
    map.target_rows = target.rows;
    map.target_cols = target.cols;
    map.mini_rows = (target.rows - 1) / f + 1;
    map.mini_cols = (target.cols - 1) / f + 1;

    GridClothSpec mini = target;
    mini.rows = map.mini_rows;
    mini.cols = map.mini_cols;
    return {mini, map};
}

SceneConfig down_scale_scene(const SceneConfig& target_scene, int f) {
    target_scene.validate();
    auto [mini_spec, map] = down_sample_spec(target_scene.cloth, f);

    SceneConfig mini = target_scene;
    mini.cloth = mini_spec;
    mini.origin = target_scene.origin / f;
    mini.gravity = target_scene.gravity / f;
    if (mini.wind) mini.wind->strength = target_scene.wind->strength / f;
    for (SphereCollider& s : mini.colliders) {
        s.center /= f;
        s.radius /= f;
    }
    mini.pinned.clear();
    for (int p : target_scene.pinned) {
        const int r = p / target_scene.cloth.cols;
        const int c = p % target_scene.cloth.cols;
        if (r % f == 0 && c % f == 0) mini.pinned.push_back(map.mini_index(r / f, c / f));
    }
    return mini;
}

FrameSequence down_sample_frames(const FrameSequence& target_frames, const DsdsMapping& mapping) {
    if (target_frames.spec.rows != mapping.target_rows ||
        target_frames.spec.cols != mapping.target_cols)
        throw CompatError("frame grid " + std::to_string(target_frames.spec.rows) + "x" +
                          std::to_string(target_frames.spec.cols) + " does not match mapping target " +
                          std::to_string(mapping.target_rows) + "x" + std::to_string(mapping.target_cols));

    const double inv_f = 1.0 / mapping.factor;
    FrameSequence mini;
    mini.spec = target_frames.spec;
    mini.spec.rows = mapping.mini_rows;
    mini.spec.cols = mapping.mini_cols;
    mini.world_scale = target_frames.world_scale * inv_f;
    mini.scene_hash = target_frames.scene_hash;
    mini.time_step = target_frames.time_step;
    mini.warm_up_frames = target_frames.warm_up_frames;

    mini.frames.reserve(target_frames.frames.size());
    for (const auto& frame : target_frames.frames) {
        std::vector<Vec3> out;
        out.reserve(static_cast<size_t>(mapping.mini_particle_count()));
        for (int i = 0; i < mapping.mini_rows; ++i)
            for (int j = 0; j < mapping.mini_cols; ++j)
                out.push_back(frame[mapping.target_index(i, j)] * inv_f);
        mini.frames.push_back(std::move(out));
    }
    return mini;
}

} // namespace miniup
