#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "miniup/dsds.hpp"
#include "miniup/errors.hpp"

using namespace miniup;
using testutil::check_throws_with;

namespace {

GridClothSpec grid(int rows, int cols) {
    GridClothSpec s;
    s.rows = rows;
    s.cols = cols;
    s.spacing = 0.03;
    s.particle_mass = 0.01;
    s.k_structural = 500.0;
    s.k_shear = 250.0;
    s.k_bend = 25.0;
    s.damping = 1.2;
    return s;
}

SceneConfig scene(int rows, int cols) {
    SceneConfig sc;
    sc.cloth = grid(rows, cols);
    sc.origin = Vec3(0.5, 1.0, -0.25);
    sc.plane = Plane::XZ;
    sc.gravity = Vec3(0.0, -9.8, 0.0);
    Wind w;
    w.direction = Vec3(1, 0, 0);
    w.strength = 6.0;
    w.drag = 2.0;
    sc.wind = w;
    SphereCollider col;
    col.center = Vec3(0.4, 0.2, 0.4);
    col.radius = 0.3;
    col.friction = 0.25;
    sc.colliders.push_back(col);
    sc.time_step = 0.02;
    sc.frame_count = 10;
    return sc;
}

} // namespace

TEST_CASE("miniature particle counts at f=2 match the known table") {
    CHECK(down_sample_spec(grid(49, 73), 2).first.particle_count() == 925);
    CHECK(down_sample_spec(grid(33, 49), 2).first.particle_count() == 425);
    CHECK(down_sample_spec(grid(41, 61), 2).first.particle_count() == 651);
}

TEST_CASE("mapping dims and index correspondences") {
    auto [mini, map] = down_sample_spec(grid(9, 13), 4);
    CHECK(mini.rows == 3);
    CHECK(mini.cols == 4);
    CHECK(map.factor == 4);
    CHECK(map.target_rows == 9);
    CHECK(map.target_cols == 13);
    CHECK(map.mini_rows == 3);
    CHECK(map.mini_cols == 4);
    CHECK(map.mini_particle_count() == 12);
    CHECK(map.target_particle_count() == 117);
    CHECK(map.mini_index(1, 2) == 6);
    CHECK(map.target_index(1, 2) == 4 * 13 + 8);
    CHECK(map.target_index(2, 3) == 8 * 13 + 12); // last mini particle hits the last target one
}

TEST_CASE("down-sampling preserves spacing and material, so rest lengths too") {
    const GridClothSpec target = grid(9, 9);
    const auto [mini, map] = down_sample_spec(target, 2);
    CHECK(mini.spacing == target.spacing);
    CHECK(mini.particle_mass == target.particle_mass);
    CHECK(mini.k_structural == target.k_structural);
    CHECK(mini.k_shear == target.k_shear);
    CHECK(mini.k_bend == target.k_bend);
    CHECK(mini.damping == target.damping);

    const SpringSystem a = build_cloth(target);
    const SpringSystem b = build_cloth(mini);
    auto rests = [](const SpringSystem& s, SpringType t) {
        std::vector<double> out;
        for (const Spring& sp : s.springs)
            if (sp.type == t) out.push_back(sp.rest_length);
        return out;
    };
    for (SpringType t : {SpringType::Structural, SpringType::Shear, SpringType::Bend})
        CHECK(rests(a, t).front() == rests(b, t).front());
}

TEST_CASE("divisibility failures name the offending dimension") {
    check_throws_with<std::invalid_argument>([] { down_sample_spec(grid(10, 13), 2); }, "rows");
    check_throws_with<std::invalid_argument>([] { down_sample_spec(grid(9, 12), 2); }, "cols");
    check_throws_with<std::invalid_argument>([] { down_sample_spec(grid(9, 13), 5); }, "rows");
    CHECK_THROWS_AS(down_sample_spec(grid(9, 13), 1), std::invalid_argument);
    CHECK_THROWS_AS(down_sample_spec(grid(9, 13), 0), std::invalid_argument);
    CHECK_THROWS_AS(down_sample_spec(grid(9, 13), -2), std::invalid_argument);
}

TEST_CASE("down_scale_scene divides world lengths and external forces by f") {
    // both grid extents divisible by every tested factor
    const SceneConfig target = scene(13, 25);
    for (int f : {2, 3, 4}) {
        const SceneConfig mini = down_scale_scene(target, f);

        CHECK(mini.cloth.rows == (13 - 1) / f + 1);
        CHECK(mini.cloth.spacing == target.cloth.spacing);
        CHECK(mini.origin == Vec3(target.origin / f));
        CHECK(mini.gravity == Vec3(target.gravity / f));
        REQUIRE(mini.wind.has_value());
        CHECK(mini.wind->strength == target.wind->strength / f);
        CHECK(mini.wind->direction == target.wind->direction);
        CHECK(mini.wind->drag == target.wind->drag);
        REQUIRE(mini.colliders.size() == 1);
        CHECK(mini.colliders[0].center == Vec3(target.colliders[0].center / f));
        CHECK(mini.colliders[0].radius == target.colliders[0].radius / f);
        CHECK(mini.colliders[0].friction == target.colliders[0].friction);

        CHECK(mini.time_step == target.time_step);
        CHECK(mini.frame_count == target.frame_count);
        CHECK(mini.plane == target.plane);
        CHECK(mini.solver.max_iterations == target.solver.max_iterations);
        CHECK(mini.cloth.particle_mass == target.cloth.particle_mass);
        CHECK(mini.cloth.k_structural == target.cloth.k_structural);
    }
}

TEST_CASE("pins on the kept lattice are remapped, the rest dropped") {
    SceneConfig target = scene(9, 13);
    const GridClothSpec& g = target.cloth;
    target.pinned = {g.index(0, 0), g.index(0, 2), g.index(1, 1), g.index(2, 3), g.index(8, 12)};

    const SceneConfig mini = down_scale_scene(target, 2);
    // mini grid is 5x7; (0,0)->(0,0), (0,2)->(0,1), (2,3) dropped (col odd),
    // (1,1) dropped, (8,12)->(4,6)
    std::vector<int> want = {0, 1, 4 * 7 + 6};
    std::vector<int> got = mini.pinned;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
}

TEST_CASE("down_sample_frames keeps lattice particles scaled by 1/f") {
    const GridClothSpec target = grid(5, 7);
    const auto [mini, map] = down_sample_spec(target, 2);

    FrameSequence seq;
    seq.spec = target;
    seq.world_scale = 1.0;
    seq.scene_hash = 77;
    seq.time_step = 0.02;
    for (int t = 0; t < 3; ++t) {
        std::vector<Vec3> frame;
        for (int r = 0; r < 5; ++r)
            for (int c = 0; c < 7; ++c) frame.push_back(Vec3(r + t, c - t, r * c + 0.5 * t));
        seq.frames.push_back(frame);
    }

    const FrameSequence ds = down_sample_frames(seq, map);
    CHECK(ds.frame_count() == 3);
    CHECK(ds.spec.rows == 3);
    CHECK(ds.spec.cols == 4);
    CHECK(ds.world_scale == 0.5);
    CHECK(ds.scene_hash == 77);
    CHECK(ds.time_step == 0.02);
    for (int t = 0; t < 3; ++t)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) {
                const Vec3 got = ds.frames[t][map.mini_index(i, j)];
                const Vec3 want = seq.frames[t][map.target_index(i, j)] * 0.5;
                CHECK(testutil::bits_equal(got, want));
            }

    FrameSequence wrong = seq;
    wrong.spec.rows = 7;
    wrong.spec.cols = 5;
    CHECK_THROWS_AS(down_sample_frames(wrong, map), CompatError);
}

TEST_CASE("down-scaling commutes with translation of the origin") {
    SceneConfig a = scene(9, 13);
    SceneConfig b = a;
    b.origin += Vec3(2.0, -4.0, 6.0);
    const SceneConfig ma = down_scale_scene(a, 2);
    const SceneConfig mb = down_scale_scene(b, 2);
    CHECK(testutil::bits_equal(mb.origin - ma.origin, Vec3(1.0, -2.0, 3.0)));
}
