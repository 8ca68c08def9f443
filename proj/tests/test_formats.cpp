#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "miniup/dataset.hpp"
#include "miniup/errors.hpp"
#include "miniup/frames.hpp"
#include "miniup/mlp.hpp"
#include "miniup/scene_io.hpp"

using namespace miniup;
using testutil::check_throws_with;
using testutil::read_bytes;
using testutil::TempDir;

namespace {

FrameSequence sample_frames() {
    FrameSequence seq;
    seq.spec.rows = 3;
    seq.spec.cols = 4;
    seq.spec.spacing = 0.25;
    seq.spec.particle_mass = 0.015;
    seq.spec.k_structural = 321.0;
    seq.spec.k_shear = 100.5;
    seq.spec.k_bend = 7.25;
    seq.spec.damping = 1.5;
    seq.world_scale = 0.5;
    seq.scene_hash = 0xabcdef0123456789ull;
    seq.time_step = 1.0 / 60.0;
    seq.warm_up_frames = 2;
    for (int t = 0; t < 5; ++t) {
        std::vector<Vec3> frame;
        for (int p = 0; p < 12; ++p)
            frame.push_back(Vec3(t + 0.125 * p, -t * 0.5 + p, 1.0 / (1 + t + p)));
        seq.frames.push_back(frame);
    }
    return seq;
}

void corrupt_byte(const std::string& path, std::streamoff offset, char value) {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekp(offset);
    f.write(&value, 1);
}

void truncate_to(const std::string& path, size_t size) {
    const std::string bytes = read_bytes(path);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os.write(bytes.data(), static_cast<std::streamsize>(std::min(size, bytes.size())));
}

const char* kSceneText = R"(# comment
[cloth]
rows = 5
cols = 7
spacing = 0.1
particle_mass = 0.02
k_structural = 400
k_shear = 200   # inline comment
k_bend = 40
damping = 0.8

[scene]
origin = 1 2 3
plane = yz
gravity = 0 -9.8 0
time_step = 0.02
frame_count = 12
pinned_rows = 0
pinned_indices = 9

[wind]
direction = 0 0 2
strength = 5
drag = 1.5

[collider]
center = 0.5 0 0.5
radius = 0.2
friction = 0.4

[collider]
center = -1 0 0
radius = 0.5
friction = 0

[solver]
max_iterations = 30
tolerance = 1e-5
linear_solver = iterative
on_nonconverged = accept

[sweep]
mass = 0.01 0.02
stiffness_scale = 1 0.5 2
time_step = 0.02
)";

} // namespace

TEST_CASE("trajectory files round-trip every field") {
    TempDir dir;
    const FrameSequence seq = sample_frames();
    const std::string path = dir.file("a.frames");
    save_frames(seq, path);

    const FrameSequence back = load_frames(path);
    CHECK(back.spec.rows == seq.spec.rows);
    CHECK(back.spec.cols == seq.spec.cols);
    CHECK(back.spec.spacing == seq.spec.spacing);
    CHECK(back.spec.particle_mass == seq.spec.particle_mass);
    CHECK(back.spec.k_structural == seq.spec.k_structural);
    CHECK(back.spec.k_shear == seq.spec.k_shear);
    CHECK(back.spec.k_bend == seq.spec.k_bend);
    CHECK(back.spec.damping == seq.spec.damping);
    CHECK(back.world_scale == seq.world_scale);
    CHECK(back.scene_hash == seq.scene_hash);
    CHECK(back.time_step == seq.time_step);
    CHECK(back.warm_up_frames == seq.warm_up_frames);
    CHECK(testutil::bits_equal(back.frames, seq.frames));

    // and a second save is byte-identical
    const std::string path2 = dir.file("b.frames");
    save_frames(back, path2);
    CHECK(read_bytes(path) == read_bytes(path2));
}

TEST_CASE("trajectory loader rejects corruption") {
    TempDir dir;
    const std::string path = dir.file("a.frames");
    save_frames(sample_frames(), path);

    SUBCASE("bad magic") {
        corrupt_byte(path, 0, 'X');
        check_throws_with<FormatError>([&] { load_frames(path); }, "magic");
    }
    SUBCASE("bad version") {
        corrupt_byte(path, 4, 9);
        check_throws_with<FormatError>([&] { load_frames(path); }, "version");
    }
    SUBCASE("truncated header") {
        truncate_to(path, 20);
        CHECK_THROWS_AS(load_frames(path), FormatError);
    }
    SUBCASE("truncated payload") {
        truncate_to(path, read_bytes(path).size() - 8);
        check_throws_with<FormatError>([&] { load_frames(path); }, "truncated");
    }
    SUBCASE("missing file") {
        check_throws_with<FormatError>([&] { load_frames(dir.file("nope.frames")); }, "cannot open");
    }
}

TEST_CASE("dataset files round-trip data and metadata") {
    TempDir dir;
    Dataset ds;
    ds.kind = FeatureKind::PosVel;
    ds.factor = 3;
    ds.normalization = Normalization::None;
    ds.inputs = Eigen::MatrixXd::Random(17, input_dim(ds.kind));
    ds.outputs = Eigen::MatrixXd::Random(17, output_dim(ds.factor));

    const std::string path = dir.file("d.ds");
    save_dataset(ds, path);
    const Dataset back = load_dataset(path);
    CHECK(back.kind == ds.kind);
    CHECK(back.factor == ds.factor);
    CHECK(back.normalization == ds.normalization);
    CHECK(back.patch_order == kPatchOrderRowMajor);
    CHECK(back.inputs == ds.inputs);
    CHECK(back.outputs == ds.outputs);

    SUBCASE("bad magic") {
        corrupt_byte(path, 1, 'x');
        check_throws_with<FormatError>([&] { load_dataset(path); }, "magic");
    }
    SUBCASE("bad feature kind tag") {
        corrupt_byte(path, 8, 7);
        check_throws_with<FormatError>([&] { load_dataset(path); }, "feature kind");
    }
    SUBCASE("truncated records") {
        truncate_to(path, read_bytes(path).size() - 1);
        CHECK_THROWS_AS(load_dataset(path), FormatError);
    }
}

TEST_CASE("dataset append rejects mismatched metadata") {
    Dataset a;
    a.kind = FeatureKind::Pos;
    a.factor = 2;
    a.inputs = Eigen::MatrixXd::Random(3, input_dim(a.kind));
    a.outputs = Eigen::MatrixXd::Random(3, output_dim(a.factor));

    Dataset b = a;
    b.kind = FeatureKind::PosVel;
    b.inputs = Eigen::MatrixXd::Random(2, input_dim(b.kind));
    check_throws_with<CompatError>([&] { a.append(b); }, "feature kind");

    Dataset c = a;
    c.factor = 4;
    c.outputs = Eigen::MatrixXd::Random(3, output_dim(c.factor));
    check_throws_with<CompatError>([&] { a.append(c); }, "factor");

    Dataset d = a;
    const long n = a.size();
    a.append(d);
    CHECK(a.size() == 2 * n);
    CHECK(a.inputs.bottomRows(n) == d.inputs);
    CHECK(a.outputs.bottomRows(n) == d.outputs);
}

TEST_CASE("model files round-trip and reject corruption") {
    TempDir dir;
    MlpModel model = init_model({36, 16, 27}, 42);
    model.feature_kind = FeatureKind::Pos3Frames;
    model.normalization = Normalization::Centroid;
    model.factor = 2;

    const std::string path = dir.file("m.model");
    save_model(model, path);
    const MlpModel back = load_model(path);
    CHECK(back.layer_dims == model.layer_dims);
    CHECK(back.feature_kind == model.feature_kind);
    CHECK(back.normalization == model.normalization);
    CHECK(back.patch_order == model.patch_order);
    CHECK(back.factor == model.factor);
    for (int l = 0; l < model.layer_count(); ++l) {
        CHECK(back.weights[l] == model.weights[l]);
        CHECK(back.biases[l] == model.biases[l]);
    }

    const std::string path2 = dir.file("m2.model");
    save_model(back, path2);
    CHECK(read_bytes(path) == read_bytes(path2));

    SUBCASE("bad magic") {
        corrupt_byte(path, 0, 'Z');
        check_throws_with<FormatError>([&] { load_model(path); }, "magic");
    }
    SUBCASE("truncated") {
        truncate_to(path, read_bytes(path).size() - 4);
        CHECK_THROWS_AS(load_model(path), FormatError);
    }
}

TEST_CASE("timing and loss CSVs have the documented layout") {
    TempDir dir;
    const std::string tpath = dir.file("t.csv");
    write_timing_csv({0.0, 1.5, 2.25}, tpath);
    std::ifstream ts(tpath);
    std::string line;
    std::getline(ts, line);
    CHECK(line == "frame_index,milliseconds");
    std::getline(ts, line);
    CHECK(line.substr(0, 2) == "0,");
    std::getline(ts, line);
    CHECK(line.substr(0, 2) == "1,");

    const std::string lpath = dir.file("l.csv");
    write_loss_csv({{1, 0.5, 0.25}, {2, 0.125, 0.0625}}, lpath);
    std::ifstream ls(lpath);
    std::getline(ls, line);
    CHECK(line == "epoch,train_mse,val_mse");
    std::getline(ls, line);
    CHECK(line == "1,0.5,0.25");
}

TEST_CASE("scene parser reads every section") {
    const LoadedScene loaded = parse_scene(kSceneText, "mem");
    const SceneConfig& sc = loaded.scene;

    CHECK(sc.cloth.rows == 5);
    CHECK(sc.cloth.cols == 7);
    CHECK(sc.cloth.spacing == 0.1);
    CHECK(sc.cloth.particle_mass == 0.02);
    CHECK(sc.cloth.k_structural == 400.0);
    CHECK(sc.cloth.k_shear == 200.0);
    CHECK(sc.cloth.k_bend == 40.0);
    CHECK(sc.cloth.damping == 0.8);

    CHECK(testutil::bits_equal(sc.origin, Vec3(1, 2, 3)));
    CHECK(sc.plane == Plane::YZ);
    CHECK(testutil::bits_equal(sc.gravity, Vec3(0, -9.8, 0)));
    CHECK(sc.time_step == 0.02);
    CHECK(sc.frame_count == 12);
    // pinned_rows = 0 expands to the 7 first-row particles; index 9 is extra
    CHECK(sc.pinned.size() == 8);
    CHECK(std::find(sc.pinned.begin(), sc.pinned.end(), 9) != sc.pinned.end());
    for (int c = 0; c < 7; ++c)
        CHECK(std::find(sc.pinned.begin(), sc.pinned.end(), c) != sc.pinned.end());

    REQUIRE(sc.wind.has_value());
    CHECK(sc.wind->direction.isApprox(Vec3(0, 0, 1)));
    CHECK(sc.wind->strength == 5.0);
    CHECK(sc.wind->drag == 1.5);

    REQUIRE(sc.colliders.size() == 2);
    CHECK(testutil::bits_equal(sc.colliders[0].center, Vec3(0.5, 0, 0.5)));
    CHECK(sc.colliders[0].radius == 0.2);
    CHECK(sc.colliders[0].friction == 0.4);
    CHECK(sc.colliders[1].radius == 0.5);

    CHECK(sc.solver.max_iterations == 30);
    CHECK(sc.solver.tolerance == 1e-5);
    CHECK(sc.solver.linear_solver == LinearSolverKind::Iterative);
    CHECK(sc.solver.on_nonconverged == OnNonconverged::Accept);

    CHECK(loaded.sweep.masses == std::vector<double>{0.01, 0.02});
    CHECK(loaded.sweep.stiffness_scales == std::vector<double>{1.0, 0.5, 2.0});
    CHECK(loaded.sweep.time_steps == std::vector<double>{0.02});
}

TEST_CASE("scene parser reports file and line on errors") {
    check_throws_with<ConfigError>([] { parse_scene("[cloth]\nrows = x\n", "s"); }, "s:2");
    check_throws_with<ConfigError>([] { parse_scene("[cloth]\nrows = x\n", "s"); }, "bad integer");
    check_throws_with<ConfigError>([] { parse_scene("rows = 3\n", "s"); }, "outside any section");
    check_throws_with<ConfigError>([] { parse_scene("[nope]\n", "s"); }, "unknown section");
    check_throws_with<ConfigError>([] { parse_scene("[cloth]\nbogus = 3\n", "s"); }, "unknown cloth key");
    check_throws_with<ConfigError>([] { parse_scene("[scene]\norigin = 1 2\n", "s"); }, "expected 3 numbers");
    check_throws_with<ConfigError>([] { parse_scene("", "s"); }, "missing [cloth]");
    check_throws_with<ConfigError>(
        [] { parse_scene("[cloth]\nrows=3\ncols=3\nspacing=1\nparticle_mass=-1\nk_structural=1\n", "s"); },
        "mass");
    check_throws_with<ConfigError>(
        [] {
            parse_scene("[cloth]\nrows=3\ncols=3\nspacing=1\nparticle_mass=1\nk_structural=1\n"
                        "[scene]\npinned_rows = 5\n",
                        "s");
        },
        "pinned row 5 out of range");
    check_throws_with<ConfigError>([] { load_scene("/definitely/not/here.scene"); }, "cannot open");
}

TEST_CASE("sweep expansion is a cartesian product, mass outermost") {
    LoadedScene loaded = parse_scene(kSceneText, "mem");
    const std::vector<SceneConfig> variants = expand_sweep(loaded.scene, loaded.sweep);
    REQUIRE(variants.size() == 6); // 2 masses x 3 stiffness scales x 1 time step

    CHECK(variants[0].cloth.particle_mass == 0.01);
    CHECK(variants[0].cloth.k_structural == 400.0);
    CHECK(variants[1].cloth.k_structural == 200.0); // scale 0.5
    CHECK(variants[2].cloth.k_structural == 800.0); // scale 2
    CHECK(variants[2].cloth.k_shear == 400.0);
    CHECK(variants[2].cloth.k_bend == 80.0);
    CHECK(variants[3].cloth.particle_mass == 0.02);
    for (const SceneConfig& v : variants) CHECK(v.time_step == 0.02);

    // empty sweep: just the base scene
    const std::vector<SceneConfig> base_only = expand_sweep(loaded.scene, SceneSweep{});
    REQUIRE(base_only.size() == 1);
    CHECK(base_only[0].cloth.particle_mass == loaded.scene.cloth.particle_mass);
}

TEST_CASE("scene hash tracks physical fields") {
    LoadedScene loaded = parse_scene(kSceneText, "mem");
    const uint64_t h = loaded.scene.hash();
    CHECK(h == loaded.scene.hash());

    SceneConfig changed = loaded.scene;
    changed.gravity.y() = -1.0;
    CHECK(changed.hash() != h);

    changed = loaded.scene;
    changed.cloth.k_structural += 1.0;
    CHECK(changed.hash() != h);
}
