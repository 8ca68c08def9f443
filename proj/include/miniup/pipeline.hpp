#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "miniup/eval.hpp"
#include "miniup/mlp.hpp"
#include "miniup/scene_io.hpp"
#include "miniup/solver.hpp"
#include "miniup/upscale.hpp"

namespace miniup {

/// Solver overrides shared by the commands that simulate.
struct SolverOverrides {
    std::optional<int> max_iterations;
    std::optional<double> tolerance;
    std::optional<bool> iterative;
    std::optional<bool> accept_nonconverged;

    SolverConfig apply(SolverConfig base) const;
};

struct SimulateOpts {
    std::string scene_path;
    std::string out_frames;
    std::string timing_csv;  // empty: out_frames + ".timing.csv"
    std::optional<int> frame_count;
    SolverOverrides solver;
    int threads = 1;
};

struct GendataOpts {
    std::vector<std::string> frames_paths; // pre-simulated target runs
    std::string scene_path;                // or: simulate the scene's sweep
    std::string out_dataset;
    int factor = 2;
    FeatureKind kind = FeatureKind::Pos3Frames;
    Normalization normalization = Normalization::Centroid;
    std::optional<int> frame_count;
    SolverOverrides solver;
    int threads = 1;
};

struct TrainOpts {
    std::string dataset_path;
    std::string out_model;
    std::string loss_csv;      // empty: out_model + ".loss.csv"
    std::string preset = "4*FC-64";
    TrainConfig config;        // CLI defaults to batch_size 4096
};

struct RunOpts {
    std::string scene_path;
    std::string model_path;
    std::string out_frames;
    std::string timing_csv;    // empty: out_frames + ".timing.csv"
    std::optional<int> frame_count;
    SolverOverrides solver;
    int threads = 1;
};

struct EvalOpts {
    std::string candidate_path;
    std::string reference_path;
    int first_frame = 0;
    int last_frame = -1; // -1: full range
    std::string json_path; // optional
};

struct BenchOpts {
    std::string scene_path;
    std::string model_path;                  // needed by the dnn method
    std::vector<std::string> methods{"full", "dnn", "bilinear", "biquadratic", "bicubic"};
    int repeats = 3;
    std::optional<int> frame_count;
    SolverOverrides solver;
    int threads = 1;
    std::string json_path; // optional
};

struct ExportObjOpts {
    std::string frames_path;
    std::string out_dir;
    std::string prefix = "frame";
};

/// The miniature-simulate-then-upscale playback loop with per-frame timing
/// decomposition. Frames 0 and 1 use the bootstrap window and are marked as
/// warm-up in the output metadata.
struct PlaybackResult {
    FrameSequence target; // upscaled frames, target world scale
    FrameSequence mini;   // the simulated miniature trajectory
    std::vector<double> ms_mini, ms_infer, ms_total;
};

PlaybackResult run_playback_dnn(const SceneConfig& target_scene, const MlpModel& model, int threads);
PlaybackResult run_playback_interp(const SceneConfig& target_scene, int factor, InterpMethod method,
                                   int threads);

struct BenchRow {
    std::string method;
    double median_ms_per_frame = 0.0;
    double mean_error = 0.0; // vs the full-resolution run; 0 for "full"
};

int cmd_simulate(const SimulateOpts& opts, std::ostream& log);
long cmd_gendata(const GendataOpts& opts, std::ostream& log);
void cmd_train(const TrainOpts& opts, std::ostream& log);
void cmd_run(const RunOpts& opts, std::ostream& log);
EvalReport cmd_eval(const EvalOpts& opts, std::ostream& log);
std::vector<BenchRow> cmd_bench(const BenchOpts& opts, std::ostream& log);
int cmd_export_obj(const ExportObjOpts& opts, std::ostream& log);

} // namespace miniup
