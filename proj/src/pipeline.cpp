#include "miniup/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "miniup/dataset.hpp"
#include "miniup/dsds.hpp"
#include "miniup/errors.hpp"
#include "miniup/obj_export.hpp"

namespace miniup {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point tic) {
    return std::chrono::duration<double, std::milli>(Clock::now() - tic).count();
}

SceneConfig load_scene_config(const std::string& path, const std::optional<int>& frame_count,
                              const SolverOverrides& overrides) {
    SceneConfig scene = load_scene(path).scene;
    if (frame_count) scene.frame_count = *frame_count;
    scene.solver = overrides.apply(scene.solver);
    scene.validate();
    return scene;
}

double mean_of(const std::vector<double>& v, size_t begin = 0) {
    if (v.size() <= begin) return 0.0;
    return std::accumulate(v.begin() + static_cast<long>(begin), v.end(), 0.0) /
           static_cast<double>(v.size() - begin);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

void write_run_timing_csv(const PlaybackResult& result, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open for writing: " + path);
    os << "frame_index,miniature_ms,inference_ms,total_ms\n";
    for (size_t i = 0; i < result.ms_total.size(); ++i)
        os << i << "," << result.ms_mini[i] << "," << result.ms_infer[i] << "," << result.ms_total[i]
           << "\n";
}

} // namespace

SolverConfig SolverOverrides::apply(SolverConfig base) const {
    if (max_iterations) base.max_iterations = *max_iterations;
    if (tolerance) base.tolerance = *tolerance;
    if (iterative)
        base.linear_solver = *iterative ? LinearSolverKind::Iterative : LinearSolverKind::Direct;
    if (accept_nonconverged)
        base.on_nonconverged = *accept_nonconverged ? OnNonconverged::Accept : OnNonconverged::Error;
    return base;
}

int cmd_simulate(const SimulateOpts& opts, std::ostream& log) {
    const SceneConfig scene = load_scene_config(opts.scene_path, opts.frame_count, opts.solver);
    const FrameSequence seq = simulate(scene, opts.threads);
    save_frames(seq, opts.out_frames);
    const std::string timing = opts.timing_csv.empty() ? opts.out_frames + ".timing.csv" : opts.timing_csv;
    write_timing_csv(seq.frame_ms, timing);

    log << "simulated " << scene.frame_count << " frames of " << scene.cloth.rows << "x"
        << scene.cloth.cols << " cloth\n"
        << "mean ms/frame: " << std::fixed << std::setprecision(3) << mean_of(seq.frame_ms, 1)
        << "\nwrote " << opts.out_frames << " and " << timing << "\n";
    return seq.frame_count();
}

long cmd_gendata(const GendataOpts& opts, std::ostream& log) {
    if (opts.frames_paths.empty() == opts.scene_path.empty())
        throw std::invalid_argument("gendata needs either trajectory files or a scene file (not both)");

    std::vector<FrameSequence> runs;
    if (!opts.scene_path.empty()) {
        const LoadedScene loaded = load_scene(opts.scene_path);
        SceneConfig base = loaded.scene;
        if (opts.frame_count) base.frame_count = *opts.frame_count;
        base.solver = opts.solver.apply(base.solver);
        const std::vector<SceneConfig> variants = expand_sweep(base, loaded.sweep);
        log << "simulating " << variants.size() << " sweep variant(s) of " << opts.scene_path << "\n";
        for (const SceneConfig& scene : variants) runs.push_back(simulate(scene, opts.threads));
    } else {
        for (const std::string& path : opts.frames_paths) runs.push_back(load_frames(path));
    }

    Dataset dataset;
    bool first = true;
    for (const FrameSequence& run : runs) {
        Dataset part = build_dataset(run, opts.factor, opts.kind, opts.normalization);
        log << "run with " << run.frame_count() << " frames -> " << part.size() << " pairs\n";
        if (first) {
            dataset = std::move(part);
            first = false;
        } else {
            dataset.append(part);
        }
    }
    if (dataset.size() == 0)
        throw std::invalid_argument("no training pairs produced (each run needs at least 3 frames)");

    save_dataset(dataset, opts.out_dataset);
    log << "wrote " << dataset.size() << " pairs (" << feature_kind_name(opts.kind) << ", factor "
        << opts.factor << ") to " << opts.out_dataset << "\n";
    return dataset.size();
}

void cmd_train(const TrainOpts& opts, std::ostream& log) {
    const Dataset dataset = load_dataset(opts.dataset_path);
    const std::vector<int> dims =
        parse_preset(opts.preset, input_dim(dataset.kind), output_dim(dataset.factor));

    MlpModel model = init_model(dims, opts.config.seed);
    model.feature_kind = dataset.kind;
    model.normalization = dataset.normalization;
    model.patch_order = dataset.patch_order;
    model.factor = dataset.factor;

    log << "training " << opts.preset << " (";
    for (size_t i = 0; i < dims.size(); ++i) log << (i ? "-" : "") << dims[i];
    log << ", " << model.parameter_count() << " parameters) on " << dataset.size() << " pairs\n";

    const TrainResult result = train(dataset, std::move(model), opts.config);
    save_model(result.model, opts.out_model);
    const std::string loss_csv = opts.loss_csv.empty() ? opts.out_model + ".loss.csv" : opts.loss_csv;
    write_loss_csv(result.history, loss_csv);

    const EpochStats& last = result.history.back();
    log << "stopped after epoch " << last.epoch << " (" << result.steps << " steps): train mse "
        << std::scientific << std::setprecision(6) << last.train_mse << ", val mse " << last.val_mse
        << "\nwrote " << opts.out_model << " and " << loss_csv << "\n";
}

PlaybackResult run_playback_dnn(const SceneConfig& target_scene, const MlpModel& model, int threads) {
    target_scene.validate();
    const DsdsMapping mapping = down_sample_spec(target_scene.cloth, model.factor).second;
    check_model_compat(model, mapping);
    const std::vector<PatchPair> patches = enumerate_patches(mapping);
    const AssemblyPlan plan = build_assembly_plan(mapping, patches);

    const SceneConfig mini_scene = down_scale_scene(target_scene, model.factor);
    const SpringSystem system = build_cloth(mini_scene.cloth);
    SimState state = rest_state(mini_scene.cloth, mini_scene.origin, mini_scene.plane);
    const ImplicitSolver solver(system, mini_scene, mini_scene.solver);

    PlaybackResult result;
    result.mini.spec = mini_scene.cloth;
    result.mini.world_scale = 1.0 / mapping.factor;
    result.mini.scene_hash = mini_scene.hash();
    result.mini.time_step = mini_scene.time_step;
    result.target.spec = target_scene.cloth;
    result.target.world_scale = 1.0;
    result.target.scene_hash = target_scene.hash();
    result.target.time_step = target_scene.time_step;
    result.target.warm_up_frames = 2;

    for (int t = 0; t <= target_scene.frame_count; ++t) {
        const auto frame_tic = Clock::now();
        double mini_ms = 0.0;
        if (t == 0) {
            result.mini.frames.push_back(state.positions);
        } else {
            const auto tic = Clock::now();
            try {
                state = solver.step(state, threads);
            } catch (const ConvergenceError& e) {
                throw ConvergenceError(std::string(e.what()) + " at frame " + std::to_string(t),
                                       e.residual, e.iterations, t);
            }
            mini_ms = ms_since(tic);
            result.mini.frames.push_back(state.positions);
        }

        const auto tic = Clock::now();
        result.target.frames.push_back(
            upscale_dnn(model, result.mini, t, mapping, patches, plan, threads, true));
        result.ms_infer.push_back(ms_since(tic));
        result.ms_mini.push_back(mini_ms);
        result.ms_total.push_back(ms_since(frame_tic));
    }
    return result;
}

PlaybackResult run_playback_interp(const SceneConfig& target_scene, int factor, InterpMethod method,
                                   int threads) {
    target_scene.validate();
    const DsdsMapping mapping = down_sample_spec(target_scene.cloth, factor).second;
    const SceneConfig mini_scene = down_scale_scene(target_scene, factor);
    const SpringSystem system = build_cloth(mini_scene.cloth);
    SimState state = rest_state(mini_scene.cloth, mini_scene.origin, mini_scene.plane);
    const ImplicitSolver solver(system, mini_scene, mini_scene.solver);

    PlaybackResult result;
    result.mini.spec = mini_scene.cloth;
    result.mini.world_scale = 1.0 / mapping.factor;
    result.mini.scene_hash = mini_scene.hash();
    result.mini.time_step = mini_scene.time_step;
    result.target.spec = target_scene.cloth;
    result.target.world_scale = 1.0;
    result.target.scene_hash = target_scene.hash();
    result.target.time_step = target_scene.time_step;

    for (int t = 0; t <= target_scene.frame_count; ++t) {
        const auto frame_tic = Clock::now();
        double mini_ms = 0.0;
        if (t == 0) {
            result.mini.frames.push_back(state.positions);
        } else {
            const auto tic = Clock::now();
            try {
                state = solver.step(state, threads);
            } catch (const ConvergenceError& e) {
                throw ConvergenceError(std::string(e.what()) + " at frame " + std::to_string(t),
                                       e.residual, e.iterations, t);
            }
            mini_ms = ms_since(tic);
            result.mini.frames.push_back(state.positions);
        }

        const auto tic = Clock::now();
        result.target.frames.push_back(
            upscale_interp(result.mini.frames.back(), mapping, method, threads));
        result.ms_infer.push_back(ms_since(tic));
        result.ms_mini.push_back(mini_ms);
        result.ms_total.push_back(ms_since(frame_tic));
    }
    return result;
}

void cmd_run(const RunOpts& opts, std::ostream& log) {
    const SceneConfig scene = load_scene_config(opts.scene_path, opts.frame_count, opts.solver);
    const MlpModel model = load_model(opts.model_path);

    const PlaybackResult result = run_playback_dnn(scene, model, opts.threads);
    save_frames(result.target, opts.out_frames);
    const std::string timing = opts.timing_csv.empty() ? opts.out_frames + ".timing.csv" : opts.timing_csv;
    write_run_timing_csv(result, timing);

    log << "upscaled " << result.target.frame_count() << " frames (factor " << model.factor << ", "
        << result.mini.particle_count() << " -> " << result.target.particle_count() << " particles)\n"
        << std::fixed << std::setprecision(3) << "mean ms/frame: miniature "
        << mean_of(result.ms_mini, 1) << ", inference " << mean_of(result.ms_infer, 1) << ", total "
        << mean_of(result.ms_total, 1) << "\nwrote " << opts.out_frames << " and " << timing << "\n";
}

EvalReport cmd_eval(const EvalOpts& opts, std::ostream& log) {
    const FrameSequence candidate = load_frames(opts.candidate_path);
    const FrameSequence reference = load_frames(opts.reference_path);
    EvalReport report = evaluate(candidate, reference, opts.first_frame, opts.last_frame);
    report.candidate_id = opts.candidate_path;
    report.reference_id = opts.reference_path;

    log << report_text(report);
    if (!opts.json_path.empty()) {
        std::ofstream os(opts.json_path);
        if (!os) throw FormatError("cannot open for writing: " + opts.json_path);
        os << report_json(report) << "\n";
        log << "wrote " << opts.json_path << "\n";
    }
    return report;
}

std::vector<BenchRow> cmd_bench(const BenchOpts& opts, std::ostream& log) {
    if (opts.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    for (const std::string& m : opts.methods)
        if (m != "full" && m != "dnn" && m != "bilinear" && m != "biquadratic" && m != "bicubic")
            throw std::invalid_argument("unknown bench method '" + m + "'");

    const SceneConfig scene = load_scene_config(opts.scene_path, opts.frame_count, opts.solver);

    std::optional<MlpModel> model;
    const bool wants_dnn =
        std::find(opts.methods.begin(), opts.methods.end(), "dnn") != opts.methods.end();
    if (wants_dnn) {
        if (opts.model_path.empty()) throw std::invalid_argument("the dnn method needs --model");
        model = load_model(opts.model_path);
    }
    const int factor = model ? model->factor : 2;

    // reference trajectory; timings pooled over repeats, first timed frame
    // of each run dropped as warm-up
    log << "benchmarking " << scene.cloth.rows << "x" << scene.cloth.cols << " scene, "
        << scene.frame_count << " frames, factor " << factor << ", " << opts.repeats << " repeat(s)\n";
    FrameSequence reference;
    std::vector<double> full_ms;
    for (int r = 0; r < opts.repeats; ++r) {
        FrameSequence seq = simulate(scene, opts.threads);
        for (size_t i = 2; i < seq.frame_ms.size(); ++i) full_ms.push_back(seq.frame_ms[i]);
        if (r == 0) reference = std::move(seq);
    }
    const int eval_first = std::min(2, std::max(0, reference.frame_count() - 1));

    std::vector<BenchRow> rows;
    for (const std::string& method : opts.methods) {
        BenchRow row;
        row.method = method;
        if (method == "full") {
            row.median_ms_per_frame = median_of(full_ms);
            row.mean_error = 0.0;
        } else if (method == "dnn") {
            std::vector<double> ms;
            for (int r = 0; r < opts.repeats; ++r) {
                const PlaybackResult res = run_playback_dnn(scene, *model, opts.threads);
                for (size_t i = 2; i < res.ms_total.size(); ++i) ms.push_back(res.ms_total[i]);
                if (r == 0)
                    row.mean_error = evaluate(res.target, reference, eval_first).mean_error;
            }
            row.median_ms_per_frame = median_of(ms);
        } else {
            const InterpMethod im = parse_interp_method(method);
            std::vector<double> ms;
            for (int r = 0; r < opts.repeats; ++r) {
                const PlaybackResult res = run_playback_interp(scene, factor, im, opts.threads);
                for (size_t i = 2; i < res.ms_total.size(); ++i) ms.push_back(res.ms_total[i]);
                if (r == 0)
                    row.mean_error = evaluate(res.target, reference, eval_first).mean_error;
            }
            row.median_ms_per_frame = median_of(ms);
        }
        rows.push_back(row);
    }

    log << std::left << std::setw(14) << "method" << std::right << std::setw(16) << "median ms/frame"
        << std::setw(16) << "mean error" << "\n";
    for (const BenchRow& row : rows)
        log << std::left << std::setw(14) << row.method << std::right << std::fixed
            << std::setprecision(3) << std::setw(16) << row.median_ms_per_frame << std::scientific
            << std::setprecision(6) << std::setw(16) << row.mean_error << "\n";

    if (!opts.json_path.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const BenchRow& row : rows)
            j.push_back({{"method", row.method},
                         {"median_ms_per_frame", row.median_ms_per_frame},
                         {"mean_error", row.mean_error}});
        std::ofstream os(opts.json_path);
        if (!os) throw FormatError("cannot open for writing: " + opts.json_path);
        os << j.dump(2) << "\n";
        log << "wrote " << opts.json_path << "\n";
    }
    return rows;
}

int cmd_export_obj(const ExportObjOpts& opts, std::ostream& log) {
    const FrameSequence seq = load_frames(opts.frames_path);
    const int written = export_obj(seq, opts.out_dir, opts.prefix);
    log << "wrote " << written << " OBJ files to " << opts.out_dir << "\n";
    return written;
}

} // namespace miniup
