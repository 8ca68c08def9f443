#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "miniup/parallel.hpp"
#include "miniup/patches.hpp"
#include "miniup/pipeline.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, miniup::SolverOverrides& solver) {
    cmd->add_option_function<int>(
        "--max-iterations", [&solver](const int& v) { solver.max_iterations = v; },
        "cap on local-global iterations per frame");
    cmd->add_option_function<double>(
        "--tolerance", [&solver](const double& v) { solver.tolerance = v; },
        "relative convergence tolerance");
    cmd->add_flag_callback(
        "--iterative", [&solver] { solver.iterative = true; },
        "solve the linear system with conjugate gradient");
    cmd->add_flag_callback(
        "--direct", [&solver] { solver.iterative = false; },
        "solve the linear system with a prefactored Cholesky (default)");
    cmd->add_flag_callback(
        "--accept-nonconverged", [&solver] { solver.accept_nonconverged = true; },
        "keep the last iterate instead of aborting when a frame does not converge");
}

void add_frame_count_flag(CLI::App* cmd, std::optional<int>& slot) {
    cmd->add_option_function<int>(
           "--frame-count", [&slot](const int& v) { slot = v; },
           "override the scene's frame count")
        ->check(CLI::NonNegativeNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"miniup: cloth simulation with DNN-based miniature upscaling"};
    app.require_subcommand(1);

    int threads = miniup::default_thread_count();
    std::uint64_t seed = 0;
    int factor = 2;
    std::string kind_name = "pos3frames";
    app.add_option("--threads", threads, "worker threads; 1 is the bit-exact reference")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", seed, "seed for weight initialization and shuffling")
        ->capture_default_str();
    app.add_option("--f", factor, "down-sampling factor")->check(CLI::Range(2, 64))->capture_default_str();
    app.add_option("--feature-kind", kind_name, "patch input features")
        ->check(CLI::IsMember({"pos3frames", "pos", "posvel"}))
        ->capture_default_str();

    miniup::SimulateOpts sim;
    CLI::App* c_sim = app.add_subcommand("simulate", "run a full-resolution reference simulation");
    c_sim->add_option("scene", sim.scene_path, "scene file")->required()->check(CLI::ExistingFile);
    c_sim->add_option("-o,--out", sim.out_frames, "output trajectory file")->required();
    c_sim->add_option("--timing-csv", sim.timing_csv, "timing output (default <out>.timing.csv)");
    add_frame_count_flag(c_sim, sim.frame_count);
    add_solver_flags(c_sim, sim.solver);

    miniup::GendataOpts gen;
    std::string normalization = "centroid";
    CLI::App* c_gen = app.add_subcommand("gendata", "build a training dataset from target-scale runs");
    c_gen->add_option("frames", gen.frames_paths, "pre-simulated trajectory files")
        ->check(CLI::ExistingFile);
    c_gen->add_option("--scene", gen.scene_path, "simulate this scene's sweep variants instead")
        ->check(CLI::ExistingFile);
    c_gen->add_option("-o,--out", gen.out_dataset, "output dataset file")->required();
    c_gen->add_option("--normalization", normalization, "input normalization")
        ->check(CLI::IsMember({"none", "centroid"}))
        ->capture_default_str();
    add_frame_count_flag(c_gen, gen.frame_count);
    add_solver_flags(c_gen, gen.solver);

    miniup::TrainOpts train;
    train.config.batch_size = 4096;
    CLI::App* c_train = app.add_subcommand("train", "train an upscaling model on a dataset");
    c_train->add_option("dataset", train.dataset_path, "dataset file")->required()->check(CLI::ExistingFile);
    c_train->add_option("-o,--out", train.out_model, "output model file")->required();
    c_train->add_option("--preset", train.preset, "architecture preset, e.g. 4*FC-64")
        ->capture_default_str();
    c_train->add_option("--loss-csv", train.loss_csv, "loss history output (default <out>.loss.csv)");
    c_train->add_option("--lr", train.config.learning_rate, "Adam learning rate")->capture_default_str();
    c_train->add_option("--batch-size", train.config.batch_size, "mini-batch size")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_train->add_option("--epochs", train.config.max_epochs, "maximum epochs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_train->add_option("--patience", train.config.patience, "epochs without improvement before stopping")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_train->add_option("--split", train.config.split, "training fraction of the dataset")
        ->capture_default_str();
    c_train->add_option_function<double>(
        "--target-train-mse", [&train](const double& v) { train.config.target_train_mse = v; },
        "stop once the training MSE drops below this value");

    miniup::RunOpts run;
    CLI::App* c_run = app.add_subcommand("run", "simulate the miniature scene and upscale every frame");
    c_run->add_option("scene", run.scene_path, "target-scale scene file")->required()->check(CLI::ExistingFile);
    c_run->add_option("-m,--model", run.model_path, "trained model file")->required()->check(CLI::ExistingFile);
    c_run->add_option("-o,--out", run.out_frames, "output trajectory file")->required();
    c_run->add_option("--timing-csv", run.timing_csv, "timing output (default <out>.timing.csv)");
    add_frame_count_flag(c_run, run.frame_count);
    add_solver_flags(c_run, run.solver);

    miniup::EvalOpts eval;
    CLI::App* c_eval = app.add_subcommand("eval", "compare a trajectory against a reference");
    c_eval->add_option("candidate", eval.candidate_path, "candidate trajectory")->required()->check(CLI::ExistingFile);
    c_eval->add_option("reference", eval.reference_path, "reference trajectory")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--first", eval.first_frame, "first frame of the evaluated range")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    c_eval->add_option("--last", eval.last_frame, "last frame of the evaluated range (-1: end)")
        ->capture_default_str();
    c_eval->add_option("--json", eval.json_path, "also write the report as JSON");

    miniup::BenchOpts bench;
    CLI::App* c_bench = app.add_subcommand("bench", "compare per-frame timing and error across methods");
    c_bench->add_option("scene", bench.scene_path, "scene file")->required()->check(CLI::ExistingFile);
    c_bench->add_option("-m,--model", bench.model_path, "model file for the dnn method")
        ->check(CLI::ExistingFile);
    c_bench->add_option("--methods", bench.methods, "subset of: full dnn bilinear biquadratic bicubic")
        ->capture_default_str();
    c_bench->add_option("--repeats", bench.repeats, "timing repeats (median is reported)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_bench->add_option("--json", bench.json_path, "also write the table as JSON");
    add_frame_count_flag(c_bench, bench.frame_count);
    add_solver_flags(c_bench, bench.solver);

    miniup::ExportObjOpts objx;
    CLI::App* c_obj = app.add_subcommand("export-obj", "write one OBJ mesh per frame");
    c_obj->add_option("frames", objx.frames_path, "trajectory file")->required()->check(CLI::ExistingFile);
    c_obj->add_option("-o,--out-dir", objx.out_dir, "output directory")->required();
    c_obj->add_option("--prefix", objx.prefix, "file name prefix")->capture_default_str();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);

        sim.threads = gen.threads = run.threads = bench.threads = threads;
        gen.factor = factor;
        gen.kind = miniup::parse_feature_kind(kind_name);
        gen.normalization =
            normalization == "none" ? miniup::Normalization::None : miniup::Normalization::Centroid;
        train.config.seed = seed;

        if (c_sim->parsed()) miniup::cmd_simulate(sim, std::cout);
        if (c_gen->parsed()) miniup::cmd_gendata(gen, std::cout);
        if (c_train->parsed()) miniup::cmd_train(train, std::cout);
        if (c_run->parsed()) miniup::cmd_run(run, std::cout);
        if (c_eval->parsed()) miniup::cmd_eval(eval, std::cout);
        if (c_bench->parsed()) miniup::cmd_bench(bench, std::cout);
        if (c_obj->parsed()) miniup::cmd_export_obj(objx, std::cout);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
