#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "miniup/dataset.hpp"

namespace miniup {

/// Fully connected network: affine + ReLU on every layer except the last,
/// which is affine only. weights[l] has shape dims[l+1] x dims[l].
/// The compatibility metadata travels with the file so a model can only be
/// applied to the configuration it was trained for.
struct MlpModel {
    std::vector<int> layer_dims;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    FeatureKind feature_kind = FeatureKind::Pos3Frames;
    Normalization normalization = Normalization::Centroid;
    uint32_t patch_order = kPatchOrderRowMajor;
    int factor = 2;

    int layer_count() const { return static_cast<int>(weights.size()); }
    int in_dim() const { return layer_dims.front(); }
    int out_dim() const { return layer_dims.back(); }
    long parameter_count() const;
    void validate() const; // shape consistency + finite parameters
};

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

struct AdamState {
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;
    long step = 0;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;

    static AdamState like(const MlpModel& model);
};

struct TrainConfig {
    double learning_rate = 1e-4;
    // paper-scale default is 50,000; the CLI uses 4,096 for desk-scale data
    long batch_size = 50000;
    long max_epochs = 100;
    int patience = 20;            // epochs without relative val improvement
    double min_rel_improvement = 1e-4;
    uint64_t seed = 0;
    double split = 0.8;           // train fraction; the rest is validation
    std::optional<double> target_train_mse; // optional additional stop

    void validate() const;
};

struct EpochStats {
    long epoch = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
};

struct TrainResult {
    MlpModel model;
    std::vector<EpochStats> history;
    long steps = 0; // Adam updates performed
};

/// Glorot-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases,
/// filled in a fixed layer/row/column order so a seed pins every parameter.
MlpModel init_model(const std::vector<int>& layer_dims, uint64_t seed);

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& input);
/// Batch rows are samples.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs);

/// Mean over the batch of the summed squared residual per sample.
double loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

/// Exact gradients of loss(); ReLU subgradient at 0 is 0.
Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets);

/// Standard bias-corrected Adam update, in place.
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state, double lr);

/// Mini-batch Adam with a seeded shuffle split and per-epoch reshuffling.
/// Stops early when validation MSE fails to improve by min_rel_improvement
/// relative for `patience` epochs, or when target_train_mse is reached.
/// Datasets smaller than one batch degrade to full-batch steps. Aborts with
/// TrainError when the loss goes non-finite.
TrainResult train(const Dataset& dataset, MlpModel model, const TrainConfig& config);

/// Model presets "U*FC-V": U hidden layers of width V plus the output layer
/// (so "3*FC-64" is three hidden layers, four weight layers in total).
std::vector<int> parse_preset(const std::string& tag, int in_dim, int out_dim);

/// Binary model file. Layout (little-endian):
///   magic "MUML", u32 version, u32 layer_count, u32 dims[layer_count + 1],
///   u32 normalization, u32 feature_kind, u32 patch_order, u32 factor,
///   then per weight layer: weights row-major f64, then the bias f64.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

/// Loss history CSV: "epoch,train_mse,val_mse".
void write_loss_csv(const std::vector<EpochStats>& history, const std::string& path);

} // namespace miniup
