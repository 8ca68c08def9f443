#include "miniup/mlp.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "binio.hpp"
#include "miniup/errors.hpp"
#include "miniup/rng.hpp"

namespace miniup {

namespace {
constexpr char kMagic[4] = {'M', 'U', 'M', 'L'};
constexpr uint32_t kVersion = 1;
} // namespace

long MlpModel::parameter_count() const {
    long n = 0;
    for (int l = 0; l < layer_count(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

void MlpModel::validate() const {
    if (layer_dims.size() < 2) throw std::invalid_argument("model needs at least 2 layer dims");
    for (int d : layer_dims)
        if (d <= 0) throw std::invalid_argument("layer dims must be positive");
    if (weights.size() + 1 != layer_dims.size() || biases.size() != weights.size())
        throw std::invalid_argument("layer count does not match layer dims");
    for (size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l])
            throw std::invalid_argument("weight shape mismatch at layer " + std::to_string(l));
        if (biases[l].size() != layer_dims[l + 1])
            throw std::invalid_argument("bias shape mismatch at layer " + std::to_string(l));
        if (!weights[l].allFinite() || !biases[l].allFinite())
            throw std::invalid_argument("non-finite parameters at layer " + std::to_string(l));
    }
}

AdamState AdamState::like(const MlpModel& model) {
    AdamState s;
    for (int l = 0; l < model.layer_count(); ++l) {
        s.m_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
        s.v_w.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
        s.m_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
        s.v_b.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
    }
    return s;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (min_rel_improvement < 0.0) throw std::invalid_argument("min_rel_improvement must be >= 0");
    if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("split must be in (0, 1)");
}

MlpModel init_model(const std::vector<int>& layer_dims, uint64_t seed) {
    if (layer_dims.size() < 2) throw std::invalid_argument("model needs at least 2 layer dims");
    for (int d : layer_dims)
        if (d <= 0) throw std::invalid_argument("layer dims must be positive");

    Rng rng(seed);
    MlpModel model;
    model.layer_dims = layer_dims;
    for (size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int fan_in = layer_dims[l];
        const int fan_out = layer_dims[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return model;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::VectorXd& input) {
    if (input.size() != model.in_dim())
        throw std::invalid_argument("input length " + std::to_string(input.size()) +
                                    " does not match model input dim " + std::to_string(model.in_dim()));
    Eigen::VectorXd a = input;
    for (int l = 0; l < model.layer_count(); ++l) {
        a = (model.weights[l] * a + model.biases[l]).eval();
        if (l + 1 < model.layer_count()) a = a.cwiseMax(0.0);
    }
    return a;
}

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::MatrixXd& inputs) {
    if (inputs.cols() != model.in_dim())
        throw std::invalid_argument("batch width " + std::to_string(inputs.cols()) +
                                    " does not match model input dim " + std::to_string(model.in_dim()));
    Eigen::MatrixXd a = inputs;
    for (int l = 0; l < model.layer_count(); ++l) {
        a = ((a * model.weights[l].transpose()).rowwise() + model.biases[l].transpose()).eval();
        if (l + 1 < model.layer_count()) a = a.cwiseMax(0.0);
    }
    return a;
}

double loss(const MlpModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
    if (inputs.rows() == 0) throw std::invalid_argument("empty batch");
    if (targets.rows() != inputs.rows() || targets.cols() != model.out_dim())
        throw std::invalid_argument("target shape does not match batch and model");
    const Eigen::MatrixXd out = forward_batch(model, inputs);
    return (out - targets).squaredNorm() / static_cast<double>(inputs.rows());
}

namespace {

// one fused pass; returns the batch loss and fills grads
double forward_backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets, Gradients& grads) {
    const int layers = model.layer_count();
    std::vector<Eigen::MatrixXd> acts(static_cast<size_t>(layers) + 1);
    std::vector<Eigen::MatrixXd> pre(static_cast<size_t>(layers));
    acts[0] = inputs;
    for (int l = 0; l < layers; ++l) {
        pre[l] = (acts[l] * model.weights[l].transpose()).rowwise() + model.biases[l].transpose();
        acts[l + 1] = l + 1 < layers ? pre[l].cwiseMax(0.0) : pre[l];
    }

    const double n = static_cast<double>(inputs.rows());
    const double batch_loss = (acts[layers] - targets).squaredNorm() / n;

    grads.weights.resize(static_cast<size_t>(layers));
    grads.biases.resize(static_cast<size_t>(layers));
    Eigen::MatrixXd delta = (2.0 / n) * (acts[layers] - targets);
    for (int l = layers - 1; l >= 0; --l) {
        grads.weights[l] = delta.transpose() * acts[l];
        grads.biases[l] = delta.colwise().sum().transpose();
        if (l > 0)
            delta = (delta * model.weights[l])
                        .cwiseProduct((pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
    return batch_loss;
}

} // namespace

Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets) {
    if (inputs.rows() == 0) throw std::invalid_argument("empty batch");
    if (targets.rows() != inputs.rows() || targets.cols() != model.out_dim())
        throw std::invalid_argument("target shape does not match batch and model");
    Gradients grads;
    forward_backward(model, inputs, targets, grads);
    return grads;
}

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state, double lr) {
    if (grads.weights.size() != model.weights.size())
        throw std::invalid_argument("gradient shape does not match model");
    state.step += 1;
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (int l = 0; l < model.layer_count(); ++l) {
        state.m_w[l] = state.beta1 * state.m_w[l] + (1.0 - state.beta1) * grads.weights[l];
        state.v_w[l] = state.beta2 * state.v_w[l] +
                       (1.0 - state.beta2) * grads.weights[l].cwiseProduct(grads.weights[l]);
        model.weights[l].array() -=
            lr * (state.m_w[l].array() / c1) / ((state.v_w[l].array() / c2).sqrt() + state.epsilon);

        state.m_b[l] = state.beta1 * state.m_b[l] + (1.0 - state.beta1) * grads.biases[l];
        state.v_b[l] = state.beta2 * state.v_b[l] +
                       (1.0 - state.beta2) * grads.biases[l].cwiseProduct(grads.biases[l]);
        model.biases[l].array() -=
            lr * (state.m_b[l].array() / c1) / ((state.v_b[l].array() / c2).sqrt() + state.epsilon);
    }
}

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& src, const std::vector<long>& idx, long begin,
                            long end) {
    Eigen::MatrixXd out(end - begin, src.cols());
    for (long i = begin; i < end; ++i) out.row(i - begin) = src.row(idx[static_cast<size_t>(i)]);
    return out;
}

double mse_over(const MlpModel& model, const Dataset& ds, const std::vector<long>& idx) {
    constexpr long kChunk = 16384;
    double sq_sum = 0.0;
    for (long begin = 0; begin < static_cast<long>(idx.size()); begin += kChunk) {
        const long end = std::min<long>(begin + kChunk, static_cast<long>(idx.size()));
        const Eigen::MatrixXd x = gather_rows(ds.inputs, idx, begin, end);
        const Eigen::MatrixXd g = gather_rows(ds.outputs, idx, begin, end);
        sq_sum += (forward_batch(model, x) - g).squaredNorm();
    }
    return sq_sum / static_cast<double>(idx.size());
}

} // namespace

TrainResult train(const Dataset& dataset, MlpModel model, const TrainConfig& config) {
    config.validate();
    model.validate();
    if (dataset.size() == 0) throw std::invalid_argument("empty dataset");
    if (dataset.in_dim() != model.in_dim() || dataset.out_dim() != model.out_dim())
        throw CompatError("dataset dims " + std::to_string(dataset.in_dim()) + "/" +
                          std::to_string(dataset.out_dim()) + " do not match model dims " +
                          std::to_string(model.in_dim()) + "/" + std::to_string(model.out_dim()));

    const long n = dataset.size();
    std::vector<long> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0L);
    Rng rng(config.seed);
    rng.shuffle(perm);

    long n_train = std::max<long>(1, static_cast<long>(config.split * static_cast<double>(n)));
    if (n_train >= n && n > 1) n_train = n - 1;
    std::vector<long> train_idx(perm.begin(), perm.begin() + n_train);
    const std::vector<long> val_idx(perm.begin() + n_train, perm.end());

    AdamState state = AdamState::like(model);
    TrainResult result;
    double best_val = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;

    for (long epoch = 1; epoch <= config.max_epochs; ++epoch) {
        rng.shuffle(train_idx);
        for (long begin = 0; begin < n_train; begin += config.batch_size) {
            const long end = std::min(begin + config.batch_size, n_train);
            const Eigen::MatrixXd x = gather_rows(dataset.inputs, train_idx, begin, end);
            const Eigen::MatrixXd g = gather_rows(dataset.outputs, train_idx, begin, end);
            Gradients grads;
            const double batch_loss = forward_backward(model, x, g, grads);
            if (!std::isfinite(batch_loss))
                throw TrainError("non-finite loss at step " + std::to_string(result.steps) +
                                     " (learning rate " + std::to_string(config.learning_rate) + ")",
                                 config.learning_rate, result.steps);
            adam_step(model, grads, state, config.learning_rate);
            ++result.steps;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_mse = mse_over(model, dataset, train_idx);
        stats.val_mse = val_idx.empty() ? stats.train_mse : mse_over(model, dataset, val_idx);
        result.history.push_back(stats);

        if (config.target_train_mse && stats.train_mse <= *config.target_train_mse) break;
        if (stats.val_mse < best_val * (1.0 - config.min_rel_improvement)) {
            best_val = stats.val_mse;
            stale_epochs = 0;
        } else if (++stale_epochs >= config.patience) {
            break;
        }
    }
    result.model = std::move(model);
    return result;
}

std::vector<int> parse_preset(const std::string& tag, int in_dim, int out_dim) {
    const size_t sep = tag.find("*FC-");
    if (sep == std::string::npos || sep == 0 || sep + 4 >= tag.size())
        throw std::invalid_argument("bad model preset '" + tag + "' (expected e.g. 4*FC-64)");
    int hidden_layers = 0, width = 0;
    try {
        size_t pos = 0;
        hidden_layers = std::stoi(tag.substr(0, sep), &pos);
        if (pos != sep) throw std::invalid_argument("");
        width = std::stoi(tag.substr(sep + 4), &pos);
        if (pos != tag.size() - sep - 4) throw std::invalid_argument("");
    } catch (...) {
        throw std::invalid_argument("bad model preset '" + tag + "' (expected e.g. 4*FC-64)");
    }
    if (hidden_layers < 1 || width < 1)
        throw std::invalid_argument("model preset '" + tag + "' needs positive layer count and width");

    std::vector<int> dims;
    dims.push_back(in_dim);
    dims.insert(dims.end(), static_cast<size_t>(hidden_layers), width);
    dims.push_back(out_dim);
    return dims;
}

void save_model(const MlpModel& model, const std::string& path) {
    model.validate();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path);

    os.write(kMagic, 4);
    binio::put_u32(os, kVersion);
    binio::put_u32(os, static_cast<uint32_t>(model.layer_count()));
    for (int d : model.layer_dims) binio::put_u32(os, static_cast<uint32_t>(d));
    binio::put_u32(os, static_cast<uint32_t>(model.normalization));
    binio::put_u32(os, static_cast<uint32_t>(model.feature_kind));
    binio::put_u32(os, model.patch_order);
    binio::put_u32(os, static_cast<uint32_t>(model.factor));

    for (int l = 0; l < model.layer_count(); ++l) {
        for (long r = 0; r < model.weights[l].rows(); ++r)
            for (long c = 0; c < model.weights[l].cols(); ++c) binio::put_f64(os, model.weights[l](r, c));
        for (long i = 0; i < model.biases[l].size(); ++i) binio::put_f64(os, model.biases[l](i));
    }
    if (!os) throw FormatError("write failed: " + path);
}

MlpModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path);

    binio::check_magic(is, kMagic, "model", path);
    const uint32_t version = binio::get_u32(is, "version");
    if (version != kVersion)
        throw FormatError("unsupported model format version " + std::to_string(version) + " in " + path);

    const uint32_t layers = binio::get_u32(is, "layer_count");
    if (layers == 0 || layers > 1024) throw FormatError("implausible layer count in " + path);

    MlpModel model;
    model.layer_dims.resize(layers + 1);
    for (uint32_t i = 0; i <= layers; ++i)
        model.layer_dims[i] = static_cast<int>(binio::get_u32(is, "layer dim"));
    const uint32_t norm = binio::get_u32(is, "normalization");
    if (norm > 1) throw FormatError("unknown normalization tag in " + path);
    model.normalization = static_cast<Normalization>(norm);
    const uint32_t kind = binio::get_u32(is, "feature_kind");
    if (kind > 2) throw FormatError("unknown feature kind tag in " + path);
    model.feature_kind = static_cast<FeatureKind>(kind);
    model.patch_order = binio::get_u32(is, "patch_order");
    model.factor = static_cast<int>(binio::get_u32(is, "factor"));

    for (uint32_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd w(model.layer_dims[l + 1], model.layer_dims[l]);
        for (long r = 0; r < w.rows(); ++r)
            for (long c = 0; c < w.cols(); ++c) w(r, c) = binio::get_f64(is, "weight");
        Eigen::VectorXd b(model.layer_dims[l + 1]);
        for (long i = 0; i < b.size(); ++i) b(i) = binio::get_f64(is, "bias");
        model.weights.push_back(std::move(w));
        model.biases.push_back(std::move(b));
    }
    model.validate();
    return model;
}

void write_loss_csv(const std::vector<EpochStats>& history, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open for writing: " + path);
    os << "epoch,train_mse,val_mse\n" << std::setprecision(17);
    for (const EpochStats& s : history) os << s.epoch << "," << s.train_mse << "," << s.val_mse << "\n";
}

} // namespace miniup
