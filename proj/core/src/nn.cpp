#include "mcl/nn.hpp"

#include "mcl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

namespace mcl::nn {

namespace {

constexpr int kCheckpointVersion = 1;
constexpr double kClusteredWeightScale = 1e-2;

std::size_t layer_size(const DenseLayer& layer) {
    return static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
}

template <typename Layers>
auto& locate(Layers& layers, std::size_t index) {
    for (auto& layer : layers) {
        const auto w = static_cast<std::size_t>(layer.weight.size());
        if (index < w) return layer.weight.data()[index];
        index -= w;
        const auto b = static_cast<std::size_t>(layer.bias.size());
        if (index < b) return layer.bias.data()[index];
        index -= b;
    }
    throw InputError("parameter index out of range");
}

bool finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

void ModelConfig::validate() const {
    if (input_width == 0) throw ConfigError("model input width must be positive");
    if (heads == 0) throw ConfigError("model must have at least one head");
    if (horizon == 0) throw ConfigError("model horizon must be positive");
    for (auto w : hidden_widths) {
        if (w == 0) throw ConfigError("hidden widths must be positive");
    }
}

ModelParams::ModelParams(const ModelConfig& config)
    : heads_(config.heads), horizon_(config.horizon) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    std::vector<std::size_t> widths;
    widths.push_back(config.input_width);
    widths.insert(widths.end(), config.hidden_widths.begin(), config.hidden_widths.end());
    widths.push_back(config.output_width());

    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const auto fan_in = widths[i];
        const auto fan_out = widths[i + 1];
        const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-a, a);
        DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
        // Column-major fill keeps the draw order tied to the flat parameter order.
        for (Eigen::Index k = 0; k < layer.weight.size(); ++k) layer.weight.data()[k] = dist(rng);
        layers_.push_back(std::move(layer));
    }

    if (config.init == InitMode::Clustered) {
        auto& out = layers_.back();
        out.weight *= kClusteredWeightScale;
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        const double shared_x = dist(rng);
        const double shared_y = dist(rng);
        const auto traj_width = 2 * horizon_;
        for (std::size_t k = 0; k < heads_; ++k) {
            for (std::size_t j = 0; j < horizon_; ++j) {
                out.bias[static_cast<Eigen::Index>(k * traj_width + 2 * j)] = shared_x;
                out.bias[static_cast<Eigen::Index>(k * traj_width + 2 * j + 1)] = shared_y;
            }
        }
    }
}

ModelParams::ModelParams(std::size_t heads, std::size_t horizon, std::vector<DenseLayer> layers)
    : heads_(heads), horizon_(horizon), layers_(std::move(layers)) {
    if (layers_.empty()) throw ConfigError("model needs at least one layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& l = layers_[i];
        if (l.bias.size() != l.weight.rows()) throw ConfigError("bias/weight row mismatch");
        if (i > 0 && l.weight.cols() != layers_[i - 1].weight.rows()) {
            throw ConfigError("layer " + std::to_string(i) + " input width mismatch");
        }
    }
    if (output_width() != heads_ * (2 * horizon_ + 1)) {
        throw ConfigError("output layer width does not match K*(2L+1)");
    }
}

std::size_t ModelParams::input_width() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t ModelParams::output_width() const {
    return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.back().weight.rows());
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += layer_size(l);
    return n;
}

double& ModelParams::parameter(std::size_t index) { return locate(layers_, index); }
double ModelParams::parameter(std::size_t index) const { return locate(layers_, index); }

bool ModelParams::all_finite() const {
    return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& l) {
        return finite(l.weight) && l.bias.allFinite();
    });
}

GradientBuffer GradientBuffer::zeros_like(const ModelParams& params) {
    GradientBuffer g;
    for (const auto& l : params.layers()) {
        g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                            Eigen::VectorXd::Zero(l.bias.size())});
    }
    return g;
}

void GradientBuffer::set_zero() {
    for (auto& l : layers) {
        l.weight.setZero();
        l.bias.setZero();
    }
}

bool GradientBuffer::all_finite() const {
    return std::all_of(layers.begin(), layers.end(), [](const DenseLayer& l) {
        return finite(l.weight) && l.bias.allFinite();
    });
}

double GradientBuffer::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        if (l.weight.size() > 0) m = std::max(m, l.weight.cwiseAbs().maxCoeff());
        if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
    }
    return m;
}

GradientBuffer& GradientBuffer::operator+=(const GradientBuffer& other) {
    if (other.layers.size() != layers.size()) throw ConfigError("gradient shape mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].weight += other.layers[i].weight;
        layers[i].bias += other.layers[i].bias;
    }
    return *this;
}

GradientBuffer& GradientBuffer::operator*=(double scale) {
    for (auto& l : layers) {
        l.weight *= scale;
        l.bias *= scale;
    }
    return *this;
}

double GradientBuffer::parameter(std::size_t index) const { return locate(layers, index); }

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    if (logits.empty()) return out;
    const double peak = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - peak);
        z += out[i];
    }
    for (auto& v : out) v /= z;
    return out;
}

HypothesisSet decode_output(std::span<const double> output, std::size_t heads,
                            std::size_t horizon) {
    const auto traj_width = 2 * horizon;
    if (output.size() != heads * (traj_width + 1)) {
        throw ConfigError("output width does not match K*(2L+1)");
    }
    HypothesisSet hyps;
    hyps.trajectories.resize(heads, Trajectory(horizon));
    for (std::size_t k = 0; k < heads; ++k) {
        for (std::size_t j = 0; j < horizon; ++j) {
            hyps.trajectories[k][j] = {output[k * traj_width + 2 * j],
                                       output[k * traj_width + 2 * j + 1]};
        }
    }
    hyps.score_logits.assign(output.begin() + static_cast<std::ptrdiff_t>(heads * traj_width),
                             output.end());
    hyps.scores = softmax(hyps.score_logits);
    return hyps;
}

void encode_gradient(const HypothesisGradient& grad, std::span<double> out) {
    const auto heads = grad.d_trajectories.size();
    const auto horizon = heads ? grad.d_trajectories.front().size() : 0;
    const auto traj_width = 2 * horizon;
    if (out.size() != heads * (traj_width + 1) || grad.d_logits.size() != heads) {
        throw ConfigError("upstream gradient shape does not match the model output");
    }
    for (std::size_t k = 0; k < heads; ++k) {
        if (grad.d_trajectories[k].size() != horizon) {
            throw ConfigError("ragged upstream trajectory gradient");
        }
        for (std::size_t j = 0; j < horizon; ++j) {
            out[k * traj_width + 2 * j] = grad.d_trajectories[k][j].x;
            out[k * traj_width + 2 * j + 1] = grad.d_trajectories[k][j].y;
        }
        out[heads * traj_width + k] = grad.d_logits[k];
    }
}

Eigen::MatrixXd forward_batch(const ModelParams& params, const Eigen::MatrixXd& inputs,
                              ForwardCache* cache) {
    if (static_cast<std::size_t>(inputs.rows()) != params.input_width()) {
        throw ConfigError("context width " + std::to_string(inputs.rows()) +
                          " does not match model input width " +
                          std::to_string(params.input_width()));
    }
    const auto& layers = params.layers();
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(inputs);
    }
    Eigen::MatrixXd x = inputs;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        Eigen::MatrixXd z = layers[i].weight * x;
        z.colwise() += layers[i].bias;
        if (i + 1 < layers.size()) z = z.cwiseMax(0.0);
        x = std::move(z);
        if (cache && i + 1 < layers.size()) cache->activations.push_back(x);
    }
    return x;
}

void backward_batch(const ModelParams& params, const ForwardCache& cache,
                    const Eigen::MatrixXd& d_outputs, GradientBuffer& grads) {
    const auto& layers = params.layers();
    if (cache.activations.size() != layers.size()) throw ConfigError("stale forward cache");
    if (static_cast<std::size_t>(d_outputs.rows()) != params.output_width() ||
        d_outputs.cols() != cache.activations.front().cols()) {
        throw ConfigError("upstream gradient shape does not match the model output");
    }
    if (grads.layers.size() != layers.size()) throw ConfigError("gradient buffer shape mismatch");

    Eigen::MatrixXd delta = d_outputs;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const auto& input = cache.activations[i];
        grads.layers[i].weight.noalias() += delta * input.transpose();
        grads.layers[i].bias += delta.rowwise().sum();
        if (i == 0) break;
        Eigen::MatrixXd upstream = layers[i].weight.transpose() * delta;
        // ReLU: the cached activation is positive exactly where the unit was active.
        delta = upstream.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
    }
}

HypothesisSet forward(const ModelParams& params, std::span<const double> context) {
    Eigen::Map<const Eigen::VectorXd> x(context.data(), static_cast<Eigen::Index>(context.size()));
    const Eigen::MatrixXd out = forward_batch(params, Eigen::MatrixXd(x));
    return decode_output({out.data(), static_cast<std::size_t>(out.size())}, params.heads(),
                         params.horizon());
}

GradientBuffer backward(const ModelParams& params, std::span<const double> context,
                        const HypothesisGradient& upstream) {
    Eigen::Map<const Eigen::VectorXd> x(context.data(), static_cast<Eigen::Index>(context.size()));
    ForwardCache cache;
    forward_batch(params, Eigen::MatrixXd(x), &cache);
    if (upstream.d_trajectories.size() != params.heads()) {
        throw ConfigError("upstream gradient has the wrong number of heads");
    }
    Eigen::MatrixXd d_out(static_cast<Eigen::Index>(params.output_width()), 1);
    encode_gradient(upstream, {d_out.data(), static_cast<std::size_t>(d_out.size())});
    auto grads = GradientBuffer::zeros_like(params);
    backward_batch(params, cache, d_out, grads);
    return grads;
}

AdamState AdamState::for_params(const ModelParams& params) {
    return {GradientBuffer::zeros_like(params), GradientBuffer::zeros_like(params), 0};
}

void optimizer_step(ModelParams& params, const GradientBuffer& grads, AdamState& state,
                    const AdamConfig& config) {
    if (!(config.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 && config.beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (grads.layers.size() != params.layers().size()) {
        throw ConfigError("gradient buffer shape mismatch");
    }
    if (!grads.all_finite()) throw NumericError("non-finite gradient; optimizer step rejected");

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    const double lr = config.learning_rate;
    const double eps = config.epsilon;

    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
        m = config.beta1 * m + (1.0 - config.beta1) * grad;
        v = config.beta2 * v + (1.0 - config.beta2) * grad.cwiseProduct(grad);
        param.array() -= lr * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + eps);
    };
    auto& layers = params.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        update(layers[i].weight, grads.layers[i].weight, state.first_moment.layers[i].weight,
               state.second_moment.layers[i].weight);
        update(layers[i].bias, grads.layers[i].bias, state.first_moment.layers[i].bias,
               state.second_moment.layers[i].bias);
    }
    if (!params.all_finite()) throw NumericError("optimizer step produced non-finite parameters");
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    nlohmann::json j;
    j["format"] = "mcl-checkpoint";
    j["version"] = kCheckpointVersion;
    j["heads"] = params.heads();
    j["horizon"] = params.horizon();
    j["layers"] = nlohmann::json::array();
    for (const auto& l : params.layers()) {
        nlohmann::json layer;
        layer["rows"] = l.weight.rows();
        layer["cols"] = l.weight.cols();
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(l.weight.size()));
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
        }
        layer["weight"] = std::move(w);
        layer["bias"] = std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size());
        j["layers"].push_back(std::move(layer));
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << j.dump() << '\n';
    if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format").get<std::string>() != "mcl-checkpoint") {
            throw ConfigError("not a checkpoint file: " + path.string());
        }
        if (j.at("version").get<int>() != kCheckpointVersion) {
            throw ConfigError("unsupported checkpoint version");
        }
        std::vector<DenseLayer> layers;
        for (const auto& layer : j.at("layers")) {
            const auto rows = layer.at("rows").get<Eigen::Index>();
            const auto cols = layer.at("cols").get<Eigen::Index>();
            const auto w = layer.at("weight").get<std::vector<double>>();
            const auto b = layer.at("bias").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(w.size()) != rows * cols ||
                static_cast<Eigen::Index>(b.size()) != rows) {
                throw ConfigError("checkpoint layer size does not match its shape");
            }
            DenseLayer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    l.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
                }
                l.bias[r] = b[static_cast<std::size_t>(r)];
            }
            layers.push_back(std::move(l));
        }
        return ModelParams(j.at("heads").get<std::size_t>(), j.at("horizon").get<std::size_t>(),
                           std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
    }
}

}  // namespace mcl::nn
