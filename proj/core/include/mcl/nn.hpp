#pragma once

#include "mcl/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mcl::nn {

enum class InitMode {
    Glorot,    ///< uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); zero biases
    Clustered, ///< Glorot trunk; all heads start at one shared output bias with
               ///< output weights shrunk, so every hypothesis begins at nearly
               ///< the same point
};

struct ModelConfig {
    std::size_t input_width = 40;
    std::vector<std::size_t> hidden_widths = {64, 64};
    std::size_t heads = 6;    // K
    std::size_t horizon = 30; // L
    InitMode init = InitMode::Glorot;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t output_width() const { return heads * (2 * horizon + 1); }
};

struct DenseLayer {
    Eigen::MatrixXd weight; // fan_out x fan_in
    Eigen::VectorXd bias;   // fan_out
};

/// Shared ReLU trunk followed by one linear output layer of width
/// K * (2L + 1). Output layout: head k, step j occupies entries
/// [k*2L + 2j, k*2L + 2j + 1]; the K score logits follow at offset K*2L.
class ModelParams {
public:
    ModelParams() = default;
    explicit ModelParams(const ModelConfig& config);
    ModelParams(std::size_t heads, std::size_t horizon, std::vector<DenseLayer> layers);

    std::size_t heads() const noexcept { return heads_; }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t input_width() const;
    std::size_t output_width() const;
    std::size_t parameter_count() const;

    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    /// Flat view over all parameters in layer order: weights (column-major)
    /// then bias, for each layer.
    double& parameter(std::size_t index);
    double parameter(std::size_t index) const;

    bool all_finite() const;

private:
    std::size_t heads_ = 0;
    std::size_t horizon_ = 0;
    std::vector<DenseLayer> layers_;
};

/// Per-parameter gradients with the exact shapes of a ModelParams.
struct GradientBuffer {
    std::vector<DenseLayer> layers;

    static GradientBuffer zeros_like(const ModelParams& params);
    void set_zero();
    bool all_finite() const;
    double max_abs() const;
    GradientBuffer& operator+=(const GradientBuffer& other);
    GradientBuffer& operator*=(double scale);
    double parameter(std::size_t index) const;
};

HypothesisSet forward(const ModelParams& params, std::span<const double> context);
GradientBuffer backward(const ModelParams& params, std::span<const double> context,
                        const HypothesisGradient& upstream);

// Batched interface used by the trainer. Columns are samples.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations; // activations[0] is the input batch
};

Eigen::MatrixXd forward_batch(const ModelParams& params, const Eigen::MatrixXd& inputs,
                              ForwardCache* cache = nullptr);
/// Accumulates into `grads` the gradient for upstream `d_outputs`
/// (output_width x batch).
void backward_batch(const ModelParams& params, const ForwardCache& cache,
                    const Eigen::MatrixXd& d_outputs, GradientBuffer& grads);

/// Decodes one output column into trajectories, logits and softmax scores.
HypothesisSet decode_output(std::span<const double> output, std::size_t heads,
                            std::size_t horizon);
/// Inverse layout of decode_output for gradients.
void encode_gradient(const HypothesisGradient& grad, std::span<double> out);

std::vector<double> softmax(std::span<const double> logits);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    GradientBuffer first_moment;
    GradientBuffer second_moment;
    std::size_t step = 0;

    static AdamState for_params(const ModelParams& params);
};

/// One Adam update. Throws NumericError (leaving params and state untouched)
/// when the gradient holds NaN/Inf, ConfigError when lr <= 0.
void optimizer_step(ModelParams& params, const GradientBuffer& grads, AdamState& state,
                    const AdamConfig& config);

// Versioned JSON checkpoint; see README for the layout.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

}  // namespace mcl::nn
