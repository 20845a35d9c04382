#pragma once

#include "mcl/datagen.hpp"
#include "mcl/losses.hpp"
#include "mcl/metrics.hpp"
#include "mcl/nn.hpp"
#include "mcl/schedulers.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mcl {

struct DataConfig {
    data::GeneratorConfig generator;
    std::size_t train_count = 2000;
    std::size_t val_count = 500;
    /// When set, scenes are loaded from these files instead of generated.
    std::optional<std::filesystem::path> train_path;
    std::optional<std::filesystem::path> val_path;
};

struct ModelBlock {
    std::size_t heads = 6;
    std::vector<std::size_t> hidden_widths = {64, 64};
    nn::InitMode init = nn::InitMode::Glorot;
};

struct EvaluationBlock {
    std::size_t hypotheses = 0; // 0 = all heads
    double nms_radius = 2.0;
    double miss_threshold = 2.0;
    double tau = 0.01;
    double merge_radius = 0.1;
};

struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 0;
    std::size_t epochs = 60;
    std::size_t batch_size = 32;
    DataConfig data;
    ModelBlock model;
    losses::LossConfig loss;
    schedule::ScheduleState scheduler; // step and total_steps are filled per epoch
    nn::AdamConfig optimizer;
    EvaluationBlock evaluation;
    /// Empty means default_output_root() / name.
    std::filesystem::path output_dir;

    /// Every block against its own invariants; throws ConfigError.
    void validate() const;

    std::filesystem::path run_dir() const;
    nn::ModelConfig model_config() const;
    metrics::EvaluationOptions evaluation_options() const;
    /// Seeds derived from `seed` for each independent random stream.
    std::uint64_t train_data_seed() const;
    std::uint64_t val_data_seed() const;
    std::uint64_t init_seed() const;
    std::uint64_t shuffle_seed(std::size_t epoch) const;
};

/// Parses a JSON config; missing keys keep their defaults, unknown keys are
/// rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Full config including defaults.
std::string dump_config(const ExperimentConfig& config);

/// Output root used when neither the config nor the CLI names one.
std::filesystem::path default_output_root();

}  // namespace mcl
