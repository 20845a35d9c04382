#pragma once

#include "mcl/config.hpp"
#include "mcl/datagen.hpp"
#include "mcl/losses.hpp"
#include "mcl/metrics.hpp"
#include "mcl/nn.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mcl {

struct EpochRecord {
    std::size_t epoch = 0;
    /// Temperature (aWTA), top-n (EWTA), depth (DAC); 0 for WTA and RWTA.
    double schedule_value = 0.0;
    double train_loss = 0.0;
    metrics::MetricsReport validation;
    double wall_seconds = 0.0; // kept out of metrics.csv so logs stay byte-stable
};

struct TrainResult {
    nn::ModelParams final_params;
    nn::ModelParams best_params; // lowest validation minFDE, earliest on ties
    std::size_t best_epoch = 0;
    std::vector<EpochRecord> records;
};

/// Training inputs in the normalized frame, one column per scene.
struct TrainingSet {
    Eigen::MatrixXd contexts;
    std::vector<Trajectory> targets;

    static TrainingSet from_scenes(std::span<const data::Scene> scenes);
    std::size_t size() const noexcept { return targets.size(); }
};

/// The loss settings in effect at `epoch`: temperature, top-n or depth
/// filled from the scheduler.
losses::LossConfig scheduled_loss(const ExperimentConfig& config, std::size_t epoch);
double schedule_value(const losses::LossConfig& loss);

/// One optimizer step on the given batch columns; returns the mean
/// per-sample objective. Throws NumericError on a non-finite loss.
double train_step(nn::ModelParams& params, nn::AdamState& state, const TrainingSet& set,
                  std::span<const std::size_t> batch, const losses::LossConfig& loss,
                  const nn::AdamConfig& optimizer);

struct TrainingData {
    std::vector<data::Scene> train;
    std::vector<data::Scene> validation;
};

/// Generates (or loads, when paths are configured) train and validation scenes.
TrainingData prepare_data(const ExperimentConfig& config);
std::vector<data::Scene> validation_scenes(const ExperimentConfig& config);

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(const ExperimentConfig& config, const TrainingData& data,
                  const EpochCallback& on_epoch = {});
TrainResult train(const ExperimentConfig& config);

/// Stable schema: epoch,schedule_value,train_loss,min_ade,min_fde,miss_rate,
/// brier_fde,effective_hypotheses
std::string epoch_csv_header();
std::string epoch_csv_row(const EpochRecord& record);
std::vector<EpochRecord> read_epoch_csv(const std::filesystem::path& path);

/// Writes config.json, metrics.csv, timing.csv, model.json and best.json
/// into config.output_dir.
void write_run(const ExperimentConfig& config, const TrainResult& result);

/// Evaluates a checkpoint on the configured validation scenes, applying NMS
/// when the model has more heads than evaluation.hypotheses.
metrics::MetricsReport evaluate_checkpoint(const ExperimentConfig& config,
                                           const nn::ModelParams& model,
                                           std::span<const data::Scene> validation);
metrics::MetricsReport evaluate_checkpoint(const ExperimentConfig& config,
                                           const std::filesystem::path& checkpoint);

}  // namespace mcl
