#include "mcl/training.hpp"

#include "mcl/error.hpp"
#include "mcl/schedulers.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace mcl {

TrainingSet TrainingSet::from_scenes(std::span<const data::Scene> scenes) {
    TrainingSet set;
    if (scenes.empty()) return set;
    const auto width = 2 * scenes.front().past.size();
    set.contexts.resize(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(scenes.size()));
    set.targets.reserve(scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        auto f = data::featurize(scenes[i]);
        if (f.context.size() != width) throw InputError("scenes differ in past length");
        for (std::size_t r = 0; r < width; ++r) {
            set.contexts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = f.context[r];
        }
        set.targets.push_back(std::move(f.target));
    }
    return set;
}

losses::LossConfig scheduled_loss(const ExperimentConfig& config, std::size_t epoch) {
    auto loss = config.loss;
    auto sched = config.scheduler;
    sched.step = epoch;
    sched.total_steps = std::max<std::size_t>(config.epochs, 1);
    switch (loss.variant) {
        case losses::Variant::AWTA: loss.temperature = schedule::temperature(sched); break;
        case losses::Variant::EWTA: loss.top_n = schedule::ewta_topn(sched, config.model.heads); break;
        case losses::Variant::DAC: loss.depth = schedule::dac_depth(sched, config.model.heads); break;
        case losses::Variant::WTA:
        case losses::Variant::RWTA: break;
    }
    return loss;
}

double schedule_value(const losses::LossConfig& loss) {
    switch (loss.variant) {
        case losses::Variant::AWTA: return loss.temperature;
        case losses::Variant::EWTA: return static_cast<double>(loss.top_n);
        case losses::Variant::DAC: return static_cast<double>(loss.depth);
        case losses::Variant::WTA:
        case losses::Variant::RWTA: break;
    }
    return 0.0;
}

double train_step(nn::ModelParams& params, nn::AdamState& state, const TrainingSet& set,
                  std::span<const std::size_t> batch, const losses::LossConfig& loss,
                  const nn::AdamConfig& optimizer) {
    if (batch.empty()) throw InputError("empty batch");
    const auto cols = static_cast<Eigen::Index>(batch.size());
    Eigen::MatrixXd inputs(set.contexts.rows(), cols);
    for (Eigen::Index i = 0; i < cols; ++i) {
        inputs.col(i) = set.contexts.col(static_cast<Eigen::Index>(batch[static_cast<std::size_t>(i)]));
    }
    nn::ForwardCache cache;
    const Eigen::MatrixXd outputs = nn::forward_batch(params, inputs, &cache);
    Eigen::MatrixXd d_outputs(outputs.rows(), cols);

    double total = 0.0;
    HypothesisGradient grad;
    const auto rows = static_cast<std::size_t>(outputs.rows());
    for (Eigen::Index i = 0; i < cols; ++i) {
        const auto hyps =
            nn::decode_output({outputs.col(i).data(), rows}, params.heads(), params.horizon());
        const auto& target = set.targets[batch[static_cast<std::size_t>(i)]];
        const auto obj = losses::sample_objective(hyps, target, loss, &grad);
        if (!std::isfinite(obj.total)) {
            throw NumericError("non-finite loss at batch position " + std::to_string(i));
        }
        nn::encode_gradient(grad, {d_outputs.col(i).data(), rows});
        total += obj.total;
    }
    d_outputs /= static_cast<double>(cols);

    auto grads = nn::GradientBuffer::zeros_like(params);
    nn::backward_batch(params, cache, d_outputs, grads);
    nn::optimizer_step(params, grads, state, optimizer);
    return total / static_cast<double>(cols);
}

std::vector<data::Scene> validation_scenes(const ExperimentConfig& config) {
    std::vector<data::Scene> scenes;
    if (config.data.val_path) {
        scenes = data::load_dataset(*config.data.val_path);
    } else {
        auto gen = config.data.generator;
        gen.seed = config.val_data_seed();
        scenes = data::generate(gen, config.data.val_count);
    }
    if (scenes.empty()) throw InputError("validation set is empty");
    return scenes;
}

TrainingData prepare_data(const ExperimentConfig& config) {
    TrainingData d;
    if (config.data.train_path) {
        d.train = data::load_dataset(*config.data.train_path);
    } else {
        auto gen = config.data.generator;
        gen.seed = config.train_data_seed();
        d.train = data::generate(gen, config.data.train_count);
    }
    if (d.train.empty()) throw InputError("training set is empty");
    d.validation = validation_scenes(config);
    return d;
}

TrainResult train(const ExperimentConfig& config, const TrainingData& data,
                  const EpochCallback& on_epoch) {
    config.validate();
    TrainResult result;
    result.final_params = nn::ModelParams(config.model_config());
    result.best_params = result.final_params;
    if (config.epochs == 0) return result;

    const auto set = TrainingSet::from_scenes(data.train);
    if (static_cast<std::size_t>(set.contexts.rows()) != result.final_params.input_width()) {
        throw ConfigError("training scenes do not match the configured past length");
    }
    const auto eval_options = config.evaluation_options();
    auto& params = result.final_params;
    auto state = nn::AdamState::for_params(params);
    double best_fde = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> order(set.size());
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto started = std::chrono::steady_clock::now();
        const auto loss = scheduled_loss(config, epoch);

        std::iota(order.begin(), order.end(), std::size_t{0});
        std::mt19937_64 rng(config.shuffle_seed(epoch));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const auto end = std::min(order.size(), start + config.batch_size);
            const std::span<const std::size_t> batch(order.data() + start, end - start);
            try {
                loss_sum += train_step(params, state, set, batch, loss, config.optimizer) *
                            static_cast<double>(batch.size());
            } catch (const NumericError& e) {
                throw NumericError(fmt::format("epoch {} batch {}: {}", epoch, batches, e.what()));
            }
            ++batches;
        }

        EpochRecord record;
        record.epoch = epoch;
        record.schedule_value = schedule_value(loss);
        record.train_loss = loss_sum / static_cast<double>(set.size());
        record.validation = metrics::evaluate(params, data.validation, eval_options);
        record.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (record.validation.min_fde < best_fde) {
            best_fde = record.validation.min_fde;
            result.best_params = params;
            result.best_epoch = epoch;
        }
        result.records.push_back(record);
        if (on_epoch) on_epoch(record);
    }
    return result;
}

TrainResult train(const ExperimentConfig& config) { return train(config, prepare_data(config)); }

std::string epoch_csv_header() {
    return "epoch,schedule_value,train_loss,min_ade,min_fde,miss_rate,brier_fde,effective_hypotheses";
}

std::string epoch_csv_row(const EpochRecord& r) {
    const auto& v = r.validation;
    return fmt::format("{},{},{},{},{},{},{},{}", r.epoch, r.schedule_value, r.train_loss,
                       v.min_ade, v.min_fde, v.miss_rate, v.brier_fde, v.effective_hypotheses);
}

std::vector<EpochRecord> read_epoch_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != epoch_csv_header()) {
        throw ParseError(line_no, "expected header '" + epoch_csv_header() + "'");
    }
    std::vector<EpochRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 8) throw ParseError(line_no, "expected 8 columns");
        try {
            EpochRecord r;
            r.epoch = std::stoull(cells[0]);
            r.schedule_value = std::stod(cells[1]);
            r.train_loss = std::stod(cells[2]);
            r.validation.min_ade = std::stod(cells[3]);
            r.validation.min_fde = std::stod(cells[4]);
            r.validation.miss_rate = std::stod(cells[5]);
            r.validation.brier_fde = std::stod(cells[6]);
            r.validation.effective_hypotheses = std::stoull(cells[7]);
            records.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError(line_no, "non-numeric cell");
        }
    }
    return records;
}

void write_run(const ExperimentConfig& config, const TrainResult& result) {
    const auto dir = config.run_dir();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    auto write = [&](const char* name, const std::string& body) {
        std::ofstream out(dir / name);
        if (!out) throw IoError("cannot write " + (dir / name).string());
        out << body;
    };
    write("config.json", dump_config(config) + "\n");

    std::string metrics = epoch_csv_header() + "\n";
    std::string timing = "epoch,wall_seconds\n";
    for (const auto& r : result.records) {
        metrics += epoch_csv_row(r) + "\n";
        timing += fmt::format("{},{:.6f}\n", r.epoch, r.wall_seconds);
    }
    write("metrics.csv", metrics);
    write("timing.csv", timing);
    nn::save_checkpoint(result.final_params, dir / "model.json");
    nn::save_checkpoint(result.best_params, dir / "best.json");
}

metrics::MetricsReport evaluate_checkpoint(const ExperimentConfig& config,
                                           const nn::ModelParams& model,
                                           std::span<const data::Scene> validation) {
    const auto expected = config.model_config();
    if (model.input_width() != expected.input_width || model.horizon() != expected.horizon) {
        throw ConfigError(fmt::format(
            "checkpoint shape (input {}, horizon {}) does not match config (input {}, horizon {})",
            model.input_width(), model.horizon(), expected.input_width, expected.horizon));
    }
    auto options = config.evaluation_options();
    if (options.top_k > model.heads()) {
        throw ConfigError("evaluation hypotheses exceed the checkpoint head count");
    }
    if (options.top_k != 0 && options.top_k < model.heads() && !options.nms) {
        options.nms = postselect::NMSConfig{options.top_k, config.evaluation.nms_radius};
    }
    return metrics::evaluate(model, validation, options);
}

metrics::MetricsReport evaluate_checkpoint(const ExperimentConfig& config,
                                           const std::filesystem::path& checkpoint) {
    const auto model = nn::load_checkpoint(checkpoint);
    return evaluate_checkpoint(config, model, validation_scenes(config));
}

}  // namespace mcl
