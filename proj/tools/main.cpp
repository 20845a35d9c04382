// awta-lab: command line front end for the annealed winner-takes-all lab.

#include "mcl/charts.hpp"
#include "mcl/config.hpp"
#include "mcl/datagen.hpp"
#include "mcl/error.hpp"
#include "mcl/sweep.hpp"
#include "mcl/training.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-c,--config", c.config_path, "JSON experiment config (defaults when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-s,--seed", c.seed, "Override the config seed");
    cmd->add_option("-o,--out", c.out, "Output directory (default: $MCL_OUTPUT_ROOT/<name>)");
}

mcl::ExperimentConfig resolve(const Common& c) {
    auto config = c.config_path.empty() ? mcl::ExperimentConfig{} : mcl::load_config(c.config_path);
    if (c.seed) config.seed = *c.seed;
    if (!c.out.empty()) config.output_dir = c.out;
    config.validate();
    return config;
}

void print_error(const std::string& kind, const std::string& message) {
    nlohmann::json line{{"error", kind}, {"message", message}};
    std::cerr << line.dump() << '\n';
}

int cmd_generate(const Common& c) {
    auto config = resolve(c);
    const auto data = mcl::prepare_data(config);
    const auto dir = config.run_dir();
    fs::create_directories(dir);
    mcl::data::save_dataset(data.train, dir / "train.jsonl");
    mcl::data::save_dataset(data.validation, dir / "val.jsonl");
    fmt::print("{}\n{}\n", (dir / "train.jsonl").string(), (dir / "val.jsonl").string());
    return 0;
}

int cmd_train(const Common& c, bool with_charts) {
    auto config = resolve(c);
    const auto data = mcl::prepare_data(config);
    fmt::print("{}\n", mcl::epoch_csv_header());
    const auto result = mcl::train(config, data, [](const mcl::EpochRecord& r) {
        fmt::print("{}\n", mcl::epoch_csv_row(r));
        std::fflush(stdout);
    });
    mcl::write_run(config, result);
    if (with_charts && !result.records.empty()) {
        mcl::charts::emit_charts(result.records, config.run_dir() / "charts");
    }
    std::cerr << "run written to " << config.run_dir().string() << " (best epoch "
              << result.best_epoch << ")\n";
    return 0;
}

int cmd_eval(const Common& c, const std::string& checkpoint) {
    auto config = resolve(c);
    const auto report = mcl::evaluate_checkpoint(config, checkpoint);
    const auto text = mcl::metrics::csv_header() + "\n" + mcl::metrics::csv_row(report) + "\n";
    fmt::print("{}", text);
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        std::ofstream out(fs::path(c.out) / "eval.csv");
        if (!out) throw mcl::IoError("cannot write " + (fs::path(c.out) / "eval.csv").string());
        out << text;
    }
    return 0;
}

int cmd_sweep(const Common& c, const mcl::SweepGrid& grid_in, std::size_t threads) {
    auto config = resolve(c);
    auto grid = grid_in;
    if (grid.initial_temperatures.empty()) grid.initial_temperatures = {config.scheduler.initial_temperature};
    if (grid.decays.empty()) grid.decays = {config.scheduler.decay};
    if (grid.seeds.empty()) grid.seeds = {config.seed};
    const auto rows = mcl::sweep(config, grid, threads);
    const auto dir = config.run_dir();
    mcl::charts::emit_sweep_charts(rows, dir);
    fmt::print("{}\n", mcl::sweep_csv_header());
    std::size_t failed = 0;
    for (const auto& r : rows) {
        fmt::print("{}\n", mcl::sweep_csv_row(r));
        if (!r.ok) {
            ++failed;
            std::cerr << fmt::format("cell T0={} rho={} seed={} failed: {}\n", r.initial_temperature,
                                     r.decay, r.seed, r.error);
        }
    }
    return failed == rows.size() ? 1 : 0;
}

int cmd_charts(const std::string& metrics_path, const std::string& sweep_path, const std::string& out) {
    if (metrics_path.empty() == sweep_path.empty()) {
        throw mcl::InputError("give exactly one of --metrics or --sweep");
    }
    const fs::path dir = out.empty() ? mcl::default_output_root() / "charts" : fs::path(out);
    const auto written = metrics_path.empty()
                             ? mcl::charts::emit_sweep_charts(mcl::read_sweep_csv(sweep_path), dir)
                             : mcl::charts::emit_charts(mcl::read_epoch_csv(metrics_path), dir);
    for (const auto& p : written) fmt::print("{}\n", p.string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Annealed winner-takes-all multiple choice learning lab"};
    app.require_subcommand(1);

    Common gen_opts;
    auto* gen = app.add_subcommand("generate", "Write train.jsonl and val.jsonl");
    add_common(gen, gen_opts);

    Common train_opts;
    bool with_charts = false;
    auto* tr = app.add_subcommand("train", "Train one model and write the run directory");
    add_common(tr, train_opts);
    tr->add_flag("--charts", with_charts, "Also write SVG charts under <run>/charts");

    Common eval_opts;
    std::string checkpoint;
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on the validation scenes");
    add_common(ev, eval_opts);
    ev->add_option("-m,--checkpoint", checkpoint, "Checkpoint JSON")->required();

    Common sweep_opts;
    mcl::SweepGrid grid;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    auto* sw = app.add_subcommand("sweep", "Grid over initial temperature, decay and seed");
    add_common(sw, sweep_opts);
    sw->add_option("--t0", grid.initial_temperatures, "Initial temperatures")->delimiter(',');
    sw->add_option("--decay", grid.decays, "Decay factors rho")->delimiter(',');
    sw->add_option("--seeds", grid.seeds, "Seeds")->delimiter(',');
    sw->add_option("-j,--threads", threads, "Concurrent cells")->check(CLI::PositiveNumber);

    std::string metrics_path;
    std::string sweep_path;
    std::string charts_out;
    auto* ch = app.add_subcommand("charts", "Render charts from a metrics.csv or sweep.csv");
    ch->add_option("--metrics", metrics_path, "Per-epoch metrics.csv")->check(CLI::ExistingFile);
    ch->add_option("--sweep", sweep_path, "sweep.csv")->check(CLI::ExistingFile);
    ch->add_option("-o,--out", charts_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*gen) return cmd_generate(gen_opts);
        if (*tr) return cmd_train(train_opts, with_charts);
        if (*ev) return cmd_eval(eval_opts, checkpoint);
        if (*sw) return cmd_sweep(sweep_opts, grid, threads);
        if (*ch) return cmd_charts(metrics_path, sweep_path, charts_out);
    } catch (const mcl::Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const fs::filesystem_error& e) {
        print_error("io", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
