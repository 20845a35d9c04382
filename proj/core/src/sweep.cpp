#include "mcl/sweep.hpp"

#include "mcl/error.hpp"
#include "mcl/training.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace mcl {

namespace {

SweepRow run_cell(const ExperimentConfig& base, double t0, double rho, std::uint64_t seed) {
    SweepRow row{t0, rho, seed, false, {}, {}};
    try {
        auto config = base;
        config.scheduler.initial_temperature = t0;
        config.scheduler.decay = rho;
        config.seed = seed;
        const auto data = prepare_data(config);
        const auto result = train(config, data);
        row.report = evaluate_checkpoint(config, result.best_params, data.validation);
        row.ok = true;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& base, const SweepGrid& grid,
                            std::size_t threads) {
    if (grid.size() == 0) throw InputError("sweep grid is empty");
    struct Cell {
        double t0;
        double rho;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double t0 : grid.initial_temperatures) {
        for (double rho : grid.decays) {
            for (auto seed : grid.seeds) cells.push_back({t0, rho, seed});
        }
    }
    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            rows[i] = run_cell(base, cells[i].t0, cells[i].rho, cells[i].seed);
        }
    };
    threads = std::clamp<std::size_t>(threads, 1, cells.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    return rows;
}

std::string sweep_csv_header() {
    return "initial_temperature,decay,seed,status,min_ade,min_fde,miss_rate,brier_fde,"
           "effective_hypotheses";
}

std::string sweep_csv_row(const SweepRow& r) {
    if (!r.ok) return fmt::format("{},{},{},failed,,,,,", r.initial_temperature, r.decay, r.seed);
    const auto& m = r.report;
    return fmt::format("{},{},{},ok,{},{},{},{},{}", r.initial_temperature, r.decay, r.seed,
                       m.min_ade, m.min_fde, m.miss_rate, m.brier_fde, m.effective_hypotheses);
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << sweep_csv_header() << '\n';
    for (const auto& r : rows) out << sweep_csv_row(r) << '\n';
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != sweep_csv_header()) {
        throw ParseError(line_no, "expected header '" + sweep_csv_header() + "'");
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        cells.resize(9);
        try {
            SweepRow r;
            r.initial_temperature = std::stod(cells[0]);
            r.decay = std::stod(cells[1]);
            r.seed = std::stoull(cells[2]);
            r.ok = cells[3] == "ok";
            if (r.ok) {
                r.report.min_ade = std::stod(cells[4]);
                r.report.min_fde = std::stod(cells[5]);
                r.report.miss_rate = std::stod(cells[6]);
                r.report.brier_fde = std::stod(cells[7]);
                r.report.effective_hypotheses = std::stoull(cells[8]);
            }
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ParseError(line_no, "non-numeric cell");
        }
    }
    return rows;
}

}  // namespace mcl
