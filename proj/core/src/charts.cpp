#include "mcl/charts.hpp"

#include "mcl/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace mcl::charts {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr int kTicks = 5;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void widen(double& lo, double& hi) {
    if (hi > lo) return;
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create directory " + dir.string());
    }
}

}  // namespace

Bounds data_bounds(const std::vector<Series>& series) {
    Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            b.x_min = std::min(b.x_min, s.x[i]);
            b.x_max = std::max(b.x_max, s.x[i]);
            b.y_min = std::min(b.y_min, s.y[i]);
            b.y_max = std::max(b.y_max, s.y[i]);
        }
    }
    if (b.x_min > b.x_max) return Bounds{};
    widen(b.x_min, b.x_max);
    widen(b.y_min, b.y_max);
    return b;
}

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           bool log_y) {
    std::vector<Series> plotted = series;
    if (log_y) {
        for (auto& s : plotted) {
            for (auto& v : s.y) v = v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
        }
    }
    const auto b = data_bounds(plotted);
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - b.x_min) / (b.x_max - b.x_min) * plot_w; };
    auto py = [&](double y) { return kTop + (b.y_max - y) / (b.y_max - b.y_min) * plot_h; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
        "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
        kWidth, kHeight);
    svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kWidth / 2, escape(title));
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        kLeft, kTop, plot_w, plot_h);

    for (int i = 0; i <= kTicks; ++i) {
        const double fx = b.x_min + (b.x_max - b.x_min) * i / kTicks;
        const double fy = b.y_min + (b.y_max - b.y_min) * i / kTicks;
        const double ylabel = log_y ? std::pow(10.0, fy) : fy;
        svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n",
                           px(fx), kTop, kTop + plot_h);
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.4g}</text>\n",
                           px(fx), kTop + plot_h + 16, fx);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n",
                           kLeft, py(fy), kLeft + plot_w);
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.4g}</text>\n",
                           kLeft - 6, py(fy) + 4, ylabel);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + plot_w / 2, kHeight - 12, escape(x_label));
    svg += fmt::format(
        "<text x=\"16\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
        kTop + plot_h / 2, escape(y_label + (log_y ? " (log10)" : "")));

    for (std::size_t s = 0; s < plotted.size(); ++s) {
        const auto& ser = plotted[s];
        const char* color = kPalette[s % std::size(kPalette)];
        std::string points;
        std::string dots;
        for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
            if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
            points += fmt::format("{:.2f},{:.2f} ", px(ser.x[i]), py(ser.y[i]));
            dots += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n",
                                px(ser.x[i]), py(ser.y[i]), color);
        }
        if (!points.empty()) points.pop_back();
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                           color, points);
        svg += dots;
        svg += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kLeft + 10,
                           kTop + 16 + 15 * static_cast<double>(s), color, escape(ser.label));
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<std::filesystem::path> emit_charts(const std::vector<EpochRecord>& records,
                                               const std::filesystem::path& dir) {
    if (records.empty()) throw InputError("no epoch records to chart");
    ensure_dir(dir);
    Series loss{"train loss", {}, {}};
    Series sched{"schedule value", {}, {}};
    Series eff{"effective hypotheses", {}, {}};
    Series ade{"validation minADE", {}, {}};
    std::string csv = epoch_csv_header() + "\n";
    for (const auto& r : records) {
        const auto e = static_cast<double>(r.epoch);
        loss.x.push_back(e);
        loss.y.push_back(r.train_loss);
        sched.x.push_back(e);
        sched.y.push_back(r.schedule_value);
        eff.x.push_back(e);
        eff.y.push_back(static_cast<double>(r.validation.effective_hypotheses));
        ade.x.push_back(e);
        ade.y.push_back(r.validation.min_ade);
        csv += epoch_csv_row(r) + "\n";
    }
    // Temperatures span many decades; top-n and depth are small integers.
    const bool log_sched = std::all_of(sched.y.begin(), sched.y.end(), [](double v) { return v > 0.0; }) &&
                           *std::max_element(sched.y.begin(), sched.y.end()) >
                               100.0 * *std::min_element(sched.y.begin(), sched.y.end());

    std::vector<std::filesystem::path> written = {
        dir / "training_loss.svg", dir / "schedule.svg", dir / "effective_hypotheses.svg",
        dir / "min_ade.svg", dir / "records.csv"};
    write_file(written[0], line_chart_svg("Training loss", "epoch", "loss", {loss}));
    write_file(written[1], line_chart_svg("Schedule", "epoch", "T / top-n / depth", {sched}, log_sched));
    write_file(written[2], line_chart_svg("Effective hypotheses", "epoch", "heads", {eff}));
    write_file(written[3], line_chart_svg("Validation minADE", "epoch", "minADE (m)", {ade}));
    write_file(written[4], csv);
    return written;
}

std::vector<std::filesystem::path> emit_sweep_charts(const std::vector<SweepRow>& rows,
                                                     const std::filesystem::path& dir) {
    if (rows.empty()) throw InputError("no sweep rows to chart");
    ensure_dir(dir);
    // rho -> T0 -> (sum ade, sum mr, count)
    struct Acc {
        double ade = 0.0;
        double mr = 0.0;
        std::size_t n = 0;
    };
    std::map<double, std::map<double, Acc>> grouped;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        auto& a = grouped[r.decay][r.initial_temperature];
        a.ade += r.report.min_ade;
        a.mr += r.report.miss_rate;
        ++a.n;
    }
    std::vector<Series> ade;
    std::vector<Series> mr;
    for (const auto& [rho, by_t0] : grouped) {
        Series sa{fmt::format("rho={}", rho), {}, {}};
        Series sm{fmt::format("rho={}", rho), {}, {}};
        for (const auto& [t0, acc] : by_t0) {
            sa.x.push_back(t0);
            sa.y.push_back(acc.ade / static_cast<double>(acc.n));
            sm.x.push_back(t0);
            sm.y.push_back(acc.mr / static_cast<double>(acc.n));
        }
        ade.push_back(std::move(sa));
        mr.push_back(std::move(sm));
    }
    std::vector<std::filesystem::path> written = {dir / "sweep_min_ade.svg",
                                                  dir / "sweep_miss_rate.svg", dir / "sweep.csv"};
    write_file(written[0], line_chart_svg("minADE vs initial temperature", "T0", "minADE (m)", ade));
    write_file(written[1], line_chart_svg("MissRate vs initial temperature", "T0", "MissRate", mr));
    write_sweep_csv(rows, written[2]);
    return written;
}

}  // namespace mcl::charts
