#include "mcl/datagen.hpp"

#include "mcl/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

namespace mcl::data {

namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

std::mt19937_64 scene_rng(std::uint64_t seed, std::size_t index) {
    const auto idx = static_cast<std::uint64_t>(index);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
    return std::mt19937_64(seq);
}

int draw_branch(const std::vector<double>& probabilities, double u) {
    double cumulative = 0.0;
    for (std::size_t m = 0; m < probabilities.size(); ++m) {
        cumulative += probabilities[m];
        if (u < cumulative) return static_cast<int>(m);
    }
    // u landed in the rounding slack above the last cumulative sum.
    for (std::size_t m = probabilities.size(); m-- > 0;) {
        if (probabilities[m] > 0.0) return static_cast<int>(m);
    }
    return 0;
}

nlohmann::json to_json(const Trajectory& t) {
    auto arr = nlohmann::json::array();
    for (const auto& p : t) arr.push_back({p.x, p.y});
    return arr;
}

Trajectory trajectory_from_json(const nlohmann::json& arr) {
    Trajectory t;
    t.reserve(arr.size());
    for (const auto& p : arr) {
        if (!p.is_array() || p.size() != 2) throw InputError("waypoint must be [x, y]");
        t.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return t;
}

}  // namespace

std::string_view to_string(SceneKind kind) {
    switch (kind) {
        case SceneKind::Intersection: return "intersection";
        case SceneKind::StaticMixture: return "static_mixture";
    }
    return "unknown";
}

SceneKind parse_scene_kind(std::string_view name) {
    if (name == "intersection") return SceneKind::Intersection;
    if (name == "static_mixture") return SceneKind::StaticMixture;
    throw ConfigError("unknown scene kind '" + std::string(name) + "'");
}

void GeneratorConfig::validate() const {
    if (branch_probabilities.empty()) throw ConfigError("generator needs at least one branch");
    if (branch_headings_deg.size() != branch_probabilities.size()) {
        throw ConfigError("branch headings and probabilities differ in length");
    }
    double total = 0.0;
    for (double p : branch_probabilities) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ConfigError("branch probabilities must be nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("branch probabilities must sum to 1");
    if (past_steps == 0 || future_steps == 0) throw ConfigError("P and L must be at least 1");
    if (!(noise_std >= 0.0)) throw ConfigError("noise std must be nonnegative");
    if (!(speed_min >= 0.0 && speed_max >= speed_min)) throw ConfigError("invalid speed range");
    if (!(accel_max >= 0.0)) throw ConfigError("accel_max must be nonnegative");
    if (!(heading_jitter_deg >= 0.0)) throw ConfigError("heading jitter must be nonnegative");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(position_range >= 0.0)) throw ConfigError("position range must be nonnegative");
}

Scene generate_scene(const GeneratorConfig& config, std::size_t index) {
    auto rng = scene_rng(config.seed, index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Scene scene;
    scene.scene_id = "scene-" + std::to_string(index);
    scene.mode_label = draw_branch(config.branch_probabilities, unit(rng));
    const Point2 origin{uniform(-config.position_range, config.position_range),
                        uniform(-config.position_range, config.position_range)};
    const auto P = config.past_steps;
    const auto L = config.future_steps;

    const double speed = uniform(config.speed_min, config.speed_max);
    scene.past.resize(P);
    for (std::size_t i = 0; i < P; ++i) {
        const double back = static_cast<double>(P - 1 - i) * speed * config.dt;
        scene.past[i] = {origin.x - back, origin.y};
    }

    if (config.kind == SceneKind::StaticMixture) {
        const double angle = radians(config.branch_headings_deg[scene.mode_label]);
        const Point2 center{origin.x + config.mixture_radius * std::cos(angle),
                            origin.y + config.mixture_radius * std::sin(angle)};
        scene.future.assign(L, center);
    } else {
        const double accel = uniform(-config.accel_max, config.accel_max);
        const double turn = radians(config.branch_headings_deg[scene.mode_label] +
                                    uniform(-config.heading_jitter_deg, config.heading_jitter_deg));
        // Constant turn rate over the horizon; midpoint heading per step.
        const double turn_rate = turn / static_cast<double>(L);
        Point2 pos = origin;
        scene.future.resize(L);
        for (std::size_t j = 0; j < L; ++j) {
            const double tau = (static_cast<double>(j) + 0.5) * config.dt;
            const double v = std::max(0.0, speed + accel * tau);
            const double heading = turn_rate * (static_cast<double>(j) + 0.5);
            pos.x += v * config.dt * std::cos(heading);
            pos.y += v * config.dt * std::sin(heading);
            scene.future[j] = pos;
        }
    }

    if (config.noise_std > 0.0) {
        // The static mixture keeps a noise-free past so its input carries no
        // information about the branch.
        std::vector<Trajectory*> noisy{&scene.future};
        if (config.kind == SceneKind::Intersection) noisy.push_back(&scene.past);
        for (auto* traj : noisy) {
            for (auto& p : *traj) {
                p.x += config.noise_std * noise(rng);
                p.y += config.noise_std * noise(rng);
            }
        }
    }
    return scene;
}

std::vector<Scene> generate(const GeneratorConfig& config, std::size_t count,
                            std::size_t first_index) {
    config.validate();
    if (count == 0) throw InputError("scene count must be at least 1");
    std::vector<Scene> scenes;
    scenes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) scenes.push_back(generate_scene(config, first_index + i));
    return scenes;
}

void save_dataset(std::span<const Scene> scenes, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset " + path.string());
    for (const auto& s : scenes) {
        nlohmann::json j;
        j["scene_id"] = s.scene_id;
        j["past"] = to_json(s.past);
        j["future"] = to_json(s.future);
        j["mode_label"] = s.mode_label;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("failed writing dataset " + path.string());
}

std::vector<Scene> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dataset " + path.string());
    std::vector<Scene> scenes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            Scene s;
            s.scene_id = j.at("scene_id").get<std::string>();
            s.past = trajectory_from_json(j.at("past"));
            s.future = trajectory_from_json(j.at("future"));
            s.mode_label = j.at("mode_label").get<int>();
            if (s.past.empty() || s.future.empty()) {
                throw InputError("past and future must be nonempty");
            }
            scenes.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        } catch (const InputError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return scenes;
}

Features featurize(const Scene& scene) {
    if (scene.past.empty()) throw InputError("scene has no past waypoints");
    Features f;
    f.origin = scene.past.back();
    f.context.reserve(2 * scene.past.size());
    for (const auto& p : scene.past) {
        f.context.push_back(p.x - f.origin.x);
        f.context.push_back(p.y - f.origin.y);
    }
    f.target.reserve(scene.future.size());
    for (const auto& p : scene.future) f.target.push_back({p.x - f.origin.x, p.y - f.origin.y});
    return f;
}

Trajectory denormalize(const Trajectory& normalized, Point2 origin) {
    Trajectory out;
    out.reserve(normalized.size());
    for (const auto& p : normalized) out.push_back({p.x + origin.x, p.y + origin.y});
    return out;
}

}  // namespace mcl::data
