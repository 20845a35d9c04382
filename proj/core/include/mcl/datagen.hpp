#pragma once

#include "mcl/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcl::data {

struct Scene {
    std::string scene_id;
    Trajectory past;
    Trajectory future;
    int mode_label = 0; // generator-side branch; never shown to the model

    friend bool operator==(const Scene&, const Scene&) = default;
};

enum class SceneKind {
    /// Constant-speed approach followed by a branch-dependent arc.
    Intersection,
    /// Same approach as Intersection, but every future waypoint sits on one
    /// fixed center per branch. The past carries no branch information, so
    /// this is an input-free quantization task.
    StaticMixture,
};

std::string_view to_string(SceneKind kind);
SceneKind parse_scene_kind(std::string_view name);

struct GeneratorConfig {
    SceneKind kind = SceneKind::Intersection;
    /// One entry per branch; must sum to 1.
    std::vector<double> branch_probabilities = {0.4, 0.4, 0.2};
    /// Intersection: total heading change of the branch over the horizon.
    /// StaticMixture: polar angle of the branch center.
    std::vector<double> branch_headings_deg = {90.0, 0.0, -90.0};
    double speed_min = 4.0;         // m/s
    double speed_max = 6.0;         // m/s
    double accel_max = 1.0;         // hidden longitudinal accel, uniform in [-a, a] m/s^2
    double heading_jitter_deg = 15.0; // uniform jitter on the branch heading change
    double noise_std = 0.05;        // i.i.d. waypoint noise, meters
    double dt = 0.1;                // seconds per step
    double mixture_radius = 1.5;    // StaticMixture center distance from origin
    double position_range = 50.0;   // scene origin uniform in [-range, range]^2
    std::size_t past_steps = 20;    // P
    std::size_t future_steps = 30;  // L
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t branches() const noexcept { return branch_probabilities.size(); }
};

/// Scene `index` depends only on (config, index).
Scene generate_scene(const GeneratorConfig& config, std::size_t index);
/// Scenes first_index .. first_index + count - 1.
std::vector<Scene> generate(const GeneratorConfig& config, std::size_t count,
                            std::size_t first_index = 0);

/// One JSON object per line with keys scene_id, past, future, mode_label.
void save_dataset(std::span<const Scene> scenes, const std::filesystem::path& path);
std::vector<Scene> load_dataset(const std::filesystem::path& path);

/// Model input plus the target, both expressed relative to the last past point.
struct Features {
    std::vector<double> context; // flattened past, 2P values
    Point2 origin;
    Trajectory target;
};

Features featurize(const Scene& scene);
Trajectory denormalize(const Trajectory& normalized, Point2 origin);

}  // namespace mcl::data
