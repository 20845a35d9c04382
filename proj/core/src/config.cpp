#include "mcl/config.hpp"

#include "mcl/error.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace mcl {

namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Reads known keys from one JSON object and rejects the rest.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
    }
    ~Block() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.contains(key)) throw ConfigError("unknown key '" + path_ + "." + key + "'");
        }
    }
    Block(const Block&) = delete;
    Block& operator=(const Block&) = delete;

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError("bad value for '" + path_ + "." + key + "': " + e.what());
        }
    }
    void read_path(const char* key, std::optional<std::filesystem::path>& out) {
        std::string value;
        read(key, value);
        if (j_.contains(key)) out = value;
    }
    Block child(const char* key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Block(j_.contains(key) ? j_.at(key) : empty, path_ + "." + key);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

void ExperimentConfig::validate() const {
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    data.generator.validate();
    if (!data.train_path && data.train_count == 0) throw ConfigError("train_count must be >= 1");
    if (!data.val_path && data.val_count == 0) throw ConfigError("val_count must be >= 1");
    model_config().validate();
    loss.validate(model.heads);
    auto sched = scheduler;
    sched.total_steps = std::max<std::size_t>(epochs, 1);
    if (loss.variant == losses::Variant::AWTA) {
        if (sched.kind == schedule::Kind::EwtaTopN || sched.kind == schedule::Kind::DacDepth) {
            throw ConfigError("aWTA needs an exponential, linear or constant scheduler");
        }
        sched.validate();
    }
    if (!(optimizer.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0 && optimizer.beta2 >= 0.0 &&
          optimizer.beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(optimizer.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
    if (evaluation.hypotheses > model.heads) {
        throw ConfigError("evaluation hypotheses exceed the model head count");
    }
    if (!(evaluation.nms_radius >= 0.0)) throw ConfigError("NMS radius must be nonnegative");
    if (!(evaluation.merge_radius >= 0.0)) throw ConfigError("merge radius must be nonnegative");
    if (!(evaluation.tau >= 0.0 && evaluation.tau <= 1.0)) throw ConfigError("tau must lie in [0,1]");
}

nn::ModelConfig ExperimentConfig::model_config() const {
    nn::ModelConfig m;
    m.input_width = 2 * data.generator.past_steps;
    m.hidden_widths = model.hidden_widths;
    m.heads = model.heads;
    m.horizon = data.generator.future_steps;
    m.init = model.init;
    m.seed = init_seed();
    return m;
}

metrics::EvaluationOptions ExperimentConfig::evaluation_options() const {
    metrics::EvaluationOptions o;
    o.top_k = evaluation.hypotheses;
    if (evaluation.hypotheses != 0 && evaluation.hypotheses < model.heads) {
        o.nms = postselect::NMSConfig{evaluation.hypotheses, evaluation.nms_radius};
    }
    o.miss_threshold = evaluation.miss_threshold;
    o.tau = evaluation.tau;
    o.merge_radius = evaluation.merge_radius;
    return o;
}

std::uint64_t ExperimentConfig::train_data_seed() const { return mix(seed, 1); }
std::uint64_t ExperimentConfig::val_data_seed() const { return mix(seed, 2); }
std::uint64_t ExperimentConfig::init_seed() const { return mix(seed, 3); }
std::uint64_t ExperimentConfig::shuffle_seed(std::size_t epoch) const {
    return mix(mix(seed, 4), epoch);
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    {
        Block top(root, "config");
        top.read("name", c.name);
        top.read("seed", c.seed);
        top.read("epochs", c.epochs);
        top.read("batch_size", c.batch_size);
        std::string out = c.output_dir.string();
        top.read("output_dir", out);
        c.output_dir = out;

        {
            auto d = top.child("data");
            d.read("train_count", c.data.train_count);
            d.read("val_count", c.data.val_count);
            d.read_path("train_path", c.data.train_path);
            d.read_path("val_path", c.data.val_path);
            auto g = d.child("generator");
            auto& gen = c.data.generator;
            std::string kind(data::to_string(gen.kind));
            g.read("kind", kind);
            gen.kind = data::parse_scene_kind(kind);
            g.read("branch_probabilities", gen.branch_probabilities);
            g.read("branch_headings_deg", gen.branch_headings_deg);
            g.read("speed_min", gen.speed_min);
            g.read("speed_max", gen.speed_max);
            g.read("accel_max", gen.accel_max);
            g.read("heading_jitter_deg", gen.heading_jitter_deg);
            g.read("noise_std", gen.noise_std);
            g.read("dt", gen.dt);
            g.read("mixture_radius", gen.mixture_radius);
            g.read("position_range", gen.position_range);
            g.read("past_steps", gen.past_steps);
            g.read("future_steps", gen.future_steps);
        }
        {
            auto m = top.child("model");
            m.read("heads", c.model.heads);
            m.read("hidden_widths", c.model.hidden_widths);
            std::string init = c.model.init == nn::InitMode::Glorot ? "glorot" : "clustered";
            m.read("init", init);
            if (init == "glorot") {
                c.model.init = nn::InitMode::Glorot;
            } else if (init == "clustered") {
                c.model.init = nn::InitMode::Clustered;
            } else {
                throw ConfigError("unknown init mode '" + init + "'");
            }
        }
        {
            auto l = top.child("loss");
            std::string variant(losses::to_string(c.loss.variant));
            l.read("variant", variant);
            c.loss.variant = losses::parse_variant(variant);
            l.read("epsilon", c.loss.epsilon);
            l.read("score_coefficient", c.loss.score_coefficient);
        }
        {
            auto s = top.child("scheduler");
            std::string kind(schedule::to_string(c.scheduler.kind));
            s.read("kind", kind);
            c.scheduler.kind = schedule::parse_kind(kind);
            s.read("initial_temperature", c.scheduler.initial_temperature);
            s.read("decay", c.scheduler.decay);
            s.read("floor_temperature", c.scheduler.floor_temperature);
            s.read("linear_span", c.scheduler.linear_span);
        }
        {
            auto o = top.child("optimizer");
            o.read("learning_rate", c.optimizer.learning_rate);
            o.read("beta1", c.optimizer.beta1);
            o.read("beta2", c.optimizer.beta2);
            o.read("epsilon", c.optimizer.epsilon);
        }
        {
            auto e = top.child("evaluation");
            e.read("hypotheses", c.evaluation.hypotheses);
            e.read("nms_radius", c.evaluation.nms_radius);
            e.read("miss_threshold", c.evaluation.miss_threshold);
            e.read("tau", c.evaluation.tau);
            e.read("merge_radius", c.evaluation.merge_radius);
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const ExperimentConfig& c) {
    const auto& g = c.data.generator;
    json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["output_dir"] = c.output_dir.string();
    j["data"]["train_count"] = c.data.train_count;
    j["data"]["val_count"] = c.data.val_count;
    if (c.data.train_path) j["data"]["train_path"] = c.data.train_path->string();
    if (c.data.val_path) j["data"]["val_path"] = c.data.val_path->string();
    j["data"]["generator"] = {
        {"kind", data::to_string(g.kind)},
        {"branch_probabilities", g.branch_probabilities},
        {"branch_headings_deg", g.branch_headings_deg},
        {"speed_min", g.speed_min},
        {"speed_max", g.speed_max},
        {"accel_max", g.accel_max},
        {"heading_jitter_deg", g.heading_jitter_deg},
        {"noise_std", g.noise_std},
        {"dt", g.dt},
        {"mixture_radius", g.mixture_radius},
        {"position_range", g.position_range},
        {"past_steps", g.past_steps},
        {"future_steps", g.future_steps},
    };
    j["model"] = {{"heads", c.model.heads},
                  {"hidden_widths", c.model.hidden_widths},
                  {"init", c.model.init == nn::InitMode::Glorot ? "glorot" : "clustered"}};
    j["loss"] = {{"variant", losses::to_string(c.loss.variant)},
                 {"epsilon", c.loss.epsilon},
                 {"score_coefficient", c.loss.score_coefficient}};
    j["scheduler"] = {{"kind", schedule::to_string(c.scheduler.kind)},
                      {"initial_temperature", c.scheduler.initial_temperature},
                      {"decay", c.scheduler.decay},
                      {"floor_temperature", c.scheduler.floor_temperature},
                      {"linear_span", c.scheduler.linear_span}};
    j["optimizer"] = {{"learning_rate", c.optimizer.learning_rate},
                      {"beta1", c.optimizer.beta1},
                      {"beta2", c.optimizer.beta2},
                      {"epsilon", c.optimizer.epsilon}};
    j["evaluation"] = {{"hypotheses", c.evaluation.hypotheses},
                       {"nms_radius", c.evaluation.nms_radius},
                       {"miss_threshold", c.evaluation.miss_threshold},
                       {"tau", c.evaluation.tau},
                       {"merge_radius", c.evaluation.merge_radius}};
    return j.dump(2);
}

std::filesystem::path ExperimentConfig::run_dir() const {
    return output_dir.empty() ? default_output_root() / name : output_dir;
}

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("MCL_OUTPUT_ROOT"); env && *env) return env;
    return "runs";
}

}  // namespace mcl
