/**
 * @file config.cpp
 * @brief JSON configuration shared by the command-line tools.
 */

#include <drs/config.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace drs {

using nlohmann::json;

namespace {

// Strict reader over one JSON object: every key must be consumed.
class Section
{
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(where() + ": expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key)
    {
        used_.insert(key);
        return j_.at(key);
    }

    void number(const std::string& key, double& out)
    {
        if (!has(key))
            return;
        const json& v = raw(key);
        if (!v.is_number())
            throw ConfigError(field(key) + ": expected a number");
        out = v.get<double>();
    }

    void integer(const std::string& key, int& out)
    {
        if (!has(key))
            return;
        const json& v = raw(key);
        if (!v.is_number_integer())
            throw ConfigError(field(key) + ": expected an integer");
        out = v.get<int>();
    }

    void unsignedInt(const std::string& key, std::uint64_t& out)
    {
        if (!has(key))
            return;
        const json& v = raw(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError(field(key) + ": expected a non-negative integer");
        out = v.get<std::uint64_t>();
    }

    void vec3(const std::string& key, Vec3& out)
    {
        if (!has(key))
            return;
        const json& v = raw(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            throw ConfigError(field(key) + ": expected an array of 3 numbers");
        out = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }

    void covariance(const std::string& key, Mat3& out)
    {
        if (!has(key))
            return;
        const json& v = raw(key);
        auto allNumbers = [&v]() {
            for (const auto& x : v)
                if (!x.is_number())
                    return false;
            return true;
        };
        if (v.is_number()) {
            out = v.get<double>() * Mat3::Identity();
        } else if (v.is_array() && v.size() == 3 && allNumbers()) {
            out = Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>()).asDiagonal();
        } else if (v.is_array() && v.size() == 9 && allNumbers()) {
            for (int i = 0; i < 9; ++i)
                out(i / 3, i % 3) = v[i].get<double>();
        } else {
            throw ConfigError(field(key) + ": expected a number, 3 diagonal entries or 9 row-major entries");
        }
        if (!out.allFinite() || (out - out.transpose()).norm() > 1e-12)
            throw ConfigError(field(key) + ": covariance must be finite and symmetric");
        if (Eigen::SelfAdjointEigenSolver<Mat3>(out).eigenvalues().minCoeff() < -1e-12)
            throw ConfigError(field(key) + ": covariance must be positive semi-definite");
    }

    void string(const std::string& key, std::string& out)
    {
        if (!has(key))
            return;
        const json& v = raw(key);
        if (!v.is_string())
            throw ConfigError(field(key) + ": expected a string");
        out = v.get<std::string>();
    }

    Section sub(const std::string& key)
    {
        used_.insert(key);
        return Section(j_.at(key), field(key));
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                throw ConfigError(field(it.key()) + ": unknown key");
    }

private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

json cov(const Mat3& m)
{
    if (m.isApprox(m(0, 0) * Mat3::Identity(), 0.0))
        return m(0, 0);
    json a = json::array();
    for (int i = 0; i < 9; ++i)
        a.push_back(m(i / 3, i % 3));
    return a;
}

json vec(const Vec3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

template <typename Fn>
void rethrowAsConfig(Fn&& fn)
{
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

void AppConfig::validate() const
{
    rethrowAsConfig([this] {
        gait.validate();
        surface.validate();
        rates.validate();
        trials.validate();
    });
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw ConfigError("filter.epsilon: must be > 0");
}

FilterConfig AppConfig::filterConfig(Variant v) const
{
    FilterConfig cfg;
    cfg.noise = noise;
    cfg.variant = v;
    cfg.update_schedule = schedule;
    cfg.epsilon = epsilon;
    return cfg;
}

MonteCarloSetup AppConfig::monteCarloSetup() const
{
    MonteCarloSetup s;
    s.trials = trials;
    s.trials.master_seed = seed;
    s.gait = gait;
    s.surface = surface;
    s.noise = noise;
    s.rates = rates;
    s.schedule = schedule;
    s.epsilon = epsilon;
    return s;
}

json toJson(const AppConfig& c)
{
    json j;
    j["seed"] = c.seed;
    j["gait"] = {{"step_period", c.gait.step_period},       {"step_length", c.gait.step_length},
                 {"base_height", c.gait.base_height},       {"sway_lateral", c.gait.sway_lateral},
                 {"bob_vertical", c.gait.bob_vertical},     {"roll_amplitude", c.gait.roll_amplitude},
                 {"pitch_amplitude", c.gait.pitch_amplitude}, {"foot_width", c.gait.foot_width},
                 {"duration", c.gait.duration},             {"swap_jitter", c.gait.swap_jitter}};
    j["surface"] = {{"pitch_amplitude", c.surface.pitch_amplitude},
                    {"pitch_angular_freq", c.surface.pitch_angular_freq},
                    {"pivot", vec(c.surface.pivot)},
                    {"belt_speed", c.surface.belt_speed}};
    j["noise"] = {{"gyro_cov", cov(c.noise.gyro_cov)},
                  {"accel_cov", cov(c.noise.accel_cov)},
                  {"contact_vel_cov", cov(c.noise.contact_vel_cov)},
                  {"fk_pos_cov", cov(c.noise.fk_pos_cov)},
                  {"surface_orient_cov", cov(c.noise.surface_orient_cov)},
                  {"jump_foot_cov", cov(c.noise.jump_cov.block<3, 3>(block::kFoot, block::kFoot))}};
    j["rates"] = {{"imu", c.rates.imu},
                  {"kinematics", c.rates.kinematics},
                  {"surface", c.rates.surface},
                  {"truth", c.rates.truth}};
    j["filter"] = {{"variant", toString(c.variant)}, {"update_schedule", toString(c.schedule)}, {"epsilon", c.epsilon}};
    json variants = json::array();
    for (Variant v : c.trials.variants)
        variants.push_back(toString(v));
    j["trials"] = {{"n_trials", c.trials.n_trials},
                   {"yaw_range_deg", c.trials.yaw_range_deg},
                   {"roll_pitch_range_deg", c.trials.roll_pitch_range_deg},
                   {"position_range", c.trials.position_range},
                   {"velocity_range", c.trials.velocity_range},
                   {"foot_range", c.trials.foot_range},
                   {"variants", variants},
                   {"final_window", c.trials.final_window}};
    return j;
}

AppConfig configFromJson(const json& j)
{
    AppConfig c;
    Section root(j, "");
    root.unsignedInt("seed", c.seed);

    if (root.has("gait")) {
        Section s = root.sub("gait");
        s.number("step_period", c.gait.step_period);
        s.number("step_length", c.gait.step_length);
        s.number("base_height", c.gait.base_height);
        s.number("sway_lateral", c.gait.sway_lateral);
        s.number("bob_vertical", c.gait.bob_vertical);
        s.number("roll_amplitude", c.gait.roll_amplitude);
        s.number("pitch_amplitude", c.gait.pitch_amplitude);
        s.number("foot_width", c.gait.foot_width);
        s.number("duration", c.gait.duration);
        s.number("swap_jitter", c.gait.swap_jitter);
        s.finish();
    }
    if (root.has("surface")) {
        Section s = root.sub("surface");
        s.number("pitch_amplitude", c.surface.pitch_amplitude);
        s.number("pitch_angular_freq", c.surface.pitch_angular_freq);
        s.vec3("pivot", c.surface.pivot);
        s.number("belt_speed", c.surface.belt_speed);
        s.finish();
    }
    if (root.has("noise")) {
        Section s = root.sub("noise");
        s.covariance("gyro_cov", c.noise.gyro_cov);
        s.covariance("accel_cov", c.noise.accel_cov);
        s.covariance("contact_vel_cov", c.noise.contact_vel_cov);
        s.covariance("fk_pos_cov", c.noise.fk_pos_cov);
        s.covariance("surface_orient_cov", c.noise.surface_orient_cov);
        Mat3 jump = c.noise.jump_cov.block<3, 3>(block::kFoot, block::kFoot);
        s.covariance("jump_foot_cov", jump);
        c.noise.jump_cov.setZero();
        c.noise.jump_cov.block<3, 3>(block::kFoot, block::kFoot) = jump;
        s.finish();
    }
    if (root.has("rates")) {
        Section s = root.sub("rates");
        s.number("imu", c.rates.imu);
        s.number("kinematics", c.rates.kinematics);
        s.number("surface", c.rates.surface);
        s.number("truth", c.rates.truth);
        s.finish();
    }
    if (root.has("filter")) {
        Section s = root.sub("filter");
        std::string variant = toString(c.variant);
        std::string schedule = toString(c.schedule);
        s.string("variant", variant);
        s.string("update_schedule", schedule);
        s.number("epsilon", c.epsilon);
        s.finish();
        try {
            c.variant = variantFromString(variant);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("filter.variant: ") + e.what());
        }
        try {
            c.schedule = scheduleFromString(schedule);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("filter.update_schedule: ") + e.what());
        }
    }
    if (root.has("trials")) {
        Section s = root.sub("trials");
        s.integer("n_trials", c.trials.n_trials);
        s.number("yaw_range_deg", c.trials.yaw_range_deg);
        s.number("roll_pitch_range_deg", c.trials.roll_pitch_range_deg);
        s.number("position_range", c.trials.position_range);
        s.number("velocity_range", c.trials.velocity_range);
        s.number("foot_range", c.trials.foot_range);
        s.number("final_window", c.trials.final_window);
        if (s.has("variants")) {
            const json& v = s.raw("variants");
            if (!v.is_array())
                throw ConfigError("trials.variants: expected an array of strings");
            c.trials.variants.clear();
            for (const auto& item : v) {
                if (!item.is_string())
                    throw ConfigError("trials.variants: expected an array of strings");
                try {
                    c.trials.variants.push_back(variantFromString(item.get<std::string>()));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(std::string("trials.variants: ") + e.what());
                }
            }
        }
        s.finish();
    }
    root.finish();
    c.trials.master_seed = c.seed;
    c.validate();
    return c;
}

AppConfig loadConfig(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read config file '" + path + "'");
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return configFromJson(j);
}

void writeFileAtomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open '" + tmp + "' for writing");
        os << content;
        if (!os)
            throw std::runtime_error("write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

json RunManifest::toJson() const
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return {{"tool", "drs"},
            {"version", kToolVersion},
            {"command", command},
            {"seed", seed},
            {"config", config},
            {"outputs", outputs},
            {"wall_clock_seconds", wall_clock_seconds},
            {"created_utc", stamp}};
}

}  // namespace drs
