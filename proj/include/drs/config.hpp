/**
 * @file config.hpp
 * @brief JSON configuration shared by the command-line tools.
 *
 * Top-level sections: "seed", "gait", "surface", "noise", "rates", "filter"
 * and "trials". Every key is optional and falls back to the defaults shown by
 * `drs --print-config`; unknown keys are rejected. Covariances in "noise"
 * accept a scalar (isotropic), a 3-array (diagonal) or a 9-array (row-major).
 */

#pragma once

#include <drs/harness.hpp>

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace drs {

class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct AppConfig
{
    std::uint64_t seed = 1;
    GaitConfig gait;
    SurfaceConfig surface;
    NoiseParams noise;
    SensorRates rates;
    Variant variant = Variant::Proposed;
    UpdateSchedule schedule = UpdateSchedule::EveryStep;
    double epsilon = 1e-9;
    TrialConfig trials;

    /// Checks every section; throws ConfigError naming the offending field.
    void validate() const;

    FilterConfig filterConfig(Variant v) const;
    MonteCarloSetup monteCarloSetup() const;
};

nlohmann::json toJson(const AppConfig& cfg);
/// Throws ConfigError with a dotted field path on malformed input.
AppConfig configFromJson(const nlohmann::json& j);
AppConfig loadConfig(const std::string& path);

/// Writes through a temporary file and renames it into place.
void writeFileAtomic(const std::string& path, const std::string& content);

/// Reproducibility record stored next to every output set.
struct RunManifest
{
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;

    nlohmann::json toJson() const;
};

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace drs
