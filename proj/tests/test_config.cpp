#include <drs/config.hpp>
#include <drs/svg_plot.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace drs;
using nlohmann::json;

namespace {

std::string errorOf(const json& j)
{
    try {
        configFromJson(j);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(Config, DefaultsRoundTrip)
{
    const AppConfig def;
    const json j = toJson(def);
    const AppConfig back = configFromJson(j);
    EXPECT_EQ(toJson(back), j);
    EXPECT_EQ(configFromJson(json::object()).seed, def.seed);
}

TEST(Config, OverridesAreApplied)
{
    const json j = {{"seed", 7},
                    {"gait", {{"duration", 5.0}}},
                    {"surface", {{"pitch_amplitude", 0.0}, {"pivot", {0.1, 0.2, 0.3}}}},
                    {"noise", {{"gyro_cov", {1e-6, 2e-6, 3e-6}}, {"fk_pos_cov", 1e-3}}},
                    {"filter", {{"variant", "position-only"}, {"update_schedule", "on-contact-only"}}},
                    {"trials", {{"n_trials", 3}, {"variants", {"proposed"}}}}};
    const AppConfig c = configFromJson(j);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.trials.master_seed, 7u);
    EXPECT_EQ(c.gait.duration, 5.0);
    EXPECT_EQ(c.surface.pitch_amplitude, 0.0);
    EXPECT_EQ(c.surface.pivot, Vec3(0.1, 0.2, 0.3));
    EXPECT_EQ(c.noise.gyro_cov(2, 2), 3e-6);
    EXPECT_EQ(c.noise.gyro_cov(0, 1), 0.0);
    EXPECT_EQ(c.noise.fk_pos_cov, 1e-3 * Mat3::Identity());
    EXPECT_EQ(c.variant, Variant::PositionOnly);
    EXPECT_EQ(c.schedule, UpdateSchedule::OnContactOnly);
    EXPECT_EQ(c.trials.n_trials, 3);
    ASSERT_EQ(c.trials.variants.size(), 1u);
    EXPECT_EQ(c.monteCarloSetup().trials.master_seed, 7u);
    EXPECT_EQ(c.filterConfig(Variant::Proposed).update_schedule, UpdateSchedule::OnContactOnly);
}

TEST(Config, ErrorsNameTheField)
{
    EXPECT_NE(errorOf({{"surface", {{"pitch_amplitude", 0.4}}}}).find("surface.pitch_amplitude"), std::string::npos);
    EXPECT_NE(errorOf({{"gait", {{"step_period", "fast"}}}}).find("gait.step_period"), std::string::npos);
    EXPECT_NE(errorOf({{"gait", {{"stride", 1.0}}}}).find("gait.stride"), std::string::npos);
    EXPECT_NE(errorOf({{"bogus", 1}}).find("bogus"), std::string::npos);
    EXPECT_NE(errorOf({{"noise", {{"accel_cov", {1, 2}}}}}).find("noise.accel_cov"), std::string::npos);
    EXPECT_NE(errorOf({{"noise", {{"accel_cov", -1.0}}}}).find("noise.accel_cov"), std::string::npos);
    EXPECT_NE(errorOf({{"filter", {{"variant", "magic"}}}}).find("filter.variant"), std::string::npos);
    EXPECT_NE(errorOf({{"filter", {{"epsilon", 0.0}}}}).find("filter.epsilon"), std::string::npos);
    EXPECT_NE(errorOf({{"rates", {{"kinematics", 300.0}}}}).find("rates"), std::string::npos);
    EXPECT_NE(errorOf({{"trials", {{"n_trials", 0}}}}).find("trials.n_trials"), std::string::npos);
    EXPECT_NE(errorOf({{"seed", -1}}).find("seed"), std::string::npos);
    EXPECT_NE(errorOf(json::array()).find("config"), std::string::npos);
}

TEST(Config, LoadFromFile)
{
    const auto dir = std::filesystem::temp_directory_path() / "drs_config_test";
    std::filesystem::create_directories(dir);
    const std::string good = (dir / "good.json").string(), bad = (dir / "bad.json").string();
    writeFileAtomic(good, R"({"seed": 3, "gait": {"duration": 2.0}})");
    writeFileAtomic(bad, R"({"seed": 3,)");
    EXPECT_EQ(loadConfig(good).seed, 3u);
    EXPECT_THROW(loadConfig(bad), ConfigError);
    EXPECT_THROW(loadConfig((dir / "missing.json").string()), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(Manifest, ContainsReproducibilityFields)
{
    RunManifest m;
    m.command = "drs sim";
    m.config = toJson(AppConfig{});
    m.seed = 9;
    m.outputs = {"stream.jsonl"};
    const json j = m.toJson();
    for (const char* key : {"tool", "version", "command", "config", "seed", "outputs", "wall_clock_seconds"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["seed"], 9);
    EXPECT_EQ(j["version"], kToolVersion);
}

TEST(SvgPlot, RendersBandsAndMedians)
{
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<BandSeries> series{{"a", "#ff0000", {0, 1, 2, 3}, {1, 2, 3, 4}, {2, 3, 4, 5}},
                                         {"b<&>", "#0000ff", {0, 0, 0, 0}, {0.5, 0.5, 0.5, 0.5}, {1, 1, 1, 1}}};
    PlotSpec spec;
    spec.title = "yaw";
    const std::string svg = render_band_plot(spec, x, series);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    std::size_t polygons = 0, polylines = 0;
    for (std::size_t p = svg.find("<polygon"); p != std::string::npos; p = svg.find("<polygon", p + 1))
        ++polygons;
    for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1))
        ++polylines;
    EXPECT_EQ(polygons, 2u);
    EXPECT_EQ(polylines, 2u);
    EXPECT_NE(svg.find("b&lt;&amp;&gt;"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(SvgPlot, HandlesDegenerateData)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::string svg = render_band_plot(PlotSpec{}, {0.0, 1.0}, {{"c", "black", {nan, 1}, {nan, 1}, {nan, 1}}});
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
    EXPECT_EQ(svg.find("inf"), std::string::npos);
}

}  // namespace
