// drs: simulate, estimate and compare filters for walking on a rocking surface.
//
// Exit codes: 0 success, 2 configuration or I/O error, 3 malformed input data,
// 4 a gating Monte Carlo check failed.

#include <drs/config.hpp>
#include <drs/stream_io.hpp>
#include <drs/svg_plot.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace drs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitGate = 4;

struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Options
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::string variant;
    int jobs = 0;
    std::optional<int> trials;
    bool print_config = false;
    std::string stream_path;
};

AppConfig resolveConfig(const Options& opt)
{
    AppConfig cfg = opt.config_path.empty() ? AppConfig{} : loadConfig(opt.config_path);
    if (opt.seed) {
        cfg.seed = *opt.seed;
        cfg.trials.master_seed = *opt.seed;
    }
    if (!opt.variant.empty()) {
        try {
            cfg.variant = variantFromString(opt.variant);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--variant: ") + e.what());
        }
    }
    if (opt.trials)
        cfg.trials.n_trials = *opt.trials;
    cfg.validate();
    return cfg;
}

void ensureDir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory '" + dir + "'");
    const fs::path probe = fs::path(dir) / ".drs_write_probe";
    {
        std::ofstream os(probe);
        if (!os)
            throw IoError("output directory '" + dir + "' is not writable");
    }
    fs::remove(probe, ec);
}

void writeOutput(const fs::path& path, const std::string& content)
{
    try {
        writeFileAtomic(path.string(), content);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
}

std::string commandLine(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i)
            s += ' ';
        s += argv[i];
    }
    return s;
}

double secondsSince(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void writeManifest(const fs::path& dir, RunManifest m)
{
    m.outputs.push_back("manifest.json");
    writeOutput(dir / "manifest.json", m.toJson().dump(2) + "\n");
}

int runSim(const AppConfig& cfg, const Options& opt, RunManifest manifest)
{
    const auto t0 = std::chrono::steady_clock::now();
    ensureDir(opt.out_dir);
    const TrialSeeds seeds = trialSeeds(cfg.seed, 0);
    const TruthTrajectory truth = generate_truth(cfg.gait, cfg.surface, seeds.gait, cfg.rates.imuDt());
    const SensorStream stream = synthesize_sensors(truth, cfg.noise, cfg.rates, seeds.sensors);

    const fs::path out = fs::path(opt.out_dir) / "stream.jsonl";
    try {
        writeStreamFile(out.string(), stream);
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    std::cout << "wrote " << stream.events.size() << " records to " << out.string() << "\n";

    manifest.outputs = {"stream.jsonl"};
    manifest.wall_clock_seconds = secondsSince(t0);
    writeManifest(opt.out_dir, manifest);
    return kExitOk;
}

int runEstimate(const AppConfig& cfg, const Options& opt, RunManifest manifest)
{
    const auto t0 = std::chrono::steady_clock::now();
    const SensorStream stream = readStreamFile(opt.stream_path);
    const std::vector<TruthSample> truth = stream.truthSamples();
    if (truth.empty())
        throw StreamError(0, "stream has no truth record to initialize the filter");
    ensureDir(opt.out_dir);

    State init;
    init.mean = truth.front().x;
    init.cov = cfg.trials.initialCovariance();
    init.t = truth.front().t;
    Estimator est(init, cfg.filterConfig(cfg.variant));

    std::ostringstream csv;
    csv << "t,px,py,pz,vx,vy,vz,roll,pitch,yaw,dx,dy,dz,pos_err,vel_err,roll_err,pitch_err,yaw_err,nees\n";
    char buf[512];
    std::size_t rows = 0;
    double last_pos = 0.0, last_yaw = 0.0;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const Event& e = stream.events[i];
        try {
            est.step(e);
        } catch (const FilterError& err) {
            throw StreamError(i + 1, err.what());
        }
        if (const auto* ts = std::get_if<TruthSample>(&e)) {
            const State& s = est.state();
            const ErrorMetrics m = error_vs_truth(s, ts->x);
            const Vec3 rpy = rollPitchYaw(s.mean.rot.matrix()) * (180.0 / M_PI);
            const Vec3 p = s.mean.position(), v = s.mean.velocity(), d = s.mean.foot();
            std::snprintf(buf, sizeof buf,
                          "%.6f,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,"
                          "%.9g\n",
                          ts->t, p.x(), p.y(), p.z(), v.x(), v.y(), v.z(), rpy.x(), rpy.y(), rpy.z(), d.x(), d.y(),
                          d.z(), m.pos_err, m.vel_err, m.roll_err, m.pitch_err, m.yaw_err,
                          nees(m.xi, s.cov, cfg.epsilon));
            csv << buf;
            ++rows;
            last_pos = m.pos_err;
            last_yaw = m.yaw_err;
        }
    }
    writeOutput(fs::path(opt.out_dir) / "estimate.csv", csv.str());
    std::cout << "variant " << toString(cfg.variant) << ": " << stream.events.size() << " records, " << rows
              << " truth rows; final position error " << last_pos << " m, yaw error " << last_yaw << " deg\n";

    manifest.outputs = {"estimate.csv"};
    manifest.wall_clock_seconds = secondsSince(t0);
    writeManifest(opt.out_dir, manifest);
    return kExitOk;
}

const char* metricUnit(Metric m)
{
    switch (m) {
    case Metric::Position: return "position error [m]";
    case Metric::Velocity: return "velocity error [m/s]";
    case Metric::Roll: return "|roll error| [deg]";
    case Metric::Pitch: return "|pitch error| [deg]";
    case Metric::Yaw: return "|yaw error| [deg]";
    case Metric::Nees: return "NEES";
    }
    return "";
}

std::string plotMetric(const MonteCarloReport& report, std::size_t mi, const std::string& title)
{
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::vector<BandSeries> series;
    for (std::size_t k = 0; k < report.variants.size(); ++k) {
        const VariantAggregate& va = report.variants[k];
        const PercentileSeries& ps = va.metrics[mi];
        series.push_back({toString(va.variant), kColors[k % 4], ps.p10, ps.p50, ps.p90});
    }
    PlotSpec spec;
    spec.title = title;
    spec.y_label = metricUnit(kAllMetrics[mi]);
    return render_band_plot(spec, report.times, series);
}

int runMonteCarlo(const AppConfig& cfg, const Options& opt, RunManifest manifest)
{
    const auto t0 = std::chrono::steady_clock::now();
    ensureDir(opt.out_dir);
    const fs::path out(opt.out_dir);
    std::error_code ec;
    fs::create_directories(out / "trials", ec);
    if (ec)
        throw IoError("cannot create '" + (out / "trials").string() + "'");

    int jobs = opt.jobs > 0 ? opt.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    const MonteCarloSetup rocking_setup = cfg.monteCarloSetup();
    MonteCarloSetup control_setup = rocking_setup;
    control_setup.surface.pitch_amplitude = 0.0;

    std::cout << "running " << rocking_setup.trials.n_trials << " trials on the rocking surface (" << jobs
              << " jobs)\n";
    const MonteCarloReport rocking = monte_carlo(rocking_setup, jobs);
    std::cout << "running " << control_setup.trials.n_trials << " trials on the level surface\n";
    const MonteCarloReport control = monte_carlo(control_setup, jobs);

    std::vector<std::string> outputs;
    auto emit = [&](const std::string& rel, const std::string& content) {
        writeOutput(out / rel, content);
        outputs.push_back(rel);
    };
    {
        std::ostringstream os;
        writeAggregateCsv(os, rocking);
        emit("aggregate.csv", os.str());
    }
    {
        std::ostringstream os;
        writeAggregateCsv(os, control);
        emit("control_aggregate.csv", os.str());
    }
    for (std::size_t i = 0; i < rocking.trials.size(); ++i) {
        std::ostringstream os;
        writeTrialCsv(os, rocking.trials[i]);
        char name[64];
        std::snprintf(name, sizeof name, "trials/trial_%03zu.csv", i);
        emit(name, os.str());
    }
    for (std::size_t mi = 0; mi < kAllMetrics.size(); ++mi) {
        const std::string metric = toString(kAllMetrics[mi]);
        emit(metric + ".svg", plotMetric(rocking, mi, metric + " (rocking surface, p10-p90)"));
        emit("control_" + metric + ".svg", plotMetric(control, mi, metric + " (level surface, p10-p90)"));
    }

    std::cout << "\nfinal-window medians (|error|, last " << cfg.trials.final_window << " s)\n";
    std::printf("%-14s %-10s %12s %12s\n", "variant", "metric", "initial", "final");
    for (const auto* rep : {&rocking, &control}) {
        std::cout << (rep == &rocking ? "rocking surface\n" : "level surface\n");
        for (const VariantAggregate& va : rep->variants)
            for (std::size_t mi = 0; mi < kAllMetrics.size(); ++mi)
                std::printf("%-14s %-10s %12.5g %12.5g\n", toString(va.variant).c_str(),
                            toString(kAllMetrics[mi]).c_str(), va.median_initial[mi], va.median_final[mi]);
    }

    const std::vector<CheckResult> checks = evaluate_checks(rocking, control);
    bool gate_ok = true;
    std::cout << "\nchecks\n";
    nlohmann::json jchecks = nlohmann::json::array();
    for (const CheckResult& c : checks) {
        std::printf("%-4s %-10s %s: %s\n", c.pass ? "PASS" : "FAIL", c.gating ? "" : "(report)", c.name.c_str(),
                    c.detail.c_str());
        if (c.gating && !c.pass)
            gate_ok = false;
        jchecks.push_back({{"name", c.name}, {"gating", c.gating}, {"pass", c.pass}, {"detail", c.detail}});
    }
    emit("checks.json", jchecks.dump(2) + "\n");

    manifest.outputs = outputs;
    manifest.wall_clock_seconds = secondsSince(t0);
    writeManifest(out, manifest);
    return gate_ok ? kExitOk : kExitGate;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Invariant EKF for legged walking on a rocking rigid surface"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(0, 1);

    Options opt;
    std::uint64_t seed = 0;
    int trials = 0;
    app.add_option("--config", opt.config_path, "JSON configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    app.add_flag("--print-config", opt.print_config, "print the effective configuration as JSON and exit");

    auto* sim = app.add_subcommand("sim", "simulate a walking run and write its sensor stream");
    auto* estimate = app.add_subcommand("estimate", "run the filter over a recorded sensor stream");
    estimate->add_option("stream", opt.stream_path, "JSON-lines sensor stream")->required();
    estimate->add_option("--variant", opt.variant, "proposed | position-only");
    auto* mc = app.add_subcommand("montecarlo", "compare filter variants over randomized trials");
    mc->add_option("--jobs", opt.jobs, "worker threads (default: hardware concurrency)");
    auto* trials_opt = mc->add_option("--trials", trials, "number of trials (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (*seed_opt)
        opt.seed = seed;
    if (*trials_opt)
        opt.trials = trials;

    try {
        const AppConfig cfg = resolveConfig(opt);
        if (opt.print_config) {
            std::cout << toJson(cfg).dump(2) << "\n";
            return kExitOk;
        }
        RunManifest manifest;
        manifest.command = commandLine(argc, argv);
        manifest.config = toJson(cfg);
        manifest.seed = cfg.seed;
        if (*sim)
            return runSim(cfg, opt, manifest);
        if (*estimate)
            return runEstimate(cfg, opt, manifest);
        if (*mc)
            return runMonteCarlo(cfg, opt, manifest);
        std::cerr << app.help();
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StreamError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const FilterError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
