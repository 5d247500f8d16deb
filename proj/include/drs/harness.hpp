/**
 * @file harness.hpp
 * @brief Monte Carlo comparison of filter variants on synthetic rocking-surface walking.
 *
 * Seeding: every trial i draws its seeds from std::seed_seq{lo32(master),
 * hi32(master), i, 0x74726961}. The first three generated words seed the
 * gait jitter, the sensor noise and the initial-error draw, respectively, so
 * a trial's outcome depends only on (master seed, i) and never on scheduling.
 */

#pragma once

#include <drs/sim.hpp>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace drs {

struct TrialConfig
{
    int n_trials = 100;
    // Initial errors are uniform in +/- range per component of the tangent vector.
    double yaw_range_deg = 30.0;
    double roll_pitch_range_deg = 10.0;
    double position_range = 0.5;  ///< m
    double velocity_range = 0.5;  ///< m/s
    double foot_range = 0.5;      ///< m
    std::optional<Mat12> init_cov;  ///< defaults to diag(range^2), floored at 1e-8
    std::vector<Variant> variants{Variant::Proposed, Variant::PositionOnly};
    std::uint64_t master_seed = 1;
    double final_window = 5.0;  ///< s, tail window used for convergence statistics

    void validate() const;
    Mat12 initialCovariance() const;
};

struct TrialSeeds
{
    std::uint64_t gait;
    std::uint64_t sensors;
    std::uint64_t init;
};

TrialSeeds trialSeeds(std::uint64_t master_seed, int trial_index);

/// Samples the initial right-invariant error xi_0.
TangentVec sampleInitialError(const TrialConfig& tcfg, std::uint64_t seed);

struct MetricsRow
{
    double t = 0.0;
    double pos_err = 0.0;
    double vel_err = 0.0;
    double roll_err = 0.0;   ///< deg, signed
    double pitch_err = 0.0;  ///< deg, signed
    double yaw_err = 0.0;    ///< deg, signed
    double nees = 0.0;
};

struct VariantSeries
{
    Variant variant = Variant::Proposed;
    MetricsRow initial;  ///< before any event is processed
    std::vector<MetricsRow> rows;
};

struct TrialResult
{
    std::uint64_t seed = 0;
    TangentVec initial_error = TangentVec::Zero();
    std::vector<VariantSeries> series;
};

/// xi^T (cov + eps I)^-1 xi. Throws FilterError if the regularized covariance is not positive definite.
double nees(const TangentVec& xi, const Mat12& cov, double epsilon = 1e-9);

/// Runs every variant over the stream from the same perturbed initial state
/// exp(xi_0) * X_true(0), recording metrics at each truth record.
TrialResult run_trial(const SensorStream& stream, const TrialConfig& tcfg, const std::vector<FilterConfig>& fcfgs,
                      std::uint64_t trial_seed);

/// Linear-interpolation percentile (q in [0, 100]) of unsorted data.
double percentile(std::vector<double> data, double q);

enum class Metric { Position, Velocity, Roll, Pitch, Yaw, Nees };
inline constexpr std::array<Metric, 6> kAllMetrics{Metric::Position, Metric::Velocity, Metric::Roll,
                                                   Metric::Pitch,    Metric::Yaw,      Metric::Nees};
std::string toString(Metric m);
/// Magnitude of a metric in a row (angles absolute, degrees).
double metricValue(const MetricsRow& row, Metric m);

struct PercentileSeries
{
    std::vector<double> p10, p50, p90;
};

struct VariantAggregate
{
    Variant variant = Variant::Proposed;
    std::array<PercentileSeries, 6> metrics;  ///< indexed like kAllMetrics
    std::array<double, 6> median_initial{};   ///< median over trials of the initial |metric|
    std::array<double, 6> median_final{};     ///< median over trials of the final-window mean |metric|
};

struct MonteCarloReport
{
    std::vector<double> times;  ///< truth-rate grid
    std::vector<VariantAggregate> variants;
    std::vector<TrialResult> trials;  ///< in trial order

    const VariantAggregate& variant(Variant v) const;
};

struct MonteCarloSetup
{
    TrialConfig trials;
    GaitConfig gait;
    SurfaceConfig surface;
    NoiseParams noise;
    SensorRates rates;
    UpdateSchedule schedule = UpdateSchedule::EveryStep;
    double epsilon = 1e-9;
};

/// Deterministic reduction of per-trial results into percentile bands and tail statistics.
MonteCarloReport aggregate(std::vector<TrialResult> trials, const std::vector<double>& times, double final_window);

/// Runs n_trials independent trials on up to `jobs` threads.
MonteCarloReport monte_carlo(const MonteCarloSetup& setup, int jobs = 1);

struct CheckResult
{
    std::string name;
    bool gating = true;
    bool pass = false;
    std::string detail;
};

/// Observability and convergence checks over a rocking-surface report and a
/// static level-surface control report.
std::vector<CheckResult> evaluate_checks(const MonteCarloReport& rocking, const MonteCarloReport& control);

void writeTrialCsv(std::ostream& os, const TrialResult& trial);
void writeAggregateCsv(std::ostream& os, const MonteCarloReport& report);

}  // namespace drs
