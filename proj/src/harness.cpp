/**
 * @file harness.cpp
 * @brief Monte Carlo comparison of filter variants.
 */

#include <drs/harness.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace drs {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Gating thresholds.
constexpr double kYawObservabilityRatio = 5.0;
constexpr double kControlYawRetention = 0.5;
constexpr double kConvergenceRatio = 0.1;

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::size_t metricIndex(Metric m)
{
    return static_cast<std::size_t>(m);
}

}  // namespace

void TrialConfig::validate() const
{
    if (n_trials < 1)
        throw std::invalid_argument("trials.n_trials: must be >= 1");
    for (const auto& [name, value] :
         {std::pair{"trials.yaw_range_deg", yaw_range_deg}, {"trials.roll_pitch_range_deg", roll_pitch_range_deg},
          {"trials.position_range", position_range}, {"trials.velocity_range", velocity_range},
          {"trials.foot_range", foot_range}}) {
        if (!std::isfinite(value) || value < 0.0)
            throw std::invalid_argument(std::string(name) + ": must be finite and >= 0");
    }
    if (variants.empty())
        throw std::invalid_argument("trials.variants: must list at least one variant");
    if (!std::isfinite(final_window) || final_window <= 0.0)
        throw std::invalid_argument("trials.final_window: must be > 0");
}

Mat12 TrialConfig::initialCovariance() const
{
    if (init_cov)
        return *init_cov;
    Eigen::Matrix<double, 12, 1> var;
    const double rp = roll_pitch_range_deg * kDeg;
    const double yaw = yaw_range_deg * kDeg;
    var << rp * rp, rp * rp, yaw * yaw, Vec3::Constant(velocity_range * velocity_range),
        Vec3::Constant(position_range * position_range), Vec3::Constant(foot_range * foot_range);
    return var.cwiseMax(1e-8).asDiagonal();
}

TrialSeeds trialSeeds(std::uint64_t master_seed, int trial_index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(trial_index), 0x74726961u};
    std::array<std::uint32_t, 6> words{};
    seq.generate(words.begin(), words.end());
    auto join = [&](int i) { return (static_cast<std::uint64_t>(words[2 * i]) << 32) | words[2 * i + 1]; };
    return {join(0), join(1), join(2)};
}

TangentVec sampleInitialError(const TrialConfig& tcfg, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double range) {
        return range > 0.0 ? std::uniform_real_distribution<double>(-range, range)(rng) : 0.0;
    };
    const double rp = tcfg.roll_pitch_range_deg * kDeg;
    TangentVec xi;
    xi(0) = uniform(rp);
    xi(1) = uniform(rp);
    xi(2) = uniform(tcfg.yaw_range_deg * kDeg);
    for (int i = 0; i < 3; ++i)
        xi(block::kVel + i) = uniform(tcfg.velocity_range);
    for (int i = 0; i < 3; ++i)
        xi(block::kPos + i) = uniform(tcfg.position_range);
    for (int i = 0; i < 3; ++i)
        xi(block::kFoot + i) = uniform(tcfg.foot_range);
    return xi;
}

double nees(const TangentVec& xi, const Mat12& cov, double epsilon)
{
    const Mat12 reg = cov + epsilon * Mat12::Identity();
    const Eigen::LLT<Mat12> llt(reg);
    if (llt.info() != Eigen::Success)
        throw FilterError("nees: covariance is not positive definite after regularization");
    return xi.dot(llt.solve(xi));
}

namespace {

MetricsRow makeRow(double t, const State& s, const GroupElement& truth, double epsilon)
{
    const ErrorMetrics m = error_vs_truth(s, truth);
    return {t, m.pos_err, m.vel_err, m.roll_err, m.pitch_err, m.yaw_err, nees(m.xi, s.cov, epsilon)};
}

}  // namespace

TrialResult run_trial(const SensorStream& stream, const TrialConfig& tcfg, const std::vector<FilterConfig>& fcfgs,
                      std::uint64_t trial_seed)
{
    const auto first_truth = std::find_if(stream.events.begin(), stream.events.end(),
                                          [](const Event& e) { return std::holds_alternative<TruthSample>(e); });
    if (first_truth == stream.events.end())
        throw std::invalid_argument("run_trial: stream has no truth records");
    const TruthSample& truth0 = std::get<TruthSample>(*first_truth);
    if (!stream.events.empty() && eventTime(stream.events.front()) < truth0.t - Estimator::kTimeTolerance)
        throw std::invalid_argument("run_trial: stream must start with a truth record timestamp");

    TrialResult result;
    result.seed = trial_seed;
    result.initial_error = sampleInitialError(tcfg, trial_seed);

    State init;
    init.mean = sek3_exp(result.initial_error) * truth0.x;
    init.cov = tcfg.initialCovariance();
    init.t = truth0.t;
    init.stance_foot = StanceFoot::Left;

    for (const FilterConfig& cfg : fcfgs) {
        VariantSeries series;
        series.variant = cfg.variant;
        series.initial = makeRow(truth0.t, init, truth0.x, cfg.epsilon);
        Estimator est(init, cfg);
        try {
            for (const Event& e : stream.events) {
                est.step(e);
                if (const auto* ts = std::get_if<TruthSample>(&e))
                    series.rows.push_back(makeRow(ts->t, est.state(), ts->x, cfg.epsilon));
            }
        } catch (const FilterError& err) {
            throw FilterError(std::string(err.what()) + " [variant " + toString(cfg.variant) + ", trial seed "
                              + std::to_string(trial_seed) + "]");
        }
        result.series.push_back(std::move(series));
    }
    return result;
}

double percentile(std::vector<double> data, double q)
{
    if (data.empty())
        throw std::invalid_argument("percentile: empty data");
    std::sort(data.begin(), data.end());
    const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(data.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, data.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return data[lo] + frac * (data[hi] - data[lo]);
}

std::string toString(Metric m)
{
    switch (m) {
    case Metric::Position: return "pos_err";
    case Metric::Velocity: return "vel_err";
    case Metric::Roll: return "roll_err";
    case Metric::Pitch: return "pitch_err";
    case Metric::Yaw: return "yaw_err";
    case Metric::Nees: return "nees";
    }
    return "unknown";
}

double metricValue(const MetricsRow& row, Metric m)
{
    switch (m) {
    case Metric::Position: return row.pos_err;
    case Metric::Velocity: return row.vel_err;
    case Metric::Roll: return std::abs(row.roll_err);
    case Metric::Pitch: return std::abs(row.pitch_err);
    case Metric::Yaw: return std::abs(row.yaw_err);
    case Metric::Nees: return row.nees;
    }
    return 0.0;
}

const VariantAggregate& MonteCarloReport::variant(Variant v) const
{
    for (const auto& a : variants)
        if (a.variant == v)
            return a;
    throw std::invalid_argument("report has no variant " + toString(v));
}

MonteCarloReport aggregate(std::vector<TrialResult> trials, const std::vector<double>& times, double final_window)
{
    if (trials.empty())
        throw std::invalid_argument("aggregate: no trials");
    MonteCarloReport report;
    report.times = times;
    const std::size_t nt = times.size();
    const double t_end = times.empty() ? 0.0 : times.back();
    const double dt_grid = nt > 1 ? times[1] - times[0] : 1.0;

    const std::size_t nv = trials.front().series.size();
    for (std::size_t v = 0; v < nv; ++v) {
        VariantAggregate agg;
        agg.variant = trials.front().series[v].variant;

        // samples[metric][time] -> values across trials
        std::array<std::vector<std::vector<double>>, 6> samples;
        for (auto& s : samples)
            s.assign(nt, {});
        std::array<std::vector<double>, 6> initial, final_mean;

        for (const TrialResult& trial : trials) {
            const VariantSeries& series = trial.series.at(v);
            std::array<double, 6> tail_sum{};
            std::size_t tail_n = 0;
            for (const MetricsRow& row : series.rows) {
                const double idx = (row.t - times.front()) / dt_grid;
                const double rounded = std::round(idx);
                if (std::abs(idx - rounded) > 1e-6 || rounded < 0 || rounded >= static_cast<double>(nt))
                    continue;
                const auto i = static_cast<std::size_t>(rounded);
                for (Metric m : kAllMetrics)
                    samples[metricIndex(m)][i].push_back(metricValue(row, m));
                if (row.t >= t_end - final_window - 1e-9) {
                    for (Metric m : kAllMetrics)
                        tail_sum[metricIndex(m)] += metricValue(row, m);
                    ++tail_n;
                }
            }
            for (Metric m : kAllMetrics) {
                initial[metricIndex(m)].push_back(metricValue(series.initial, m));
                if (tail_n > 0)
                    final_mean[metricIndex(m)].push_back(tail_sum[metricIndex(m)] / static_cast<double>(tail_n));
            }
        }

        for (Metric m : kAllMetrics) {
            const std::size_t k = metricIndex(m);
            PercentileSeries& ps = agg.metrics[k];
            for (std::size_t i = 0; i < nt; ++i) {
                const auto& vals = samples[k][i];
                const double nan = std::numeric_limits<double>::quiet_NaN();
                ps.p10.push_back(vals.empty() ? nan : percentile(vals, 10.0));
                ps.p50.push_back(vals.empty() ? nan : percentile(vals, 50.0));
                ps.p90.push_back(vals.empty() ? nan : percentile(vals, 90.0));
            }
            agg.median_initial[k] = percentile(initial[k], 50.0);
            agg.median_final[k] = final_mean[k].empty() ? std::numeric_limits<double>::quiet_NaN()
                                                        : percentile(final_mean[k], 50.0);
        }
        report.variants.push_back(std::move(agg));
    }
    report.trials = std::move(trials);
    return report;
}

MonteCarloReport monte_carlo(const MonteCarloSetup& setup, int jobs)
{
    setup.trials.validate();
    setup.gait.validate();
    setup.surface.validate();
    setup.rates.validate();

    std::vector<FilterConfig> fcfgs;
    for (Variant v : setup.trials.variants) {
        FilterConfig cfg;
        cfg.noise = setup.noise;
        cfg.variant = v;
        cfg.update_schedule = setup.schedule;
        cfg.epsilon = setup.epsilon;
        fcfgs.push_back(cfg);
    }

    const int n = setup.trials.n_trials;
    std::vector<TrialResult> results(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (int i = next++; i < n; i = next++) {
            try {
                const TrialSeeds seeds = trialSeeds(setup.trials.master_seed, i);
                const TruthTrajectory truth =
                    generate_truth(setup.gait, setup.surface, seeds.gait, setup.rates.imuDt());
                const SensorStream stream = synthesize_sensors(truth, setup.noise, setup.rates, seeds.sensors);
                results[static_cast<std::size_t>(i)] = run_trial(stream, setup.trials, fcfgs, seeds.init);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };

    const int threads = std::clamp(jobs, 1, n);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < threads; ++k)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    const long ticks = std::lround(setup.gait.duration * setup.rates.truth);
    // Truth records sit on the IMU grid; use the same arithmetic as the simulator.
    const double imu_dt = setup.rates.imuDt();
    const long div = setup.rates.divisor(setup.rates.truth);
    std::vector<double> times;
    for (long i = 0; i <= ticks; ++i)
        times.push_back(static_cast<double>(i * div) * imu_dt);
    return aggregate(std::move(results), times, setup.trials.final_window);
}

std::vector<CheckResult> evaluate_checks(const MonteCarloReport& rocking, const MonteCarloReport& control)
{
    std::vector<CheckResult> out;
    const auto yaw = metricIndex(Metric::Yaw);

    {
        const auto& prop = rocking.variant(Variant::Proposed);
        const auto& base = rocking.variant(Variant::PositionOnly);
        CheckResult c;
        c.name = "yaw observable on rocking surface (proposed vs position-only)";
        c.pass = kYawObservabilityRatio * prop.median_final[yaw] <= base.median_final[yaw];
        c.detail = "final |yaw| median: proposed " + fmt(prop.median_final[yaw]) + " deg, position-only "
            + fmt(base.median_final[yaw]) + " deg (need ratio >= " + fmt(kYawObservabilityRatio) + ")";
        out.push_back(c);
    }
    for (const auto& agg : control.variants) {
        CheckResult c;
        c.name = "no yaw convergence on static level surface (" + toString(agg.variant) + ")";
        c.pass = agg.median_final[yaw] >= kControlYawRetention * agg.median_initial[yaw];
        c.detail = "level surface, " + toString(agg.variant) + ": final |yaw| median " + fmt(agg.median_final[yaw])
            + " deg vs initial "
            + fmt(agg.median_initial[yaw]) + " deg (need >= " + fmt(kControlYawRetention) + "x)";
        out.push_back(c);
    }
    for (const auto& agg : rocking.variants) {
        for (Metric m : {Metric::Roll, Metric::Pitch, Metric::Velocity}) {
            const auto k = metricIndex(m);
            CheckResult c;
            c.name = toString(m) + " converges (" + toString(agg.variant) + ")";
            c.pass = agg.median_final[k] < kConvergenceRatio * agg.median_initial[k];
            c.detail = "final median " + fmt(agg.median_final[k]) + " vs initial " + fmt(agg.median_initial[k])
                + " (need < " + fmt(kConvergenceRatio) + "x)";
            out.push_back(c);
        }
    }
    {
        const auto pos = metricIndex(Metric::Position);
        const auto& prop = rocking.variant(Variant::Proposed);
        const auto& base = rocking.variant(Variant::PositionOnly);
        CheckResult c;
        c.name = "position error smaller with proposed filter (report only)";
        c.gating = false;
        c.pass = prop.median_final[pos] < base.median_final[pos];
        c.detail = "final position error median: proposed " + fmt(prop.median_final[pos]) + " m, position-only "
            + fmt(base.median_final[pos]) + " m";
        out.push_back(c);
    }
    return out;
}

void writeTrialCsv(std::ostream& os, const TrialResult& trial)
{
    os << "t,variant,pos_err,vel_err,roll_err,pitch_err,yaw_err,nees\n";
    for (const VariantSeries& s : trial.series) {
        const std::string name = toString(s.variant);
        for (const MetricsRow& r : s.rows) {
            os << fmt(r.t) << ',' << name << ',' << fmt(r.pos_err) << ',' << fmt(r.vel_err) << ',' << fmt(r.roll_err)
               << ',' << fmt(r.pitch_err) << ',' << fmt(r.yaw_err) << ',' << fmt(r.nees) << '\n';
        }
    }
}

void writeAggregateCsv(std::ostream& os, const MonteCarloReport& report)
{
    os << "t,variant,metric,p10,p50,p90\n";
    for (const VariantAggregate& agg : report.variants) {
        const std::string name = toString(agg.variant);
        for (Metric m : kAllMetrics) {
            const PercentileSeries& ps = agg.metrics[metricIndex(m)];
            for (std::size_t i = 0; i < report.times.size(); ++i) {
                os << fmt(report.times[i]) << ',' << name << ',' << toString(m) << ',' << fmt(ps.p10[i]) << ','
                   << fmt(ps.p50[i]) << ',' << fmt(ps.p90[i]) << '\n';
            }
        }
    }
}

}  // namespace drs
