#include "test_util.hpp"

#include <drs/harness.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <sstream>

using namespace drs;
using namespace drs::test;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Independent percentile: explicit sort and linear interpolation between order statistics.
double sortOracle(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const double rank = q / 100.0 * static_cast<double>(v.size() - 1);
    const std::size_t below = static_cast<std::size_t>(rank);
    if (below + 1 >= v.size())
        return v.back();
    return v[below] * (1.0 - (rank - static_cast<double>(below))) + v[below + 1] * (rank - static_cast<double>(below));
}

MonteCarloSetup smallSetup(int n_trials, double duration)
{
    MonteCarloSetup s;
    s.trials.n_trials = n_trials;
    s.trials.final_window = std::min(5.0, duration / 2);
    s.gait.duration = duration;
    return s;
}

std::vector<double> gridTimes(double duration, double rate)
{
    std::vector<double> t;
    const long n = std::lround(duration * rate);
    for (long i = 0; i <= n; ++i)
        t.push_back(static_cast<double>(i * 4) * (1.0 / 400.0));
    return t;
}

TrialResult constantTrial(double value, std::size_t n, Variant v = Variant::Proposed)
{
    TrialResult r;
    VariantSeries s;
    s.variant = v;
    s.initial = {0.0, value, value, value, value, value, value};
    for (std::size_t i = 0; i < n; ++i)
        s.rows.push_back({static_cast<double>(i * 4) * (1.0 / 400.0), value, value, value, value, value, value});
    r.series.push_back(s);
    return r;
}

TEST(Nees, TrivialCases)
{
    EXPECT_EQ(nees(TangentVec::Zero(), Mat12::Identity()), 0.0);
    EXPECT_NEAR(nees(TangentVec::Unit(4), Mat12::Identity(), 1e-15), 1.0, 1e-14);
}

TEST(Nees, MatchesLinearSolveOracle)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const Mat12 P = randSpd(rng);
        const TangentVec xi = randTangent(rng);
        const double eps = 1e-9;
        const Mat12 reg = P + eps * Mat12::Identity();
        const double oracle = xi.dot(reg.fullPivLu().solve(xi));
        EXPECT_NEAR(nees(xi, P, eps), oracle, 1e-9 * std::max(1.0, oracle));
    }
}

TEST(Nees, SingularAfterRegularizationIsAnError)
{
    Mat12 P = Mat12::Identity();
    P(0, 0) = -1.0;
    EXPECT_THROW(nees(TangentVec::Unit(0), P), FilterError);
}

TEST(Percentile, MatchesSortOracle)
{
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> data(1 + trial * 3);
        for (double& x : data)
            x = n(rng);
        for (double q : {0.0, 10.0, 25.0, 50.0, 73.3, 90.0, 100.0})
            EXPECT_NEAR(percentile(data, q), sortOracle(data, q), 1e-12);
    }
    EXPECT_EQ(percentile({1.0, 2.0, 3.0, 4.0}, 50.0), 2.5);
    EXPECT_THROW(percentile({}, 50.0), std::invalid_argument);
}

TEST(Aggregate, SingleTrialBandsEqualTheTrial)
{
    const auto times = gridTimes(1.0, 100.0);
    TrialResult r = constantTrial(0.0, times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        r.series[0].rows[i].yaw_err = -static_cast<double>(i);
    const MonteCarloReport rep = aggregate({r}, times, 0.5);
    const PercentileSeries& ps = rep.variants[0].metrics[4];
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_EQ(ps.p10[i], static_cast<double>(i));
        EXPECT_EQ(ps.p50[i], static_cast<double>(i));
        EXPECT_EQ(ps.p90[i], static_cast<double>(i));
    }
}

TEST(Aggregate, ConstantSeriesGiveThatConstant)
{
    const auto times = gridTimes(1.0, 100.0);
    std::vector<TrialResult> trials;
    for (int i = 0; i < 7; ++i)
        trials.push_back(constantTrial(2.5, times.size()));
    const MonteCarloReport rep = aggregate(trials, times, 0.5);
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
        EXPECT_EQ(rep.variants[0].median_initial[k], 2.5);
        EXPECT_EQ(rep.variants[0].median_final[k], 2.5);
        for (double v : rep.variants[0].metrics[k].p50)
            EXPECT_EQ(v, 2.5);
        for (double v : rep.variants[0].metrics[k].p90)
            EXPECT_EQ(v, 2.5);
    }
}

TEST(Aggregate, FinalStatisticIsMedianOfTailMeans)
{
    const auto times = gridTimes(1.0, 100.0);
    std::vector<TrialResult> trials;
    for (double level : {1.0, 5.0, 3.0})
        trials.push_back(constantTrial(level, times.size()));
    // Trial 0: tail alternates 0 / 2 -> mean 1 over the window.
    for (auto& row : trials[0].series[0].rows)
        row.vel_err = (std::lround(row.t * 100) % 2 == 0) ? 0.0 : 2.0;
    const MonteCarloReport rep = aggregate(trials, times, 1.0);
    EXPECT_NEAR(rep.variants[0].median_final[1], 3.0, 1e-12);
}

TEST(TrialSeeds, DeterministicAndDistinct)
{
    const TrialSeeds a = trialSeeds(1, 0), b = trialSeeds(1, 0), c = trialSeeds(1, 1), d = trialSeeds(2, 0);
    EXPECT_EQ(a.gait, b.gait);
    EXPECT_EQ(a.sensors, b.sensors);
    EXPECT_EQ(a.init, b.init);
    EXPECT_NE(a.gait, c.gait);
    EXPECT_NE(a.gait, d.gait);
    EXPECT_NE(a.gait, a.sensors);
    EXPECT_NE(a.sensors, a.init);
}

TEST(InitialError, RespectsRanges)
{
    TrialConfig tcfg;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const TangentVec xi = sampleInitialError(tcfg, seed);
        EXPECT_LE(std::abs(xi(0)), 10.0 * kDeg);
        EXPECT_LE(std::abs(xi(1)), 10.0 * kDeg);
        EXPECT_LE(std::abs(xi(2)), 30.0 * kDeg);
        EXPECT_LE(xi.tail<9>().cwiseAbs().maxCoeff(), 0.5);
    }
    tcfg.yaw_range_deg = 0.0;
    EXPECT_EQ(sampleInitialError(tcfg, 3)(2), 0.0);
    tcfg.n_trials = 0;
    EXPECT_THROW(tcfg.validate(), std::invalid_argument);
}

TEST(RunTrial, ZeroErrorZeroNoiseTracksTruth)
{
    GaitConfig gait;
    gait.duration = 10.0;
    const SensorStream stream =
        synthesize_sensors(generate_truth(gait, SurfaceConfig{}, 3), NoiseParams::zero(), SensorRates{}, 3);
    TrialConfig tcfg;
    tcfg.yaw_range_deg = tcfg.roll_pitch_range_deg = 0.0;
    tcfg.position_range = tcfg.velocity_range = tcfg.foot_range = 0.0;
    std::vector<FilterConfig> fcfgs(2);
    fcfgs[0].noise = fcfgs[1].noise = NoiseParams::zero();
    fcfgs[1].variant = Variant::PositionOnly;
    const TrialResult r = run_trial(stream, tcfg, fcfgs, 5);
    ASSERT_EQ(r.series.size(), 2u);
    for (const VariantSeries& s : r.series)
        for (const MetricsRow& row : s.rows) {
            EXPECT_LT(row.pos_err, 1e-5);
            EXPECT_LT(row.vel_err, 1e-5);
            // Angles are reported in degrees; the tolerance applies in radians.
            EXPECT_LT(std::abs(row.roll_err) * kDeg, 1e-5);
            EXPECT_LT(std::abs(row.pitch_err) * kDeg, 1e-5);
            EXPECT_LT(std::abs(row.yaw_err) * kDeg, 1e-5);
        }
}

TEST(RunTrial, YawOnlyReferenceRunConverges)
{
    // Reference run with a 30 deg yaw-only initial error on the rocking
    // surface; the frozen threshold is a tenfold reduction.
    GaitConfig gait;
    const TrialSeeds seeds = trialSeeds(1, 0);
    const NoiseParams noise;
    const SensorStream stream =
        synthesize_sensors(generate_truth(gait, SurfaceConfig{}, seeds.gait), noise, SensorRates{}, seeds.sensors);
    const TruthSample truth0 = stream.truthSamples().front();
    TangentVec xi0 = TangentVec::Zero();
    xi0(2) = 30.0 * kDeg;
    State init;
    init.mean = sek3_exp(xi0) * truth0.x;
    init.cov = TrialConfig{}.initialCovariance();
    init.t = truth0.t;
    FilterConfig cfg;
    cfg.noise = noise;
    Estimator est(init, cfg);
    double yaw_final = 0.0;
    for (const Event& e : stream.events) {
        est.step(e);
        if (const auto* ts = std::get_if<TruthSample>(&e))
            yaw_final = error_vs_truth(est.state(), ts->x).yaw_err;
    }
    EXPECT_LT(std::abs(yaw_final), 30.0 / 10.0);
}

TEST(MonteCarlo, DeterministicAcrossJobCounts)
{
    const MonteCarloSetup setup = smallSetup(3, 2.0);
    const MonteCarloReport a = monte_carlo(setup, 1);
    const MonteCarloReport b = monte_carlo(setup, 3);
    std::ostringstream sa, sb;
    writeAggregateCsv(sa, a);
    writeAggregateCsv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        std::ostringstream ta, tb;
        writeTrialCsv(ta, a.trials[i]);
        writeTrialCsv(tb, b.trials[i]);
        EXPECT_EQ(ta.str(), tb.str());
    }
}

TEST(MonteCarlo, PermutingTrialsLeavesAggregateUnchanged)
{
    const MonteCarloSetup setup = smallSetup(4, 2.0);
    const MonteCarloReport rep = monte_carlo(setup, 1);
    std::vector<TrialResult> shuffled = rep.trials;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[0], shuffled[2]);
    const MonteCarloReport rep2 = aggregate(shuffled, rep.times, setup.trials.final_window);
    std::ostringstream a, b;
    writeAggregateCsv(a, rep);
    writeAggregateCsv(b, rep2);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(rep.variants[0].median_final, rep2.variants[0].median_final);
}

TEST(MonteCarlo, ReportShape)
{
    const MonteCarloSetup setup = smallSetup(2, 1.0);
    const MonteCarloReport rep = monte_carlo(setup, 1);
    EXPECT_EQ(rep.times.size(), 101u);
    ASSERT_EQ(rep.variants.size(), 2u);
    EXPECT_EQ(rep.variants[0].variant, Variant::Proposed);
    EXPECT_EQ(rep.variants[1].variant, Variant::PositionOnly);
    for (const auto& v : rep.variants)
        for (const auto& ps : v.metrics) {
            EXPECT_EQ(ps.p50.size(), rep.times.size());
            for (std::size_t i = 0; i < ps.p50.size(); ++i) {
                EXPECT_LE(ps.p10[i], ps.p50[i]);
                EXPECT_LE(ps.p50[i], ps.p90[i]);
            }
        }
}

TEST(Csv, StableHeaders)
{
    const MonteCarloReport rep = monte_carlo(smallSetup(1, 0.5), 1);
    std::ostringstream agg, trial;
    writeAggregateCsv(agg, rep);
    writeTrialCsv(trial, rep.trials[0]);
    EXPECT_EQ(agg.str().substr(0, agg.str().find('\n')), "t,variant,metric,p10,p50,p90");
    EXPECT_EQ(trial.str().substr(0, trial.str().find('\n')), "t,variant,pos_err,vel_err,roll_err,pitch_err,yaw_err,nees");
}

TEST(Checks, ThresholdLogic)
{
    auto makeReport = [](double prop_yaw_final, double base_yaw_final, double yaw_initial) {
        MonteCarloReport r;
        for (Variant v : {Variant::Proposed, Variant::PositionOnly}) {
            VariantAggregate a;
            a.variant = v;
            a.median_initial.fill(1.0);
            a.median_final.fill(0.01);
            a.median_initial[4] = yaw_initial;
            a.median_final[4] = v == Variant::Proposed ? prop_yaw_final : base_yaw_final;
            r.variants.push_back(a);
        }
        return r;
    };
    auto gating_ok = [](const std::vector<CheckResult>& cs) {
        return std::all_of(cs.begin(), cs.end(), [](const CheckResult& c) { return !c.gating || c.pass; });
    };
    EXPECT_TRUE(gating_ok(evaluate_checks(makeReport(1.0, 10.0, 15.0), makeReport(15.0, 15.0, 15.0))));
    EXPECT_FALSE(gating_ok(evaluate_checks(makeReport(3.0, 10.0, 15.0), makeReport(15.0, 15.0, 15.0))));
    EXPECT_FALSE(gating_ok(evaluate_checks(makeReport(1.0, 10.0, 15.0), makeReport(1.0, 15.0, 15.0))));
}

}  // namespace
