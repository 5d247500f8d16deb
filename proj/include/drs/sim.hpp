/**
 * @file sim.hpp
 * @brief Synthetic biped walking on a rocking rigid surface and sensor synthesis.
 *
 * The surface pitches about a horizontal axis through `pivot` (parallel to the
 * world y axis). The base follows an analytic C-infinity trajectory; stance
 * feet are rigidly attached to the surface from touchdown until the next swap.
 */

#pragma once

#include <drs/filter.hpp>

#include <cstdint>
#include <numbers>
#include <vector>

namespace drs {

struct SurfaceConfig
{
    double pitch_amplitude = std::numbers::pi / 60.0;  ///< rad (3 deg), in [0, 0.3]
    double pitch_angular_freq = 1.5 * std::numbers::pi;  ///< rad/s
    Vec3 pivot{-0.3, 0.0, 0.0};  ///< m, on the surface plane
    double belt_speed = 0.0;     ///< m/s along surface x

    void validate() const;
};

struct GaitConfig
{
    double step_period = 0.6;         ///< s
    double step_length = 0.0;         ///< m per step (0: stepping in place)
    double base_height = 1.0;         ///< m above the pivot
    double sway_lateral = 0.01;       ///< m, lateral base sway amplitude
    double bob_vertical = 0.01;       ///< m, vertical base bob amplitude
    double roll_amplitude = 0.035;    ///< rad, base roll sway
    double pitch_amplitude = 0.0175;  ///< rad, base pitch oscillation
    double foot_width = 0.25;         ///< m, lateral distance between feet
    double duration = 30.0;           ///< s
    double swap_jitter = 0.005;       ///< s, touchdown times uniform in +/- this

    void validate() const;
};

struct SensorRates
{
    double imu = 400.0;         ///< Hz
    double kinematics = 100.0;  ///< Hz
    double surface = 100.0;     ///< Hz
    double truth = 100.0;       ///< Hz

    double imuDt() const { return 1.0 / imu; }
    /// Number of IMU ticks between two samples at `rate`. Throws unless integral.
    long divisor(double rate) const;
    void validate() const;
};

struct SurfaceState
{
    Rotation rot;
    Vec3 omega = Vec3::Zero();  ///< world-frame angular velocity
};

SurfaceState surface_state(double t, const SurfaceConfig& cfg);

/// Pitch angle and its first two derivatives.
struct PitchProfile
{
    double theta;
    double rate;
    double accel;
};
PitchProfile surface_pitch(double t, const SurfaceConfig& cfg);

struct TruthPoint
{
    GroupElement x;                   ///< R, v, p and the stance-foot position
    Vec3 omega = Vec3::Zero();        ///< base angular velocity, world frame
    Vec3 accel = Vec3::Zero();        ///< base acceleration, world frame
    int stance = 0;                   ///< index of the stance foothold
};

struct Foothold
{
    long touchdown_tick = 0;
    Vec3 local = Vec3::Zero();  ///< contact point in surface coordinates relative to the pivot
    StanceFoot side = StanceFoot::Left;
};

/// Exact ground truth. Queries are analytic at any t in [0, duration].
class TruthTrajectory
{
public:
    TruthTrajectory(const GaitConfig& gait, const SurfaceConfig& surf, double grid_dt,
                    std::vector<Foothold> footholds);

    const GaitConfig& gait() const { return gait_; }
    const SurfaceConfig& surface() const { return surf_; }
    double gridDt() const { return grid_dt_; }
    long numTicks() const;
    const std::vector<Foothold>& footholds() const { return footholds_; }

    /// Stance index at time t; a foot in touchdown at exactly t is already in stance.
    int stanceAt(double t) const;
    int stanceAtTick(long tick) const;

    /// Base pose, velocity, acceleration and angular velocity.
    TruthPoint base(double t) const;
    /// Base state with d taken from the given foothold.
    TruthPoint at(double t, int stance) const;
    TruthPoint at(double t) const { return at(t, stanceAt(t)); }

    Vec3 footPosition(int stance, double t) const;
    Vec3 footVelocity(int stance, double t) const;

private:
    GaitConfig gait_;
    SurfaceConfig surf_;
    double grid_dt_;
    std::vector<Foothold> footholds_;
};

/// Touchdowns at k * step_period plus seeded jitter, snapped to the grid_dt tick grid.
TruthTrajectory generate_truth(const GaitConfig& gait, const SurfaceConfig& surf, std::uint64_t seed,
                               double grid_dt = 1.0 / 400.0);

/// Time-ordered record log.
///
/// Record order at a shared timestamp: swap, surface, fk_pos, fk_rot, truth,
/// imu. Truth therefore reflects the post-swap stance foot and metrics taken at a
/// truth record see the posterior after that tick's kinematic updates.
struct SensorStream
{
    std::vector<Event> events;

    std::vector<TruthSample> truthSamples() const;
};

/// Inverts the process and measurement models. IMU samples are the constant
/// inputs that carry the true state from one tick to the next under
/// zero-order-hold integration; they converge to R^T w and R^T (a - g) as the
/// IMU period shrinks. Truth records carry the analytic R, v and d; the
/// position follows the same hold recursion so the stream is exactly
/// self-consistent (it stays within ~1e-6 m of the analytic curve). Discrete
/// noise covariance = continuous density / dt.
SensorStream synthesize_sensors(const TruthTrajectory& truth, const NoiseParams& noise, const SensorRates& rates,
                                std::uint64_t seed);

}  // namespace drs
