/**
 * @file filter.hpp
 * @brief Right-invariant EKF on SE_3(3) with foot-swap jumps.
 */

#pragma once

#include <drs/models.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace drs {

class FilterError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class StanceFoot { Left, Right };

inline StanceFoot opposite(StanceFoot f)
{
    return f == StanceFoot::Left ? StanceFoot::Right : StanceFoot::Left;
}

struct State
{
    GroupElement mean;
    Mat12 cov = Mat12::Identity();  ///< right-invariant error covariance
    double t = 0.0;
    StanceFoot stance_foot = StanceFoot::Left;
};

enum class Variant {
    Proposed,     ///< position and foot-orientation updates
    PositionOnly  ///< position update only
};

enum class UpdateSchedule {
    EveryStep,     ///< every kinematic sample during stance
    OnContactOnly  ///< first kinematic sample after each swap (and at start)
};

std::string toString(Variant v);
std::string toString(UpdateSchedule s);
Variant variantFromString(const std::string& s);
UpdateSchedule scheduleFromString(const std::string& s);

struct FilterConfig
{
    NoiseParams noise;
    Variant variant = Variant::Proposed;
    UpdateSchedule update_schedule = UpdateSchedule::EveryStep;
    double epsilon = 1e-9;  ///< added to the innovation covariance before inversion
    Constants constants;
};

struct JumpInput
{
    Vec3 h_d = Vec3::Zero();  ///< new stance foot relative to the old one, base frame
};

/// Closed-form zero-order-hold integration of the mean plus covariance propagation.
State propagate(const State& s, const ImuStep& u, const NoiseParams& noise, const Constants& c = {});

/// Right-invariant update with Joseph-form covariance.
State update(const State& s, const InvariantMeasurement& m, double epsilon);

/// d+ = d + R h_d. With a zero q_jump the covariance is copied untouched.
State apply_jump(const State& s, const JumpInput& j, const Mat12& q_jump);

// Stream events consumed by the estimator.
struct FkPosition
{
    double t = 0.0;
    Vec3 hp = Vec3::Zero();
};

struct FkOrientation
{
    double t = 0.0;
    Rotation foot_rot_in_base;
};

struct SurfacePose
{
    double t = 0.0;
    Rotation rot;
    Vec3 omega = Vec3::Zero();
};

struct SwapEvent
{
    double t = 0.0;
    Vec3 h_d = Vec3::Zero();
};

struct TruthSample
{
    double t = 0.0;
    GroupElement x;
};

using Event = std::variant<ImuStep, FkPosition, FkOrientation, SurfacePose, SwapEvent, TruthSample>;

double eventTime(const Event& e);

/// Single-owner hybrid estimator: routes stream events to propagate, update
/// and apply_jump. Events earlier than the current filter time are rejected.
class Estimator
{
public:
    Estimator(const State& initial, const FilterConfig& cfg);

    void step(const Event& event);

    const State& state() const { return state_; }
    const FilterConfig& config() const { return cfg_; }

    /// Tolerance on timestamp ordering, seconds.
    static constexpr double kTimeTolerance = 1e-9;

private:
    bool updateAllowed() const;

    State state_;
    FilterConfig cfg_;
    std::optional<Rotation> surface_rot_;
    bool fresh_contact_ = true;
    bool updated_ = false;
};

/// Errors of an estimate against ground truth. Angles in degrees.
struct ErrorMetrics
{
    TangentVec xi = TangentVec::Zero();  ///< log(mean * truth^-1)
    double pos_err = 0.0;
    double vel_err = 0.0;
    double roll_err = 0.0;
    double pitch_err = 0.0;
    double yaw_err = 0.0;
};

ErrorMetrics error_vs_truth(const State& s, const GroupElement& truth);

/// ZYX (yaw, pitch, roll) Euler angles of a rotation, radians. Returned as (roll, pitch, yaw).
Vec3 rollPitchYaw(const Mat3& R);

}  // namespace drs
