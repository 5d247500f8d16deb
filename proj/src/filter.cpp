/**
 * @file filter.cpp
 * @brief Right-invariant EKF on SE_3(3) with foot-swap jumps.
 */

#include <drs/filter.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drs {

std::string toString(Variant v)
{
    return v == Variant::Proposed ? "proposed" : "position-only";
}

std::string toString(UpdateSchedule s)
{
    return s == UpdateSchedule::EveryStep ? "every-step" : "on-contact-only";
}

Variant variantFromString(const std::string& s)
{
    if (s == "proposed")
        return Variant::Proposed;
    if (s == "position-only")
        return Variant::PositionOnly;
    throw std::invalid_argument("unknown variant '" + s + "' (expected proposed | position-only)");
}

UpdateSchedule scheduleFromString(const std::string& s)
{
    if (s == "every-step")
        return UpdateSchedule::EveryStep;
    if (s == "on-contact-only")
        return UpdateSchedule::OnContactOnly;
    throw std::invalid_argument("unknown update schedule '" + s + "' (expected every-step | on-contact-only)");
}

namespace {

void symmetrize(Mat12& P)
{
    P = 0.5 * (P + P.transpose()).eval();
}

}  // namespace

State propagate(const State& s, const ImuStep& u, const NoiseParams& noise, const Constants& c)
{
    if (!u.isFinite())
        throw FilterError("propagate: non-finite IMU input at t=" + std::to_string(u.t));
    if (!(u.dt > 0.0) || u.dt > 0.1)
        throw FilterError("propagate: dt must lie in (0, 0.1], got " + std::to_string(u.dt));

    const double dt = u.dt;

    // A is nilpotent (A^3 = 0), so the series for exp(A dt) terminates.
    const Mat12 A = error_jacobian_A(u.contact_vel, c);
    const Mat12 Adt = A * dt;
    const Mat12 Phi = Mat12::Identity() + Adt + 0.5 * Adt * Adt;

    const Mat12 G = adjoint(s.mean);
    const Mat12 PhiG = Phi * G;
    const Mat12 Qd = PhiG * noise.processCov() * PhiG.transpose() * dt;

    State out = s;
    out.cov = Phi * s.cov * Phi.transpose() + Qd;
    symmetrize(out.cov);

    const Vec3 phi = u.gyro * dt;
    const Mat3& R = s.mean.rot.matrix();
    const Vec3& v = s.mean.velocity();
    const Vec3& p = s.mean.position();
    out.mean.rot = Rotation(R * so3_gamma(phi, 0));
    out.mean.velocity() = v + (R * so3_gamma(phi, 1) * u.accel + c.g) * dt;
    out.mean.position() = p + v * dt + (R * so3_gamma(phi, 2) * u.accel + 0.5 * c.g) * dt * dt;
    out.mean.foot() = s.mean.foot() + u.contact_vel * dt;
    out.mean.reorthonormalize();
    out.t = u.t + dt;
    return out;
}

State update(const State& s, const InvariantMeasurement& m, double epsilon)
{
    const Vec3 z = innovation(m, s.mean);
    const Eigen::Matrix<double, 12, 3> PHt = s.cov * m.H.transpose();
    const Mat3 Nreg = m.N + epsilon * Mat3::Identity();
    const Mat3 S = m.H * PHt + Nreg;

    const Eigen::LLT<Mat3> llt(S);
    if (llt.info() != Eigen::Success || !S.allFinite())
        throw FilterError("update: innovation covariance is not positive definite");
    const Eigen::Matrix<double, 12, 3> K = llt.solve(PHt.transpose()).transpose();

    State out = s;
    out.mean = sek3_exp(K * z) * s.mean;

    const Mat12 IKH = Mat12::Identity() - K * m.H;
    out.cov = IKH * s.cov * IKH.transpose() + K * Nreg * K.transpose();
    symmetrize(out.cov);
    return out;
}

State apply_jump(const State& s, const JumpInput& j, const Mat12& q_jump)
{
    State out = s;
    out.mean.foot() = s.mean.foot() + s.mean.rot.matrix() * j.h_d;
    out.stance_foot = opposite(s.stance_foot);
    if (!q_jump.isZero(0.0)) {
        const Mat12 Ad = adjoint(out.mean);
        out.cov = s.cov + Ad * q_jump * Ad.transpose();
        symmetrize(out.cov);
    }
    return out;
}

double eventTime(const Event& e)
{
    return std::visit([](const auto& ev) { return ev.t; }, e);
}

Estimator::Estimator(const State& initial, const FilterConfig& cfg) : state_(initial), cfg_(cfg)
{
    if (!(cfg.epsilon > 0.0))
        throw std::invalid_argument("FilterConfig: epsilon must be > 0");
}

bool Estimator::updateAllowed() const
{
    return cfg_.update_schedule == UpdateSchedule::EveryStep || fresh_contact_;
}

void Estimator::step(const Event& event)
{
    const double t = eventTime(event);
    if (!std::isfinite(t))
        throw FilterError("event with non-finite timestamp");
    if (t < state_.t - kTimeTolerance)
        throw FilterError("out-of-order event: t=" + std::to_string(t) + " precedes filter time "
                          + std::to_string(state_.t));

    std::visit(
        [this](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, ImuStep>) {
                if (updated_)
                    fresh_contact_ = false;
                state_ = propagate(state_, ev, cfg_.noise, cfg_.constants);
            } else if constexpr (std::is_same_v<T, SurfacePose>) {
                surface_rot_ = ev.rot;
            } else if constexpr (std::is_same_v<T, FkPosition>) {
                if (updateAllowed()) {
                    state_ = update(state_, position_measurement(ev.hp, state_.mean, cfg_.noise), cfg_.epsilon);
                    updated_ = true;
                }
            } else if constexpr (std::is_same_v<T, FkOrientation>) {
                if (cfg_.variant == Variant::Proposed && surface_rot_ && updateAllowed()) {
                    state_ = update(state_,
                                    orientation_measurement(*surface_rot_, ev.foot_rot_in_base, state_.mean,
                                                            cfg_.noise),
                                    cfg_.epsilon);
                    updated_ = true;
                }
            } else if constexpr (std::is_same_v<T, SwapEvent>) {
                state_ = apply_jump(state_, JumpInput{ev.h_d}, cfg_.noise.jump_cov);
                fresh_contact_ = true;
                updated_ = false;
            }
        },
        event);
}

Vec3 rollPitchYaw(const Mat3& R)
{
    const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
    const double roll = std::atan2(R(2, 1), R(2, 2));
    const double yaw = std::atan2(R(1, 0), R(0, 0));
    return Vec3(roll, pitch, yaw);
}

ErrorMetrics error_vs_truth(const State& s, const GroupElement& truth)
{
    constexpr double kDeg = 180.0 / std::numbers::pi;
    ErrorMetrics m;
    m.xi = sek3_log(s.mean * truth.inverse());
    m.pos_err = (s.mean.position() - truth.position()).norm();
    m.vel_err = (s.mean.velocity() - truth.velocity()).norm();
    const Vec3 rpy = rollPitchYaw(s.mean.rot.matrix() * truth.rot.matrix().transpose());
    m.roll_err = rpy.x() * kDeg;
    m.pitch_err = rpy.y() * kDeg;
    m.yaw_err = rpy.z() * kDeg;
    return m;
}

}  // namespace drs
