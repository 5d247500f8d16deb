/**
 * @file models.cpp
 * @brief Process and measurement models.
 */

#include <drs/models.hpp>

namespace drs {

bool ImuStep::isFinite() const
{
    return std::isfinite(t) && std::isfinite(dt) && gyro.allFinite() && accel.allFinite()
        && contact_vel.allFinite();
}

Mat12 NoiseParams::defaultJumpCov()
{
    Mat12 q = Mat12::Zero();
    q.block<3, 3>(block::kFoot, block::kFoot) = 1e-4 * Mat3::Identity();
    return q;
}

NoiseParams NoiseParams::zero()
{
    NoiseParams n;
    n.gyro_cov.setZero();
    n.accel_cov.setZero();
    n.contact_vel_cov.setZero();
    n.fk_pos_cov.setZero();
    n.surface_orient_cov.setZero();
    n.jump_cov.setZero();
    return n;
}

Mat12 NoiseParams::processCov() const
{
    Mat12 q = Mat12::Zero();
    q.block<3, 3>(block::kRot, block::kRot) = gyro_cov;
    q.block<3, 3>(block::kVel, block::kVel) = accel_cov;
    q.block<3, 3>(block::kFoot, block::kFoot) = contact_vel_cov;
    return q;
}

Mat6 process_dynamics(const GroupElement& X, const ImuStep& u, const Constants& c)
{
    const Mat3& R = X.rot.matrix();
    Mat6 f = Mat6::Zero();
    f.topLeftCorner<3, 3>() = R * hat(u.gyro);
    f.block<3, 1>(0, 3) = R * u.accel + c.g;
    f.block<3, 1>(0, 4) = X.velocity();
    f.block<3, 1>(0, 5) = u.contact_vel;
    return f;
}

double group_affine_residual(const GroupElement& X1, const GroupElement& X2, const ImuStep& u,
                             const Dynamics& f)
{
    const Mat6 M1 = X1.matrix();
    const Mat6 M2 = X2.matrix();
    const Mat6 r = f(X1 * X2, u) - f(X1, u) * M2 - M1 * f(X2, u) + M1 * f(GroupElement::identity(), u) * M2;
    return r.norm();
}

double group_affine_residual(const GroupElement& X1, const GroupElement& X2, const ImuStep& u)
{
    return group_affine_residual(X1, X2, u,
                                 [](const GroupElement& X, const ImuStep& in) { return process_dynamics(X, in); });
}

Mat12 error_jacobian_A(const Vec3& contact_vel, const Constants& c)
{
    Mat12 A = Mat12::Zero();
    A.block<3, 3>(block::kVel, block::kRot) = hat(c.g);
    A.block<3, 3>(block::kPos, block::kVel) = Mat3::Identity();
    A.block<3, 3>(block::kFoot, block::kRot) = hat(contact_vel);
    return A;
}

Mat6 error_flow(const GroupElement& eta, const ImuStep& u, const Constants& c)
{
    return process_dynamics(eta, u, c) - eta.matrix() * process_dynamics(GroupElement::identity(), u, c);
}

InvariantMeasurement orientation_measurement(const Rotation& surface_rot, const Rotation& foot_rot_in_base,
                                             const GroupElement& estimate, const NoiseParams& noise)
{
    const Vec3 e3 = Vec3::UnitZ();
    InvariantMeasurement m;
    m.Y.head<3>() = foot_rot_in_base * e3;
    m.b.head<3>() = surface_rot * e3;
    m.H.block<3, 3>(0, block::kRot) = hat(m.b.head<3>());
    const Mat3& R = estimate.rot.matrix();
    m.N = R * noise.surface_orient_cov * R.transpose();
    return m;
}

InvariantMeasurement position_measurement(const Vec3& foot_pos_in_base, const GroupElement& estimate,
                                          const NoiseParams& noise)
{
    InvariantMeasurement m;
    m.Y << foot_pos_in_base, 0.0, 1.0, -1.0;
    m.b << Vec3::Zero(), 0.0, 1.0, -1.0;
    m.H.block<3, 3>(0, block::kPos) = -Mat3::Identity();
    m.H.block<3, 3>(0, block::kFoot) = Mat3::Identity();
    const Mat3& R = estimate.rot.matrix();
    m.N = R * noise.fk_pos_cov * R.transpose();
    return m;
}

Vec3 innovation(const InvariantMeasurement& m, const GroupElement& estimate)
{
    return (estimate.act(m.Y) - m.b).head<3>();
}

}  // namespace drs
