/**
 * @file models.hpp
 * @brief Process model and right-invariant measurement models for walking on a
 * moving rigid surface.
 *
 * Error convention used throughout: eta = X_hat * X^-1 = exp(xi). Measurements
 * have the form Y = X^-1 b + V, the innovation is z = (X_hat Y - b)_{1:3} and,
 * to first order, z = -H xi. The correction is X_hat+ = exp(K z) X_hat.
 */

#pragma once

#include <drs/liegroup.hpp>

#include <functional>

namespace drs {

/// Gravitational acceleration in the world frame (m/s^2).
struct Constants
{
    Vec3 g{0.0, 0.0, -9.81};
};

/// One IMU interval. Inputs are held constant over [t, t + dt].
struct ImuStep
{
    double t = 0.0;
    double dt = 0.0;
    Vec3 gyro = Vec3::Zero();         ///< body frame, rad/s
    Vec3 accel = Vec3::Zero();        ///< body frame specific force, m/s^2
    Vec3 contact_vel = Vec3::Zero();  ///< world-frame velocity of the stance-foot contact, m/s

    bool isFinite() const;
};

/// Continuous-time noise densities and discrete measurement covariances.
struct NoiseParams
{
    Mat3 gyro_cov = 1e-5 * Mat3::Identity();            ///< (rad/s)^2 / Hz
    Mat3 accel_cov = 1e-4 * Mat3::Identity();           ///< (m/s^2)^2 / Hz
    Mat3 contact_vel_cov = 1e-4 * Mat3::Identity();     ///< (m/s)^2 / Hz
    Mat3 fk_pos_cov = 1e-5 * Mat3::Identity();          ///< m^2
    Mat3 surface_orient_cov = 1e-4 * Mat3::Identity();  ///< rad^2
    Mat12 jump_cov = defaultJumpCov();                  ///< right-perturbation covariance at a foot swap

    static Mat12 defaultJumpCov();
    /// All covariances set to zero.
    static NoiseParams zero();

    /// Continuous noise covariance on the tangent space, ordered like TangentVec.
    Mat12 processCov() const;
};

/// Generic right-invariant observation Y = X^-1 b + V.
struct InvariantMeasurement
{
    Vec6 Y = Vec6::Zero();
    Vec6 b = Vec6::Zero();
    Eigen::Matrix<double, 3, 12> H = Eigen::Matrix<double, 3, 12>::Zero();
    Mat3 N = Mat3::Zero();  ///< covariance of the innovation noise, world frame
};

using Dynamics = std::function<Mat6(const GroupElement&, const ImuStep&)>;

/// Deterministic part of d/dt X: top rows [R (w)x, R a + g, v, v_d], zero below.
Mat6 process_dynamics(const GroupElement& X, const ImuStep& u, const Constants& c = {});

/// Frobenius norm of f(X1 X2) - f(X1) X2 - X1 f(X2) + X1 f(Id) X2. Zero for
/// group-affine dynamics.
double group_affine_residual(const GroupElement& X1, const GroupElement& X2, const ImuStep& u,
                             const Dynamics& f);
double group_affine_residual(const GroupElement& X1, const GroupElement& X2, const ImuStep& u);

/// Linearized right-invariant error dynamics d(xi)/dt = A xi.
///
/// A does not depend on the state. Because the contact velocity is a
/// world-frame input, it contributes a (v_d)x coupling from xi_R into xi_d in
/// addition to the gravity (xi_R -> xi_v) and identity (xi_v -> xi_p) blocks.
/// With a zero contact velocity only the latter two remain.
Mat12 error_jacobian_A(const Vec3& contact_vel = Vec3::Zero(), const Constants& c = {});

/// Exact (nonlinear) right-invariant error flow: d(eta)/dt = f(eta) - eta f(Id).
Mat6 error_flow(const GroupElement& eta, const ImuStep& u, const Constants& c = {});

/// Alignment of the stance-foot normal with the surface normal.
/// Y = [bRf e3; 0], b = [R_s e3; 0], H = [hat(R_s e3), 0, 0, 0].
InvariantMeasurement orientation_measurement(const Rotation& surface_rot, const Rotation& foot_rot_in_base,
                                             const GroupElement& estimate, const NoiseParams& noise);

/// Forward-kinematics support-foot position relative to the base, in the base frame.
/// Y = [hp; 0, 1, -1], b = [0; 0, 1, -1] so that X Y = R hp + p - d. H has -I on
/// xi_p and +I on xi_d.
InvariantMeasurement position_measurement(const Vec3& foot_pos_in_base, const GroupElement& estimate,
                                          const NoiseParams& noise);

/// z = (X_hat Y - b)_{1:3}
Vec3 innovation(const InvariantMeasurement& m, const GroupElement& estimate);

}  // namespace drs
