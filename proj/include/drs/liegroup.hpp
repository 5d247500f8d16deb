/**
 * @file liegroup.hpp
 * @brief SO(3) and SE_3(3) group operations.
 *
 * The SE_3(3) element stores a rotation R and three column vectors
 * (v, p, d). Its embedding is the 6x6 matrix
 *
 *     [ R  v  p  d ]
 *     [ 0  1  0  0 ]
 *     [ 0  0  1  0 ]
 *     [ 0  0  0  1 ]
 *
 * Tangent vectors are 12-vectors ordered (xi_R, xi_v, xi_p, xi_d). Every
 * Jacobian, covariance and noise matrix in the library uses this order.
 */

#pragma once

#include <Eigen/Dense>

#include <array>

namespace drs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using TangentVec = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

/// Offsets of the 3-blocks inside a TangentVec.
namespace block {
inline constexpr int kRot = 0;
inline constexpr int kVel = 3;
inline constexpr int kPos = 6;
inline constexpr int kFoot = 9;
}  // namespace block

/// Below this angle (rad) exp/log/Jacobians switch to 4th-order series.
inline constexpr double kSmallAngle = 1e-6;

/// so3_log uses the symmetric-part axis extraction once cos(angle) drops below this.
inline constexpr double kNearPiCos = -0.9;

/// Orthogonality error (Frobenius norm of R^T R - I) that triggers re-projection.
inline constexpr double kOrthoTolerance = 1e-9;

Mat3 hat(const Vec3& v);
Vec3 vee(const Mat3& m);

/// Rotation matrix wrapper. Construction does not check validity; use
/// isValid() where the input is untrusted.
class Rotation
{
public:
    Rotation() : m_(Mat3::Identity()) {}
    explicit Rotation(const Mat3& m) : m_(m) {}

    static Rotation identity() { return Rotation(); }

    const Mat3& matrix() const { return m_; }
    Rotation inverse() const { return Rotation(m_.transpose()); }
    Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }
    Vec3 operator*(const Vec3& v) const { return m_ * v; }

    /// Frobenius norm of R^T R - I.
    double orthogonalityError() const;
    bool isValid(double tol = 1e-9) const;

    /// Nearest rotation in the Frobenius sense (polar decomposition via SVD).
    Rotation projected() const;

private:
    Mat3 m_;
};

Rotation so3_exp(const Vec3& phi);
/// Angle-axis vector with angle in [0, pi].
Vec3 so3_log(const Rotation& R);

/// Left Jacobian of SO(3) and its inverse.
Mat3 so3_left_jacobian(const Vec3& phi);
Mat3 so3_left_jacobian_inverse(const Vec3& phi);

/// Gamma_n(phi) = sum_k (phi^)^k / (k + n)!, n in {0, 1, 2}. Gamma_0 is exp,
/// Gamma_1 the left Jacobian; both appear in closed-form strapdown integration.
Mat3 so3_gamma(const Vec3& phi, int n);

/// Element of SE_3(3): rotation plus velocity, base position and support-foot position.
struct GroupElement
{
    Rotation rot;
    std::array<Vec3, 3> cols{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

    static GroupElement identity() { return {}; }
    static GroupElement fromParts(const Rotation& R, const Vec3& v, const Vec3& p, const Vec3& d)
    {
        return GroupElement{R, {v, p, d}};
    }
    static GroupElement fromMatrix(const Mat6& m);

    const Vec3& velocity() const { return cols[0]; }
    const Vec3& position() const { return cols[1]; }
    const Vec3& foot() const { return cols[2]; }
    Vec3& velocity() { return cols[0]; }
    Vec3& position() { return cols[1]; }
    Vec3& foot() { return cols[2]; }

    Mat6 matrix() const;
    GroupElement inverse() const;
    GroupElement operator*(const GroupElement& other) const;

    /// Acts on a 6-vector [x; c] as the embedded matrix does.
    Vec6 act(const Vec6& x) const;

    /// Re-projects the rotation block if its orthogonality error exceeds kOrthoTolerance.
    void reorthonormalize();
};

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& x);

/// xi^ as an embedded 6x6 Lie-algebra matrix.
Mat6 wedge(const TangentVec& xi);

GroupElement sek3_exp(const TangentVec& xi);
TangentVec sek3_log(const GroupElement& x);

/// Adjoint representation: X xi^ X^-1 = (Ad_X xi)^.
Mat12 adjoint(const GroupElement& x);

}  // namespace drs
