/**
 * @file liegroup.cpp
 * @brief SO(3) and SE_3(3) group operations.
 */

#include <drs/liegroup.hpp>

#include <algorithm>
#include <cmath>

namespace drs {

Mat3 hat(const Vec3& v)
{
    Mat3 m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

Vec3 vee(const Mat3& m)
{
    return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

double Rotation::orthogonalityError() const
{
    return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

bool Rotation::isValid(double tol) const
{
    return m_.allFinite() && orthogonalityError() <= tol && std::abs(m_.determinant() - 1.0) <= tol;
}

Rotation Rotation::projected() const
{
    Eigen::JacobiSVD<Mat3> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 D = Mat3::Identity();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
        D(2, 2) = -1.0;
    return Rotation(svd.matrixU() * D * svd.matrixV().transpose());
}

namespace {

// Coefficients of phi^ and (phi^)^2 for the Gamma_n series. The closed forms use
// 1 - cos(t) = 2 sin^2(t/2) to avoid cancellation.
struct GammaCoeffs
{
    double a;
    double b;
};

GammaCoeffs gammaCoeffs(double theta, int n)
{
    const double t2 = theta * theta;
    const bool small = theta < kSmallAngle;
    const double s = std::sin(theta);
    const double half = std::sin(0.5 * theta);
    const double one_minus_cos = 2.0 * half * half;
    switch (n) {
    case 0:
        if (small)
            return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0};
        return {s / theta, one_minus_cos / t2};
    case 1:
        if (small)
            return {0.5 - t2 / 24.0 + t2 * t2 / 720.0, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
        return {one_minus_cos / t2, (theta - s) / (t2 * theta)};
    default:
        if (small)
            return {1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
                    1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0};
        return {(theta - s) / (t2 * theta), (t2 - 2.0 * one_minus_cos) / (2.0 * t2 * t2)};
    }
}

}  // namespace

Mat3 so3_gamma(const Vec3& phi, int n)
{
    const double theta = phi.norm();
    const GammaCoeffs c = gammaCoeffs(theta, n);
    const Mat3 K = hat(phi);
    const double lead = n == 0 ? 1.0 : (n == 1 ? 1.0 : 0.5);
    return lead * Mat3::Identity() + c.a * K + c.b * K * K;
}

Rotation so3_exp(const Vec3& phi)
{
    return Rotation(so3_gamma(phi, 0));
}

Mat3 so3_left_jacobian(const Vec3& phi)
{
    return so3_gamma(phi, 1);
}

Mat3 so3_left_jacobian_inverse(const Vec3& phi)
{
    const double theta = phi.norm();
    const double t2 = theta * theta;
    const Mat3 K = hat(phi);
    double c;
    if (theta < kSmallAngle) {
        c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
    } else {
        // (1 + cos t) / (2 t sin t) = cot(t/2) / (2t)
        c = 1.0 / t2 - 1.0 / (2.0 * theta * std::tan(0.5 * theta));
    }
    return Mat3::Identity() - 0.5 * K + c * K * K;
}

Vec3 so3_log(const Rotation& Rot)
{
    const Mat3& R = Rot.matrix();
    const Vec3 w = 0.5 * vee(R - R.transpose());  // sin(theta) * axis
    const double s = w.norm();
    const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
    const double theta = std::atan2(s, c);

    if (theta < kSmallAngle) {
        // theta / sin(theta) series
        const double t2 = theta * theta;
        return (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * w;
    }
    if (c > kNearPiCos)
        return (theta / s) * w;

    // Near pi the skew part vanishes. The symmetric part equals
    // (1 - cos) n n^T + cos I, so the axis is read off its dominant diagonal column.
    const Mat3 B = 0.5 * (R + R.transpose()) - c * Mat3::Identity();
    int i = 0;
    B.diagonal().maxCoeff(&i);
    Vec3 axis = B.col(i) / std::sqrt(B(i, i) * (1.0 - c));
    axis.normalize();
    if (axis.dot(w) < 0.0)
        axis = -axis;
    return theta * axis;
}

GroupElement GroupElement::fromMatrix(const Mat6& m)
{
    GroupElement x;
    x.rot = Rotation(m.topLeftCorner<3, 3>());
    for (int i = 0; i < 3; ++i)
        x.cols[i] = m.block<3, 1>(0, 3 + i);
    return x;
}

Mat6 GroupElement::matrix() const
{
    Mat6 m = Mat6::Identity();
    m.topLeftCorner<3, 3>() = rot.matrix();
    for (int i = 0; i < 3; ++i)
        m.block<3, 1>(0, 3 + i) = cols[i];
    return m;
}

GroupElement GroupElement::inverse() const
{
    GroupElement x;
    x.rot = rot.inverse();
    for (int i = 0; i < 3; ++i)
        x.cols[i] = -(x.rot.matrix() * cols[i]);
    return x;
}

GroupElement GroupElement::operator*(const GroupElement& other) const
{
    GroupElement x;
    x.rot = rot * other.rot;
    for (int i = 0; i < 3; ++i)
        x.cols[i] = rot.matrix() * other.cols[i] + cols[i];
    return x;
}

Vec6 GroupElement::act(const Vec6& x) const
{
    Vec6 out;
    out.head<3>() = rot.matrix() * x.head<3>() + cols[0] * x(3) + cols[1] * x(4) + cols[2] * x(5);
    out.tail<3>() = x.tail<3>();
    return out;
}

void GroupElement::reorthonormalize()
{
    if (rot.orthogonalityError() > kOrthoTolerance)
        rot = rot.projected();
}

GroupElement compose(const GroupElement& a, const GroupElement& b)
{
    return a * b;
}

GroupElement inverse(const GroupElement& x)
{
    return x.inverse();
}

Mat6 wedge(const TangentVec& xi)
{
    Mat6 m = Mat6::Zero();
    m.topLeftCorner<3, 3>() = hat(xi.segment<3>(block::kRot));
    m.block<3, 1>(0, 3) = xi.segment<3>(block::kVel);
    m.block<3, 1>(0, 4) = xi.segment<3>(block::kPos);
    m.block<3, 1>(0, 5) = xi.segment<3>(block::kFoot);
    return m;
}

GroupElement sek3_exp(const TangentVec& xi)
{
    const Vec3 phi = xi.segment<3>(block::kRot);
    const Mat3 J = so3_left_jacobian(phi);
    GroupElement x;
    x.rot = so3_exp(phi);
    for (int i = 0; i < 3; ++i)
        x.cols[i] = J * xi.segment<3>(3 + 3 * i);
    return x;
}

TangentVec sek3_log(const GroupElement& x)
{
    TangentVec xi;
    const Vec3 phi = so3_log(x.rot);
    const Mat3 Jinv = so3_left_jacobian_inverse(phi);
    xi.segment<3>(block::kRot) = phi;
    for (int i = 0; i < 3; ++i)
        xi.segment<3>(3 + 3 * i) = Jinv * x.cols[i];
    return xi;
}

Mat12 adjoint(const GroupElement& x)
{
    const Mat3& R = x.rot.matrix();
    Mat12 ad = Mat12::Zero();
    for (int i = 0; i < 4; ++i)
        ad.block<3, 3>(3 * i, 3 * i) = R;
    for (int i = 0; i < 3; ++i)
        ad.block<3, 3>(3 + 3 * i, 0) = hat(x.cols[i]) * R;
    return ad;
}

}  // namespace drs
