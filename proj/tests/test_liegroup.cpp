#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace drs;
using namespace drs::test;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(Hat, IsLinearAndSkew)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = randVec3(rng), b = randVec3(rng);
        const Mat3 H = hat(a);
        EXPECT_EQ((H + H.transpose()).norm(), 0.0);
        EXPECT_LT((hat(2.0 * a - b) - (2.0 * hat(a) - hat(b))).norm(), 1e-15);
        EXPECT_LT((H * b - a.cross(b)).norm(), 1e-14);
        EXPECT_EQ(vee(H), a);
    }
}

TEST(So3, ExpOfZeroIsIdentity)
{
    EXPECT_EQ(so3_exp(Vec3::Zero()).matrix(), Mat3::Identity());
}

TEST(So3, QuarterTurnAboutZ)
{
    const Mat3 R = so3_exp(Vec3(0, 0, kPi / 2)).matrix();
    Mat3 expected;
    expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    EXPECT_LT((R - expected).norm(), 1e-15);
}

TEST(So3, ExpMatchesDenseOracle)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 phi = randVec3(rng, 3.0);
        EXPECT_LT((so3_exp(phi).matrix() - denseExpm<Mat3>(hat(phi))).norm(), 1e-12);
    }
}

TEST(So3, LogRoundTripAcrossAngleRanges)
{
    std::mt19937_64 rng(3);
    for (double angle : {0.0, 1e-9, 1e-7, 1e-6, 1e-5, 1e-3, 0.5, 2.0, 3.0, kPi - 1e-3, kPi - 1e-6}) {
        for (int i = 0; i < 20; ++i) {
            const Vec3 phi = randVec3(rng).normalized() * angle;
            EXPECT_LT((so3_log(so3_exp(phi)) - phi).norm(), 1e-10) << "angle " << angle;
        }
    }
}

TEST(So3, LogAtExactlyPiReturnsValidAxis)
{
    for (const Vec3& axis : {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1).normalized().eval()}) {
        const Rotation R = so3_exp(axis * kPi);
        const Vec3 phi = so3_log(R);
        EXPECT_NEAR(phi.norm(), kPi, 1e-9);
        EXPECT_LT((so3_exp(phi).matrix() - R.matrix()).norm(), 1e-9);
    }
}

TEST(So3, LeftJacobianMatchesFiniteDifference)
{
    // d/dt exp(phi + t delta) exp(phi)^-1 at t = 0 equals hat(J_l(phi) delta).
    std::mt19937_64 rng(4);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const Vec3 phi = randVec3(rng, 2.0);
        const Mat3 J = so3_left_jacobian(phi);
        for (int k = 0; k < 3; ++k) {
            const Vec3 e = Vec3::Unit(k);
            const Mat3 d = (so3_exp(phi + h * e).matrix() - so3_exp(phi - h * e).matrix()) / (2 * h);
            const Vec3 col = vee(d * so3_exp(phi).matrix().transpose());
            EXPECT_LT((col - J.col(k)).norm(), 1e-8);
        }
        EXPECT_LT((J * so3_left_jacobian_inverse(phi) - Mat3::Identity()).norm(), 1e-12);
    }
    EXPECT_EQ(so3_left_jacobian(Vec3::Zero()), Mat3::Identity());
}

TEST(So3, RotationProjectionAndValidity)
{
    std::mt19937_64 rng(5);
    const Mat3 noisy = randRotation(rng).matrix() + 1e-4 * hat(randVec3(rng)) * hat(randVec3(rng));
    const Rotation R(noisy);
    EXPECT_FALSE(R.isValid());
    const Rotation P = R.projected();
    EXPECT_TRUE(P.isValid(1e-12));
    EXPECT_LT(P.orthogonalityError(), 1e-14);
    EXPECT_NEAR(P.matrix().determinant(), 1.0, 1e-14);
}

TEST(Sek3, ExpOfZeroIsIdentity)
{
    EXPECT_EQ(sek3_exp(TangentVec::Zero()).matrix(), Mat6::Identity());
}

TEST(Sek3, PureTranslationTangent)
{
    TangentVec xi = TangentVec::Zero();
    xi.segment<3>(block::kVel) = Vec3(1, 2, 3);
    xi.segment<3>(block::kPos) = Vec3(-1, 0, 4);
    xi.segment<3>(block::kFoot) = Vec3(0.5, 0.5, 0.5);
    const GroupElement X = sek3_exp(xi);
    EXPECT_EQ(X.rot.matrix(), Mat3::Identity());
    EXPECT_EQ(X.velocity(), Vec3(1, 2, 3));
    EXPECT_EQ(X.position(), Vec3(-1, 0, 4));
    EXPECT_EQ(X.foot(), Vec3(0.5, 0.5, 0.5));
}

TEST(Sek3, ExpMatchesDenseMatrixExponential)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 500; ++i) {
        const TangentVec xi = randTangent(rng, 1.0, 3.0);
        const Mat6 oracle = denseExpm<Mat6>(wedge(xi));
        EXPECT_LT((sek3_exp(xi).matrix() - oracle).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Sek3, WedgeIsIndependentOfOracleLayout)
{
    std::mt19937_64 rng(7);
    const TangentVec xi = randTangent(rng);
    EXPECT_EQ(unwedge(wedge(xi)), xi);
}

TEST(Sek3, LogExpRoundTrip)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 1000; ++i) {
        TangentVec xi = randTangent(rng, 1.0, 3.0);
        // Keep the rotation angle inside (0, pi).
        const double angle = std::uniform_real_distribution<double>(0.0, kPi - 1e-3)(rng);
        xi.segment<3>(block::kRot) = xi.segment<3>(block::kRot).normalized() * angle;
        EXPECT_LT((sek3_log(sek3_exp(xi)) - xi).norm(), 1e-10);
    }
    for (double angle : {0.0, 1e-8, 1e-6, 1e-4}) {
        TangentVec xi = randTangent(rng);
        xi.segment<3>(block::kRot) = xi.segment<3>(block::kRot).normalized() * angle;
        EXPECT_LT((sek3_log(sek3_exp(xi)) - xi).norm(), 1e-10) << angle;
    }
}

TEST(Sek3, ExpLogRoundTrip)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const GroupElement X = randElement(rng);
        EXPECT_LT((sek3_exp(sek3_log(X)).matrix() - X.matrix()).norm(), 1e-10);
    }
}

TEST(Adjoint, PureRotationIsBlockDiagonal)
{
    std::mt19937_64 rng(10);
    const Rotation R = randRotation(rng);
    GroupElement X;
    X.rot = R;
    const Mat12 Ad = adjoint(X);
    Mat12 expected = Mat12::Zero();
    for (int b = 0; b < 4; ++b)
        expected.block<3, 3>(3 * b, 3 * b) = R.matrix();
    EXPECT_EQ(Ad, expected);
}

TEST(Adjoint, DefiningIdentity)
{
    // X wedge(xi) X^-1 = wedge(Ad_X xi), both sides on embedded matrices.
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const GroupElement X = randElement(rng);
        const TangentVec xi = randTangent(rng);
        const Mat6 M = embed(X.rot.matrix(), X.velocity(), X.position(), X.foot());
        const Mat6 lhs = M * wedge(xi) * M.inverse();
        EXPECT_LT((lhs - wedge(adjoint(X) * xi)).cwiseAbs().maxCoeff(), 1e-11);
    }
}

TEST(Adjoint, ConjugatesExponential)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        const GroupElement X = randElement(rng);
        const TangentVec xi = randTangent(rng, 0.5, 0.5);
        const GroupElement lhs = X * sek3_exp(xi) * X.inverse();
        EXPECT_LT((lhs.matrix() - sek3_exp(adjoint(X) * xi).matrix()).norm(), 1e-10);
    }
}

TEST(GroupAxioms, OnRandomSamples)
{
    std::mt19937_64 rng(13);
    const GroupElement I = GroupElement::identity();
    for (int i = 0; i < 1000; ++i) {
        const GroupElement a = randElement(rng), b = randElement(rng), c = randElement(rng);
        EXPECT_LT((((a * b) * c).matrix() - (a * (b * c)).matrix()).cwiseAbs().maxCoeff(), 1e-11);
        EXPECT_LT(((a * I).matrix() - a.matrix()).norm(), 1e-15);
        EXPECT_LT(((I * a).matrix() - a.matrix()).norm(), 1e-15);
        EXPECT_LT(((a * a.inverse()).matrix() - Mat6::Identity()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(((a.inverse() * a).matrix() - Mat6::Identity()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(((a * b).matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((compose(a, b).matrix() - (a * b).matrix()).norm(), 1e-15);
        EXPECT_LT((inverse(a).matrix() - a.matrix().inverse()).cwiseAbs().maxCoeff(), 1e-11);
    }
}

TEST(GroupElement, ActionMatchesEmbeddedProduct)
{
    std::mt19937_64 rng(14);
    const GroupElement X = randElement(rng);
    Vec6 y;
    y << randVec3(rng), 0, 1, -1;
    EXPECT_LT((X.act(y) - X.matrix() * y).norm(), 1e-14);
    EXPECT_EQ(GroupElement::fromMatrix(X.matrix()).matrix(), X.matrix());
}

TEST(GroupElement, OrthogonalityDriftBoundedOverLongComposition)
{
    std::mt19937_64 rng(15);
    GroupElement X = GroupElement::identity();
    Rotation R;
    for (int i = 0; i < 100000; ++i) {
        const TangentVec step = randTangent(rng, 0.05, 0.01);
        X = sek3_exp(step) * X;
        X.reorthonormalize();
        R = so3_exp(step.head<3>()) * R;
        if (R.orthogonalityError() > kOrthoTolerance)
            R = R.projected();
        if (i % 3 == 0)
            X = X.inverse();
    }
    EXPECT_LE(X.rot.orthogonalityError(), 1e-9);
    EXPECT_LE(R.orthogonalityError(), 1e-9);
    EXPECT_NEAR(X.rot.matrix().determinant(), 1.0, 1e-9);
}

}  // namespace
