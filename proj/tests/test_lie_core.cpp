#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace liereg {
namespace {

using testing::Rng;

template <class G>
class GroupTyped : public ::testing::Test {};
using AllGroups = ::testing::Types<SO3, SE2, SE3>;
TYPED_TEST_SUITE(GroupTyped, AllGroups);

TEST(GroupTag, DimensionsFollowTag) {
  EXPECT_EQ(SO3::n, 3);
  EXPECT_EQ(SO3::k, 3);
  EXPECT_EQ(SE2::n, 3);
  EXPECT_EQ(SE2::k, 3);
  EXPECT_EQ(SE3::n, 4);
  EXPECT_EQ(SE3::k, 6);
  EXPECT_EQ(parse_group_tag("SE3"), GroupTag::SE3);
  EXPECT_EQ(to_string(GroupTag::SE2), "SE2");
  EXPECT_THROW((void)parse_group_tag("SL3"), ContractError);
}

TEST(Hat, SO3MatchesDisplayedSkewMatrix) {
  Eigen::Matrix3d expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  EXPECT_EQ(hat<SO3>(Eigen::Vector3d(1, 2, 3)).matrix(), expected);
  EXPECT_TRUE(hat<SO3>(Eigen::Vector3d::Zero()).matrix().isZero(0.0));
}

TEST(Hat, SE3RotationFirstOrdering) {
  VecK<SE3> v;
  v << 0, 0, 1, 1, 0, 0;
  const Eigen::Matrix4d m = hat<SE3>(v).matrix();
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected.topLeftCorner<3, 3>() << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  expected(0, 3) = 1.0;
  EXPECT_EQ(m, expected);

  // Pure translation / pure rotation exponentials agree with the series.
  VecK<SE3> trans;
  trans << 0, 0, 0, 1, -2, 0.5;
  Eigen::Matrix4d t_expected = Eigen::Matrix4d::Identity();
  t_expected.topRightCorner<3, 1>() << 1, -2, 0.5;
  EXPECT_TRUE(exp_map(hat<SE3>(trans)).matrix().isApprox(t_expected, 1e-14));
  VecK<SE3> spin;
  spin << 0, 0, std::numbers::pi / 2, 0, 0, 0;
  EXPECT_TRUE(exp_map(hat<SE3>(spin)).matrix().isApprox(
      testing::exp_series(hat<SE3>(spin).matrix()), 1e-13));
}

TEST(Hat, RuntimeLengthChecked) {
  EXPECT_THROW((void)hat_checked<SO3>(Eigen::VectorXd::Zero(4)), ContractError);
  EXPECT_NO_THROW((void)hat_checked<SE3>(Eigen::VectorXd::Zero(6)));
}

TYPED_TEST(GroupTyped, HatVeeRoundTrip) {
  using G = TypeParam;
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const VecK<G> v = rng.algebra_vector<G>();
    EXPECT_EQ(vee(hat<G>(v)), v);
    const AlgebraElement<G> u = hat<G>(v);
    EXPECT_EQ(hat<G>(vee(u)).matrix(), u.matrix());
  }
  EXPECT_TRUE(vee(AlgebraElement<G>::zero()).isZero(0.0));
}

TEST(Vee, RejectsNonAlgebraInput) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 1) = 1.0;  // not skew
  EXPECT_THROW((void)vee<SO3>(m), ContractError);
  Eigen::Matrix4d se3 = hat<SE3>(VecK<SE3>::Ones()).matrix();
  se3(3, 0) = 1e-3;
  EXPECT_THROW((void)vee<SE3>(se3), ContractError);
}

TYPED_TEST(GroupTyped, HatMatchesHandBasis) {
  using G = TypeParam;
  const auto basis = testing::algebra_basis<G>();
  for (int i = 0; i < G::k; ++i) {
    EXPECT_EQ(hat<G>(VecK<G>::Unit(i)).matrix(), basis[static_cast<std::size_t>(i)]);
  }
}

TEST(GroupElement, MembershipChecks) {
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(2, 2) = -1.0;
  EXPECT_THROW(GroupElement<SO3>{reflect}, ContractError);
  EXPECT_THROW(GroupElement<SO3>{Eigen::Matrix3d(2.0 * Eigen::Matrix3d::Identity())},
               ContractError);
  Eigen::Matrix3d se2 = Eigen::Matrix3d::Identity();
  se2(2, 0) = 1e-12;  // bottom row must be exact
  EXPECT_THROW(GroupElement<SE2>{se2}, ContractError);
  Eigen::Matrix3d nearly = Eigen::Matrix3d::Identity();
  nearly(0, 1) = 1e-11;
  EXPECT_NO_THROW(GroupElement<SO3>{nearly});
}

TYPED_TEST(GroupTyped, InverseAndProduct) {
  using G = TypeParam;
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const GroupElement<G> x = rng.element<G>();
    EXPECT_TRUE((x * x.inverse()).matrix().isApprox(MatN<G>::Identity(), 1e-13));
    EXPECT_TRUE(x.inverse().matrix().isApprox(x.matrix().inverse(), 1e-12));
  }
}

TYPED_TEST(GroupTyped, AdjointProperties) {
  using G = TypeParam;
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const GroupElement<G> x = rng.element<G>();
    const AlgebraElement<G> u = hat<G>(rng.algebra_vector<G>());
    EXPECT_EQ(adjoint(GroupElement<G>::identity(), u).matrix(), u.matrix());
    const AlgebraElement<G> ad = adjoint(x, u);  // re-checked by construction
    EXPECT_TRUE(ad.matrix().isApprox(x.matrix() * u.matrix() * x.matrix().inverse(), 1e-12));
    EXPECT_TRUE(adjoint(x.inverse(), ad).matrix().isApprox(u.matrix(), 1e-12));
  }
}

TEST(Adjoint, SO3RotatesVector) {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Matrix3d r = rng.rotation();
    const Eigen::Vector3d w = rng.gaussian<3, 1>();
    const Eigen::Vector3d got = vee(adjoint(GroupElement<SO3>(r), hat<SO3>(w)));
    EXPECT_LT((got - r * w).norm(), 1e-13);
  }
}

TEST(Projection, SO3Examples) {
  Rng rng(15);
  const Eigen::Matrix3d a = rng.gaussian<3, 3>();
  EXPECT_LT(proj_algebra<SO3>(Eigen::Matrix3d(a + a.transpose())).matrix().norm(), 1e-15);
  const Eigen::Matrix3d e12 = Eigen::Vector3d::UnitX() * Eigen::Vector3d::UnitY().transpose();
  const Eigen::Matrix3d expected = 0.5 * (e12 - e12.transpose());
  EXPECT_LT((proj_algebra<SO3>(e12).matrix() - expected).norm(), 1e-15);
  EXPECT_LT((testing::projection_oracle<SO3>(e12) - expected).norm(), 1e-15);
}

TEST(Projection, SE3ZeroesBottomRowKeepsTranslation) {
  Rng rng(16);
  const Eigen::Matrix4d a = rng.gaussian<4, 4>();
  const Eigen::Matrix4d p = proj_algebra<SE3>(a).matrix();
  EXPECT_TRUE(p.bottomRows<1>().isZero(0.0));
  EXPECT_EQ(Eigen::Vector3d(p.topRightCorner<3, 1>()), Eigen::Vector3d(a.topRightCorner<3, 1>()));
  const Eigen::Matrix3d rot = a.topLeftCorner<3, 3>();
  EXPECT_LT((Eigen::Matrix3d(p.topLeftCorner<3, 3>()) - 0.5 * (rot - rot.transpose())).norm(),
            1e-15);
  EXPECT_LT((p - testing::projection_oracle<SE3>(a)).norm(), 1e-13);
}

TYPED_TEST(GroupTyped, ProjectionOrthogonalAndIdempotent) {
  using G = TypeParam;
  Rng rng(17);
  const auto basis = testing::algebra_basis<G>();
  for (int trial = 0; trial < 100; ++trial) {
    const MatN<G> a = rng.gaussian<G::n, G::n>();
    const MatN<G> p = proj_algebra<G>(a).matrix();
    EXPECT_LT((p - testing::projection_oracle<G>(a)).norm(), 1e-12);
    for (const auto& e : basis) {
      EXPECT_LE(std::abs((e.transpose() * (a - p)).trace()), 1e-12);
    }
    EXPECT_LE((proj_algebra<G>(p).matrix() - p).norm(), 1e-14);
    // The dynamic-size overload agrees.
    EXPECT_EQ(proj_algebra<G>(Eigen::MatrixXd(a)).matrix(), p);
  }
  EXPECT_THROW((void)proj_algebra<G>(Eigen::MatrixXd(Eigen::MatrixXd::Zero(G::n + 1, G::n + 1))),
               ContractError);
}

TYPED_TEST(GroupTyped, DuplicationAndQForm) {
  using G = TypeParam;
  const Duplication<G> dq = duplication_Q<G>();
  EXPECT_TRUE(dq.Q.isApprox(dq.Q.transpose()));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, G::k, G::k>> eig(dq.Q);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  Rng rng(18);
  for (int i = 0; i < 100; ++i) {
    const VecK<G> u = rng.algebra_vector<G>();
    const VecK<G> v = rng.algebra_vector<G>();
    EXPECT_LT((vec(hat<G>(v).matrix()) - dq.D * v).norm(), 1e-15);
    const double tr = (hat<G>(u).matrix().transpose() * hat<G>(v).matrix()).trace();
    EXPECT_NEAR(tr, u.dot(dq.Q * v), 1e-12 * (1.0 + std::abs(tr)));
  }
}

TEST(Duplication, KnownMetrics) {
  EXPECT_EQ(duplication_Q<SO3>().Q, Eigen::Matrix3d(2.0 * Eigen::Matrix3d::Identity()));
  EXPECT_EQ(duplication_Q<SE2>().Q, Eigen::Matrix3d(Eigen::Vector3d(2, 1, 1).asDiagonal()));
  Eigen::Matrix<double, 6, 1> d;
  d << 2, 2, 2, 1, 1, 1;
  EXPECT_EQ(duplication_Q<SE3>().Q, (Eigen::Matrix<double, 6, 6>(d.asDiagonal())));
}

TEST(ExpMap, QuarterTurnAboutZ) {
  const Eigen::Matrix3d r = exp_map(hat<SO3>(Eigen::Vector3d(0, 0, std::numbers::pi / 2))).matrix();
  Eigen::Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_LT((r - expected).norm(), 1e-15);
  EXPECT_LT((r - testing::exp_series(Eigen::Matrix3d(hat<SO3>(Eigen::Vector3d(0, 0, std::numbers::pi / 2)).matrix()))).norm(), 1e-14);
}

TYPED_TEST(GroupTyped, ExpMatchesSeriesAndInverts) {
  using G = TypeParam;
  Rng rng(19);
  EXPECT_EQ(exp_map(AlgebraElement<G>::zero()).matrix(), MatN<G>::Identity());
  for (int i = 0; i < 100; ++i) {
    VecK<G> v = rng.algebra_vector<G>();
    // Rotation part with norm up to pi, translation unrestricted.
    const double scale = rng.uniform(0.0, std::numbers::pi);
    if constexpr (G::tag == GroupTag::SE2) {
      v(0) = scale * (v(0) >= 0 ? 1 : -1);
    } else {
      v.template head<3>() = v.template head<3>().normalized() * scale;
    }
    const MatN<G> x = exp_map(hat<G>(v)).matrix();
    EXPECT_LT((x - testing::exp_series(hat<G>(v).matrix())).norm(), 1e-12);
    EXPECT_LE(detail::orthogonality_defect<G>(x), kGroupTolerance);
    const MatN<G> back = (exp_map(hat<G>(v)) * exp_map(hat<G>(VecK<G>(-v)))).matrix();
    EXPECT_LT((back - MatN<G>::Identity()).norm(), 1e-12);
  }
}

TYPED_TEST(GroupTyped, ExpSmallAngleBranches) {
  using G = TypeParam;
  Rng rng(20);
  for (const double eps : {1e-3, 1e-6, 1e-9, 1e-12}) {
    const VecK<G> v = eps * rng.algebra_vector<G>();
    const MatN<G> x = exp_map(hat<G>(v)).matrix();
    const MatN<G> ref = testing::exp_series(hat<G>(v).matrix());
    EXPECT_LT((x - ref).norm(), 1e-15 + 1e-14 * eps);
  }
}

TEST(Retract, IdempotentOnGroup) {
  Rng rng(21);
  const Eigen::Matrix3d r = rng.rotation();
  EXPECT_LT((retract<SO3>(r).matrix() - r).norm(), 1e-15);
}

TEST(Retract, MatchesNewtonPolarFactor) {
  Rng rng(22);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Matrix3d r = rng.rotation();
    const Eigen::Matrix3d perturbed = r + 1e-6 * rng.gaussian<3, 3>();
    const Eigen::Matrix3d out = retract<SO3>(perturbed).matrix();
    EXPECT_LT((out.transpose() * out - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_LT((out - testing::polar_newton(perturbed)).norm(), 1e-12);
  }
}

TEST(Retract, SE3ResetsBottomRow) {
  Rng rng(23);
  Eigen::Matrix4d m = rng.element<SE3>().matrix();
  m.topLeftCorner<3, 3>() += 1e-7 * rng.gaussian<3, 3>();
  m(3, 1) = 1e-9;
  const Eigen::Matrix4d out = retract<SE3>(m).matrix();
  EXPECT_EQ(Eigen::Vector4d(out.row(3)), Eigen::Vector4d(0, 0, 0, 1));
  EXPECT_EQ(Eigen::Vector3d(out.topRightCorner<3, 1>()), Eigen::Vector3d(m.topRightCorner<3, 1>()));
}

TEST(Retract, Errors) {
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(0, 0) = -1.0;
  EXPECT_THROW((void)retract<SO3>(reflect), ContractError);
  EXPECT_THROW((void)retract<SO3>(Eigen::Matrix3d::Zero()), ContractError);
  EXPECT_THROW((void)retract<SO3>(Eigen::Matrix3d(1.1 * Eigen::Matrix3d::Identity())),
               ContractError);
  Eigen::Matrix3d nan = Eigen::Matrix3d::Identity();
  nan(0, 0) = NAN;
  EXPECT_THROW((void)retract<SO3>(nan), ContractError);
}

TEST(Geometry, RotationAngleAndEuler) {
  EXPECT_NEAR(rotation_angle(rotation_zyx(0.7, 0, 0)), 0.7, 1e-15);
  EXPECT_NEAR(rotation_angle(rotation_zyx(std::numbers::pi, 0, 0)), std::numbers::pi, 1e-15);
  // Z-Y-X intrinsic equals the product of elementary exponentials.
  const Eigen::Matrix3d expected =
      exp_map(hat<SO3>(Eigen::Vector3d(0, 0, 0.3))).matrix() *
      exp_map(hat<SO3>(Eigen::Vector3d(0, -0.2, 0))).matrix() *
      exp_map(hat<SO3>(Eigen::Vector3d(1.1, 0, 0))).matrix();
  EXPECT_LT((rotation_zyx(0.3, -0.2, 1.1) - expected).norm(), 1e-15);
  Rng rng(24);
  const GroupElement<SO3> a(rng.rotation());
  EXPECT_NEAR(geodesic_distance(a, a), 0.0, 1e-7);
}

}  // namespace
}  // namespace liereg
