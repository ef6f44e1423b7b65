#include "liereg/exosystem.hpp"
#include "liereg/integrator.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <array>
#include <numbers>

namespace liereg {
namespace {

using testing::Rng;

const std::array<double, 3> kAmps = {1.0, 2.0, 3.0};
const std::array<double, 3> kFreqs = {1.0, 5.0, 7.0};

TEST(ExoParams, Validation) {
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
  s(0, 1) = 1.0;
  s(1, 0) = -1.0;
  EXPECT_NO_THROW((ExoParams<SO3>(c, s)));
  s(1, 0) = -1.0 + 1e-15;  // the skew check is exact
  try {
    ExoParams<SO3> p(c, s);
    FAIL() << "expected a skewness error";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("skewness"), std::string::npos);
  }
  EXPECT_THROW((ExoParams<SO3>(Eigen::MatrixXd::Identity(2, 3), Eigen::MatrixXd::Zero(3, 3))),
               ContractError);  // C needs k rows
  EXPECT_THROW((ExoParams<SO3>(Eigen::MatrixXd::Identity(3, 2), Eigen::MatrixXd::Zero(2, 2))),
               ContractError);  // m >= kappa
  EXPECT_THROW((ExoParams<SO3>(Eigen::MatrixXd::Identity(3, 4), Eigen::MatrixXd::Zero(3, 3))),
               ContractError);  // C columns = m
  EXPECT_THROW((ExoParams<SE3>(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 3))),
               ContractError);  // SE3 has k = 6
}

TEST(ExoVelocity, Examples) {
  const ExoParams<SO3> p(Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Zero(3, 3));
  EXPECT_TRUE(exo_velocity(p, ExoVector::Zero(3)).matrix().isZero(0.0));
  EXPECT_EQ(exo_velocity(p, ExoVector(Eigen::Vector3d(1, 0, 0))).matrix(),
            hat<SO3>(Eigen::Vector3d(1, 0, 0)).matrix());

  const ExoSetup<SO3> h = harmonic_exo<SO3>(kAmps, kFreqs);
  EXPECT_EQ(exo_velocity(h.params, h.w0).matrix(), hat<SO3>(Eigen::Vector3d(1, 2, 3)).matrix());
}

TEST(ExoVectorField, LeftMultipliedAndStationaryAtRest) {
  Rng rng(31);
  const ExoSetup<SO3> h = harmonic_exo<SO3>(kAmps, kFreqs);
  const GroupElement<SO3> xd(rng.rotation());
  const ExoRates<SO3> zero = exo_vector_field(h.params, ExoState<SO3>{xd, ExoVector::Zero(6)});
  EXPECT_TRUE(zero.pose_rate.isZero(0.0));
  EXPECT_TRUE(zero.w_rate.isZero(0.0));
  const ExoRates<SO3> r = exo_vector_field(h.params, ExoState<SO3>{xd, h.w0});
  EXPECT_LT((r.pose_rate - hat<SO3>(Eigen::Vector3d(1, 2, 3)).matrix() * xd.matrix()).norm(), 1e-15);
  EXPECT_EQ(r.w_rate, ExoVector(h.params.S() * h.w0));
}

TEST(HarmonicExo, Structure) {
  const ExoSetup<SO3> h = harmonic_exo<SO3>(kAmps, kFreqs);
  EXPECT_EQ(h.params.m(), 6);
  EXPECT_TRUE((h.params.S() + h.params.S().transpose()).isZero(0.0));
  ExoVector w0(6);
  w0 << 1, 0, 2, 0, 3, 0;
  EXPECT_EQ(h.w0, w0);
  const std::array<double, 1> bad = {0.0};
  const std::array<double, 3> zero_freq = {1.0, 0.0, 1.0};
  EXPECT_THROW((void)harmonic_exo<SO3>(kAmps, zero_freq), ContractError);
  EXPECT_THROW((void)harmonic_exo<SO3>(bad, bad), ContractError);
}

// Closed-form oscillator: C w(t) = (a_j cos(omega_j t))_j.
TEST(HarmonicExo, ClosedFormSolution) {
  const ExoSetup<SO3> h = harmonic_exo<SO3>(kAmps, kFreqs);
  using State = HybridState<SO3, 1, 1>;
  State s{{GroupElement<SO3>::identity()}, {Side::left}, {h.w0}};
  const auto rhs = [&](double, const State& x) {
    HybridRate<SO3, 1, 1> k;
    k.algebra[0] = exo_velocity(h.params, x.vectors[0]).matrix();
    k.vectors[0] = h.params.S() * x.vectors[0];
    return k;
  };
  double worst = 0.0;
  integrate(s, rhs, 2.0, StepConfig{1e-3, Method::rkmk4, 100}, [&](long long, double t, const State& x) {
    const Eigen::Vector3d cw = h.params.C() * x.vectors[0];
    const Eigen::Vector3d ref(std::cos(t), 2 * std::cos(5 * t), 3 * std::cos(7 * t));
    worst = std::max(worst, (cw - ref).norm());
    return true;
  });
  EXPECT_LT(worst, 1e-9);
}

TEST(HarmonicExo, SingleAxisQuarterPeriod) {
  // a = 1, omega = 2 at t = pi/4: cos(pi/2) = 0. Exact flow of the block.
  const std::array<double, 3> a = {1.0, 0.0, 0.0};
  const std::array<double, 3> w = {2.0, 1.0, 1.0};
  const ExoSetup<SO3> h = harmonic_exo<SO3>(a, w);
  const double t = std::numbers::pi / 4;
  const Eigen::MatrixXd flow = testing::exp_series(Eigen::MatrixXd(h.params.S() * t), 60);
  const Eigen::VectorXd wt = flow * Eigen::VectorXd(h.w0);
  EXPECT_NEAR((h.params.C() * wt)(0), 0.0, 1e-15);
}

TEST(ConstantVelocityExo, StaysConstant) {
  const ExoSetup<SE2> e = constant_velocity_exo<SE2>(Eigen::Vector3d(0.3, 1.0, -0.5));
  EXPECT_TRUE(e.params.S().isZero(0.0));
  EXPECT_EQ(exo_velocity(e.params, e.w0).matrix(), hat<SE2>(Eigen::Vector3d(0.3, 1.0, -0.5)).matrix());
}

template <MatrixGroup G>
HybridState<G, 1, 1> propagate(const ExoSetup<G>& e, const GroupElement<G>& x0, double t_end,
                               double* max_defect = nullptr, double* norm_drift = nullptr) {
  using State = HybridState<G, 1, 1>;
  State s{{x0}, {Side::left}, {e.w0}};
  const auto rhs = [&](double, const State& x) {
    HybridRate<G, 1, 1> k;
    k.algebra[0] = exo_velocity(e.params, x.vectors[0]).matrix();
    k.vectors[0] = e.params.S() * x.vectors[0];
    return k;
  };
  const double n0 = e.w0.norm();
  return integrate(s, rhs, t_end, StepConfig{}, [&](long long, double, const State& x) {
    if (max_defect) *max_defect = std::max(*max_defect, x.groups[0].orthogonality_defect());
    if (norm_drift) *norm_drift = std::max(*norm_drift, std::abs(x.vectors[0].norm() - n0));
    return true;
  });
}

TEST(ExoInvariants, NormConservation) {
  const ExoSetup<SO3> h = harmonic_exo<SO3>(kAmps, kFreqs);
  double drift = 0.0;
  (void)propagate(h, GroupElement<SO3>::identity(), 10.0, nullptr, &drift);
  EXPECT_LE(drift, 1e-9);
}

TEST(ExoInvariants, GroupMembershipOver300Seconds) {
  const ExoSetup<SO3> h = harmonic_exo<SO3>(kAmps, kFreqs);
  double defect = 0.0;
  (void)propagate(h, GroupElement<SO3>(rotation_zyx(std::numbers::pi, std::numbers::pi / 4,
                                                    std::numbers::pi / 4)),
                  300.0, &defect);
  EXPECT_LE(defect, kGroupTolerance);
}

TEST(ExoInvariants, RightInvariance) {
  Rng rng(32);
  VecK<SE3> v;
  v << 0.3, -0.2, 0.5, 1.0, 0.0, -0.4;
  const ExoSetup<SE3> e = constant_velocity_exo<SE3>(v);
  const GroupElement<SE3> a = rng.element<SE3>();
  const GroupElement<SE3> b = rng.element<SE3>();
  const auto xa = propagate(e, a, 5.0).groups[0];
  const auto xb = propagate(e, b, 5.0).groups[0];
  EXPECT_LT(((xa * a.inverse()).matrix() - (xb * b.inverse()).matrix()).norm(), 1e-10);
}

}  // namespace
}  // namespace liereg
