// SPDX-License-Identifier: Apache-2.0
//
// SO(3) specialization: kinematic attitude regulator in cross-product form,
// rigid-body dynamics, the backstepping torque law, and the equilibrium /
// linearization analysis of the closed loop.

#ifndef LIEREG_SO3_HPP
#define LIEREG_SO3_HPP

#include "liereg/exosystem.hpp"
#include "liereg/lie_core.hpp"
#include "liereg/regulator.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace liereg::so3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rotation = GroupElement<SO3>;
using Measurements = MeasurementMatrix<SO3>;

[[nodiscard]] inline Mat3 skew(const Vec3& v) { return detail::skew3(v); }

namespace detail {

// sum_i e_i x y_i^r
[[nodiscard]] inline Vec3 error_cross_sum(const Measurements& e, const Measurements& yr) {
  Vec3 s = Vec3::Zero();
  for (Eigen::Index i = 0; i < e.cols(); ++i) s += e.col(i).cross(yr.col(i));
  return s;
}

}  // namespace detail

struct KinematicControl {
  Vec3 omega_c;  // body angular velocity command
  AlgebraElement<SO3> beta;
};

/// Cross-product form of the general regulator on SO(3):
///   Omega_c = R^T C delta + (kp/2) sum e_i x y_i^r
///   beta    = hat((kI/2) R sum e_i x y_i^r)
[[nodiscard]] inline KinematicControl kinematic_control(const Rotation& r, const Measurements& y,
                                                        const MeasurementSet<SO3>& ms,
                                                        const RegulatorGains& gains,
                                                        const RegulatorState& state,
                                                        const ExoParams<SO3>& exo) {
  const Measurements e = ms.references() - y;
  const Vec3 s = detail::error_cross_sum(e, ms.references());
  const Vec3 d = exo.C() * state.delta;
  const Vec3 omega_c = r.matrix().transpose() * d + 0.5 * gains.kp * s;
  return {omega_c, hat<SO3>(Vec3(0.5 * gains.ki * r.matrix() * s))};
}

/// Symmetric positive-definite inertia matrix with its inverse.
class Inertia {
 public:
  explicit Inertia(const Mat3& j) : j_(j) {
    if (!j.allFinite()) throw ContractError("inertia: non-finite entries");
    if ((j - j.transpose()).norm() > 1e-12 * std::max(1.0, j.norm())) {
      throw ContractError("inertia check failed: J must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(j);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw ContractError("inertia check failed: J must be positive definite");
    }
    inv_ = j.inverse();
  }

  [[nodiscard]] const Mat3& matrix() const { return j_; }
  [[nodiscard]] const Mat3& inverse() const { return inv_; }

 private:
  Mat3 j_;
  Mat3 inv_;
};

struct RigidBodyState {
  Rotation attitude;
  Vec3 omega;  // body frame
};

struct RigidBodyRates {
  Mat3 attitude_rate;
  Vec3 omega_rate;
};

/// dR/dt = R hat(Omega),  J dOmega/dt = -Omega x J Omega + Gamma.
[[nodiscard]] inline RigidBodyRates rigid_body_rhs(const Inertia& j, const RigidBodyState& body,
                                                   const Vec3& torque) {
  const Vec3 momentum = j.matrix() * body.omega;
  return {body.attitude.matrix() * skew(body.omega),
          j.inverse() * (-body.omega.cross(momentum) + torque)};
}

struct BackstepGains {
  double kp;
  double ki;
  double kd;

  [[nodiscard]] RegulatorGains regulator() const { return {kp, ki}; }

  void validate() const {
    regulator().validate();
    if (!(kd > 0.0) || !std::isfinite(kd)) throw ContractError("gains: kD must be positive");
  }
};

/// Coefficients of the backstepping torque law.
///
/// `consistent` uses the coefficients for which the closed-loop energy
/// L_bs = L + 1/2 Omega~^T J Omega~ satisfies
///   dL_bs/dt = -(kp/4) |sum_i (R_e y_i^r x y_i^r)_x|^2 - kD |Omega~|^2.
/// `doubled` puts 2 and kp on the cross-product and curvature terms (twice
/// the consistent values); it still regulates but the energy identity above
/// does not hold exactly.
enum class BackstepLaw { consistent, doubled };

struct BackstepOutput {
  Vec3 torque;
  AlgebraElement<SO3> beta;
  Vec3 omega_tilde;
  Vec3 omega_c;
  ExoVector delta_rate;
};

/// Torque law for the fully actuated rigid body. Evaluation order:
/// e -> Omega_c -> Omega~ -> beta -> ddelta -> dDelta -> Gamma, so the
/// dependence of Gamma on ddelta needs no implicit solve.
[[nodiscard]] inline BackstepOutput backstep_torque(const Inertia& j, const RigidBodyState& body,
                                                    const Measurements& y,
                                                    const MeasurementSet<SO3>& ms,
                                                    const BackstepGains& gains,
                                                    const RegulatorState& state,
                                                    const ExoParams<SO3>& exo,
                                                    BackstepLaw law = BackstepLaw::consistent) {
  const Mat3& r = body.attitude.matrix();
  const Mat3& jm = j.matrix();
  const Measurements& yr = ms.references();
  const Measurements e = yr - y;

  const Vec3 s = detail::error_cross_sum(e, yr);
  const Vec3 alpha = 0.5 * gains.kp * s;
  const Vec3 d = exo.C() * state.delta;
  const Vec3 omega_c = r.transpose() * d + alpha;
  const Vec3 omega_tilde = body.omega - omega_c;

  // sum_i hat(y_i^r) hat(y_i) and sum_i hat(y_i) hat(y_i^r)
  Mat3 curvature = Mat3::Zero();
  Mat3 curvature_t = Mat3::Zero();
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    const Mat3 yh = skew(y.col(i));
    const Mat3 yrh = skew(yr.col(i));
    curvature += yrh * yh;
    curvature_t += yh * yrh;
  }

  const bool doubled = law == BackstepLaw::doubled;
  const double cross_gain = doubled ? 2.0 : 1.0;
  const double curv_gain = doubled ? gains.kp : 0.5 * gains.kp;

  const Vec3 beta_vec =
      0.5 * gains.ki * (r * s + curv_gain * r * curvature_t * jm.transpose() * omega_tilde);
  const AlgebraElement<SO3> beta = hat<SO3>(beta_vec);
  ExoVector delta_rate = internal_model_rate<SO3>(state, beta, exo);
  const Vec3 d_rate = exo.C() * delta_rate;

  const Vec3& w = body.omega;
  const Vec3 torque = w.cross(jm * w) - jm * w.cross(r.transpose() * d) +
                      jm * r.transpose() * d_rate + cross_gain * s +
                      curv_gain * jm * curvature * (omega_tilde + alpha) - gains.kd * omega_tilde;
  return {torque, beta, omega_tilde, omega_c, std::move(delta_rate)};
}

/// -(kp/4) |sum_i hat(E_r y_i^r x y_i^r)|_F^2 - kD |Omega~|^2.
[[nodiscard]] inline double backstep_energy_rate(const Rotation& er, const MeasurementSet<SO3>& ms,
                                                 const BackstepGains& gains,
                                                 const Vec3& omega_tilde) {
  const Measurements& yr = ms.references();
  Mat3 sum = Mat3::Zero();
  for (Eigen::Index i = 0; i < yr.cols(); ++i) {
    const Vec3 yi = er.matrix() * yr.col(i);
    sum += skew(yi.cross(yr.col(i)));
  }
  return -0.25 * gains.kp * sum.squaredNorm() - gains.kd * omega_tilde.squaredNorm();
}

/// Closed-form eigenvalues of Upsilon_j for j = 2, 3, 4 given the ascending
/// eigenvalues of Y.
[[nodiscard]] inline Vec3 upsilon_spectrum_closed_form(const Vec3& lambda, int j) {
  const double l1 = lambda(0), l2 = lambda(1), l3 = lambda(2);
  switch (j) {
    case 2: return {l2 + l3, l3 - l1, l2 - l1};
    case 3: return {l3 - l2, l3 + l1, l1 - l2};
    case 4: return {l2 - l3, l1 - l3, l1 + l2};
    default: throw ContractError("upsilon spectrum: j must be 2, 3 or 4");
  }
}

struct EquilibriumReport {
  Mat3 Y;
  Vec3 lambda;   // ascending
  Mat3 u;        // columns: eigenvectors matching lambda
  std::array<Mat3, 4> equilibria;  // R*_{e1..e4}
  std::array<Mat3, 3> upsilon;     // Upsilon_{2..4}
  std::array<Vec3, 3> upsilon_eigenvalues;  // numerically computed, ascending
  bool repeated_eigenvalues;
  double min_eigen_gap;

  [[nodiscard]] const Mat3& equilibrium(int j) const {
    if (j < 1 || j > 4) throw ContractError("equilibrium index must be 1..4");
    return equilibria[static_cast<std::size_t>(j - 1)];
  }
  [[nodiscard]] const Mat3& upsilon_matrix(int j) const {
    if (j < 2 || j > 4) throw ContractError("Upsilon index must be 2..4");
    return upsilon[static_cast<std::size_t>(j - 2)];
  }
};

inline constexpr double kEigenGapTolerance = 1e-9;

/// Y = (kp/2) sum y_i^r y_i^r^T, its eigen-decomposition, the four
/// equilibria R* Y = Y R*^T and the linearization matrices
/// Upsilon_j = (kp/2) sum R*_j hat(y_i^r) R*_j hat(y_i^r).
[[nodiscard]] inline EquilibriumReport classify_equilibria(const MeasurementSet<SO3>& ms,
                                                           double kp) {
  const Measurements& yr = ms.references();
  EquilibriumReport rep;
  rep.Y = 0.5 * kp * yr * yr.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(rep.Y);
  rep.lambda = eig.eigenvalues();
  rep.u = eig.eigenvectors();
  rep.min_eigen_gap = std::min(rep.lambda(1) - rep.lambda(0), rep.lambda(2) - rep.lambda(1));
  rep.repeated_eigenvalues = ms.size() < 2 || rep.min_eigen_gap < kEigenGapTolerance;

  std::array<Mat3, 3> proj;
  for (int i = 0; i < 3; ++i) proj[i] = rep.u.col(i) * rep.u.col(i).transpose();
  rep.equilibria[0] = Mat3::Identity();
  rep.equilibria[1] = proj[0] - proj[1] - proj[2];
  rep.equilibria[2] = -proj[0] + proj[1] - proj[2];
  rep.equilibria[3] = -proj[0] - proj[1] + proj[2];

  for (int j = 2; j <= 4; ++j) {
    const Mat3& rs = rep.equilibria[static_cast<std::size_t>(j - 1)];
    Mat3 ups = Mat3::Zero();
    for (Eigen::Index i = 0; i < yr.cols(); ++i) {
      const Mat3 yh = skew(yr.col(i));
      ups += rs * yh * rs * yh;
    }
    ups *= 0.5 * kp;
    rep.upsilon[static_cast<std::size_t>(j - 2)] = ups;
    Eigen::EigenSolver<Mat3> ue(ups, false);
    Vec3 ev = ue.eigenvalues().real();
    std::sort(ev.data(), ev.data() + 3);
    rep.upsilon_eigenvalues[static_cast<std::size_t>(j - 2)] = ev;
  }
  return rep;
}

/// |R* Y - Y R*^T|_F.
[[nodiscard]] inline double equilibrium_residual(const Mat3& r_star, const Mat3& y) {
  return (r_star * y - y * r_star.transpose()).norm();
}

/// Linear time-varying error system at the identity equilibrium,
///   dx/dt = A x + B^T theta,   dtheta/dt = -C x,
/// with the constant certificate pair (P, Q) and its residuals.
struct Linearization {
  Mat3 A;
  Mat3 B;
  Mat3 C;
  Mat3 P;
  Mat3 Q;
  double pb_residual;        // |P B^T - C^T|_F
  double lyapunov_residual;  // |A^T P + P A + Q|_F
};

/// `frame` is the rotation that removes S from the internal-model error
/// (d frame/dt = -frame S), `rd` the exosystem attitude.
[[nodiscard]] inline Linearization linearize_closed_loop(const MeasurementSet<SO3>& ms,
                                                         const RegulatorGains& gains,
                                                         const Rotation& frame,
                                                         const Rotation& rd) {
  const Measurements& yr = ms.references();
  Mat3 sum = Mat3::Zero();  // sum hat(y_i) hat(y_i)
  Mat3 sum_t = Mat3::Zero();  // sum hat(y_i) hat(y_i)^T
  for (Eigen::Index i = 0; i < yr.cols(); ++i) {
    const Mat3 yh = skew(yr.col(i));
    sum += yh * yh;
    sum_t += yh * yh.transpose();
  }
  Linearization lin;
  lin.A = 0.5 * gains.kp * sum;
  lin.B = frame.matrix() * rd.matrix();
  lin.C = -gains.ki * lin.B * sum;
  lin.P = gains.ki * sum_t;
  lin.Q = (gains.kp / gains.ki) * lin.P * lin.P;
  lin.pb_residual = (lin.P * lin.B.transpose() - lin.C.transpose()).norm();
  lin.lyapunov_residual = (lin.A.transpose() * lin.P + lin.P * lin.A + lin.Q).norm();
  return lin;
}

struct ChetaevValue {
  double V;
  double V_dot;
};

/// V_j = kI/(2 kp) x^T Upsilon_j^T x - |theta|^2 / 4,
/// dV_j/dt = kI/kp x^T Upsilon_j^T Upsilon_j x.
[[nodiscard]] inline ChetaevValue chetaev_value(const Vec3& x, const Vec3& theta, int j,
                                                const EquilibriumReport& rep,
                                                const RegulatorGains& gains) {
  if (rep.repeated_eigenvalues) {
    throw ContractError("chetaev_value: Y has repeated eigenvalues, Upsilon may be singular");
  }
  const Mat3& ups = rep.upsilon_matrix(j);
  const double ratio = gains.ki / gains.kp;
  return {0.5 * ratio * x.dot(ups.transpose() * x) - 0.25 * theta.squaredNorm(),
          ratio * (ups * x).squaredNorm()};
}

/// Unit eigenvector of Upsilon_j for its largest eigenvalue.
[[nodiscard]] inline Vec3 chetaev_direction(const EquilibriumReport& rep, int j) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(
      0.5 * (rep.upsilon_matrix(j) + rep.upsilon_matrix(j).transpose()));
  return eig.eigenvectors().col(2).normalized();
}

}  // namespace liereg::so3

#endif  // LIEREG_SO3_HPP
