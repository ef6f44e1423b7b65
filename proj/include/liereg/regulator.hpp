// SPDX-License-Identifier: Apache-2.0
//
// Internal-model output regulator for left-invariant kinematic systems
// dX/dt = X U tracking a right-invariant exosystem through relative
// measurements y_i = X^{-1} Xd y°_i:
//
//   U      = Ad_{X^-1} Delta - kp * sum_i P(e_i y_i^T)
//   Delta  = hat(C delta)
//   ddelta = S delta + C^T Q vee(beta)
//   beta   = -kI * sum_i P(X^-T e_i y_i^T X^T)
//
// with e_i = y_i^r - y_i and y_i^r = X_r y°_i.

#ifndef LIEREG_REGULATOR_HPP
#define LIEREG_REGULATOR_HPP

#include "liereg/exosystem.hpp"
#include "liereg/lie_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace liereg {

inline constexpr int kMaxMeasurements = 16;

/// Measurement vectors stored column-wise (one column per i).
template <MatrixGroup G>
using MeasurementMatrix = Eigen::Matrix<double, G::n, Eigen::Dynamic, 0, G::n, kMaxMeasurements>;

/// Known reference vectors y°_i and the constant offset X_r.
template <MatrixGroup G>
class MeasurementSet {
 public:
  MeasurementSet(const MeasurementMatrix<G>& directions, const GroupElement<G>& offset)
      : directions_(directions), offset_(offset), references_(offset.matrix() * directions) {
    if (directions.cols() < 1) throw ContractError("measurement set: need at least one vector");
    if (!directions.allFinite()) throw ContractError("measurement set: non-finite entries");
  }

  [[nodiscard]] const MeasurementMatrix<G>& directions() const { return directions_; }
  [[nodiscard]] const GroupElement<G>& offset() const { return offset_; }
  /// y_i^r = X_r y°_i.
  [[nodiscard]] const MeasurementMatrix<G>& references() const { return references_; }
  [[nodiscard]] int size() const { return static_cast<int>(directions_.cols()); }

 private:
  MeasurementMatrix<G> directions_;
  GroupElement<G> offset_;
  MeasurementMatrix<G> references_;
};

struct RegulatorGains {
  double kp;
  double ki;

  void validate() const {
    if (!(kp > 0.0) || !std::isfinite(kp)) throw ContractError("gains: kp must be positive");
    if (!(ki > 0.0) || !std::isfinite(ki)) throw ContractError("gains: kI must be positive");
  }
};

/// Internal-model state delta.
struct RegulatorState {
  ExoVector delta;
};

/// y_i = X^{-1} Xd y°_i.
template <MatrixGroup G>
[[nodiscard]] MeasurementMatrix<G> measure(const GroupElement<G>& x, const GroupElement<G>& xd,
                                           const MeasurementSet<G>& ms) {
  return (x.inverse() * xd).matrix() * ms.directions();
}

/// e_i = y_i^r - y_i.
template <MatrixGroup G>
[[nodiscard]] MeasurementMatrix<G> error_vectors(const MeasurementSet<G>& ms,
                                                 const MeasurementMatrix<G>& y) {
  return ms.references() - y;
}

/// Q with tr(U^T V) = vee(U)^T Q vee(V).
template <MatrixGroup G>
[[nodiscard]] const Eigen::Matrix<double, G::k, G::k>& algebra_metric() {
  static const Eigen::Matrix<double, G::k, G::k> q = duplication_Q<G>().Q;
  return q;
}

template <MatrixGroup G>
struct ControlOutput {
  AlgebraElement<G> U;
  AlgebraElement<G> beta;
  AlgebraElement<G> Delta;
};

/// The regulator's feedback law. Reads only the plant pose X and the
/// measurements y; the exosystem state never enters.
template <MatrixGroup G>
[[nodiscard]] ControlOutput<G> control(const GroupElement<G>& x, const MeasurementMatrix<G>& y,
                                       const MeasurementSet<G>& ms, const RegulatorGains& gains,
                                       const RegulatorState& state, const ExoParams<G>& exo) {
  const MeasurementMatrix<G> e = error_vectors(ms, y);
  // sum_i e_i y_i^T; P is linear so the projections can be summed afterwards.
  const MatN<G> outer = e * y.transpose();
  const AlgebraElement<G> delta_alg = hat<G>(VecK<G>(exo.C() * state.delta));
  const GroupElement<G> x_inv = x.inverse();
  const AlgebraElement<G> u =
      adjoint(x_inv, delta_alg) - gains.kp * proj_algebra<G>(outer);
  const MatN<G> rotated = x_inv.matrix().transpose() * outer * x.matrix().transpose();
  const AlgebraElement<G> beta = -gains.ki * proj_algebra<G>(rotated);
  return {u, beta, delta_alg};
}

/// ddelta/dt = S delta + C^T Q vee(beta).
template <MatrixGroup G>
[[nodiscard]] ExoVector internal_model_rate(const RegulatorState& state,
                                            const AlgebraElement<G>& beta,
                                            const ExoParams<G>& exo) {
  const VecK<G> qb = algebra_metric<G>() * vee(beta);
  return exo.S() * state.delta + exo.C().transpose() * qb;
}

struct LyapunovValue {
  double total;
  double measurement;     // 1/2 sum |e_i|^2
  double internal_model;  // |w - delta|^2 / (2 kI)
};

template <MatrixGroup G>
[[nodiscard]] LyapunovValue lyapunov(const MeasurementMatrix<G>& e, const ExoVector& w_tilde,
                                     double ki) {
  const double l1 = 0.5 * e.squaredNorm();
  const double l2 = w_tilde.squaredNorm() / (2.0 * ki);
  return {l1 + l2, l1, l2};
}

/// Closed-loop derivative of the Lyapunov function,
/// -kp * || sum_i P(e_i (E_r y_i^r)^T) ||_F^2. Never positive.
template <MatrixGroup G>
[[nodiscard]] double lyapunov_rate(const GroupElement<G>& er, const MeasurementMatrix<G>& e,
                                   const RegulatorGains& gains, const MeasurementSet<G>& ms) {
  const MeasurementMatrix<G> y = er.matrix() * ms.references();
  const MatN<G> p = proj_algebra<G>(MatN<G>(e * y.transpose())).matrix();
  return -gains.kp * p.squaredNorm();
}

/// dE_r/dt = -(U - Ad_{X^-1} U_d) E_r.
template <MatrixGroup G>
[[nodiscard]] MatN<G> error_dynamics_rhs(const GroupElement<G>& er, const AlgebraElement<G>& u,
                                         const GroupElement<G>& x,
                                         const AlgebraElement<G>& ud) {
  return -(u - adjoint(x.inverse(), ud)).matrix() * er.matrix();
}

/// Ground-truth error quantities. Logging only: control() never sees them.
template <MatrixGroup G>
struct ErrorSnapshot {
  GroupElement<G> E;
  GroupElement<G> Er;
  MeasurementMatrix<G> e;
  ExoVector w_tilde;
  AlgebraElement<G> Delta_tilde;
};

template <MatrixGroup G>
[[nodiscard]] ErrorSnapshot<G> error_snapshot(const GroupElement<G>& x, const ExoState<G>& exo_state,
                                              const MeasurementSet<G>& ms,
                                              const RegulatorState& reg, const ExoParams<G>& exo) {
  const GroupElement<G> e_group = x.inverse() * exo_state.pose;
  const GroupElement<G> er = e_group * ms.offset().inverse();
  MeasurementMatrix<G> e = ms.references() - er.matrix() * ms.references();
  ExoVector w_tilde = exo_state.w - reg.delta;
  const AlgebraElement<G> delta_tilde =
      exo_velocity(exo, exo_state.w) - hat<G>(VecK<G>(exo.C() * reg.delta));
  return {e_group, er, e, w_tilde, delta_tilde};
}

/// 1/2 sum |y_i^r - E_r y_i^r|^2.
template <MatrixGroup G>
[[nodiscard]] double measurement_cost(const GroupElement<G>& er, const MeasurementSet<G>& ms) {
  return 0.5 * (ms.references() - er.matrix() * ms.references()).squaredNorm();
}

struct ObservabilityCheck {
  bool ok;
  double min_cost;          // smallest cost over samples
  double min_cost_radius;   // algebra-coordinate radius at which it occurred
};

/// Samples E_r = exp(hat(v)) with |v| <= radius and reports whether the
/// measurement cost stays positive away from the identity. Besides uniform
/// samples in the ball, the eigen-directions of the cost's quadratic form at
/// I are probed, since unobservable directions form a measure-zero set.
template <MatrixGroup G>
[[nodiscard]] ObservabilityCheck check_local_observability(const MeasurementSet<G>& ms,
                                                           int samples = 1000,
                                                           double radius = 0.5,
                                                           std::uint64_t seed = 0x5eed) {
  ObservabilityCheck out{true, INFINITY, 0.0};
  const auto probe = [&](const VecK<G>& v) {
    if (v.norm() <= 1e-6) return;
    const double cost = measurement_cost(exp_map(hat<G>(v)), ms);
    if (cost < out.min_cost) {
      out.min_cost = cost;
      out.min_cost_radius = v.norm();
    }
    if (cost <= 1e-12) out.ok = false;
  };

  // cost(exp(hat(v))) = 1/2 v^T H v + O(|v|^3), H = sum_i M_i^T M_i with
  // M_i v = hat(v) y_i^r.
  Eigen::Matrix<double, G::k, G::k> h = Eigen::Matrix<double, G::k, G::k>::Zero();
  for (Eigen::Index i = 0; i < ms.references().cols(); ++i) {
    Eigen::Matrix<double, G::n, G::k> m;
    for (int j = 0; j < G::k; ++j) m.col(j) = hat<G>(VecK<G>::Unit(j)).matrix() * ms.references().col(i);
    h += m.transpose() * m;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, G::k, G::k>> eig(h);
  for (int j = 0; j < G::k; ++j) {
    for (const double frac : {0.25, 0.5, 1.0}) {
      probe(VecK<G>(frac * radius * eig.eigenvectors().col(j)));
      probe(VecK<G>(-frac * radius * eig.eigenvectors().col(j)));
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    VecK<G> v;
    for (int j = 0; j < G::k; ++j) v(j) = normal(rng);
    v *= radius * std::pow(unit(rng), 1.0 / G::k) / v.norm();
    probe(v);
  }
  return out;
}

}  // namespace liereg

#endif  // LIEREG_REGULATOR_HPP
