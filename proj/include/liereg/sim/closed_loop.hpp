// SPDX-License-Identifier: Apache-2.0
//
// Closed-loop vector fields for the three controller modes, plus the
// ground-truth metrics sampled along a trajectory.

#ifndef LIEREG_SIM_CLOSED_LOOP_HPP
#define LIEREG_SIM_CLOSED_LOOP_HPP

#include "liereg/exosystem.hpp"
#include "liereg/integrator.hpp"
#include "liereg/regulator.hpp"
#include "liereg/so3.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

namespace liereg::sim {

enum class Mode { kinematic_general, kinematic_so3, dynamic_so3_backstep };

[[nodiscard]] inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::kinematic_general: return "kinematic_general";
    case Mode::kinematic_so3: return "kinematic_so3";
    case Mode::dynamic_so3_backstep: return "dynamic_so3_backstep";
  }
  return "?";
}

[[nodiscard]] inline Mode parse_mode(std::string_view s) {
  if (s == "kinematic_general") return Mode::kinematic_general;
  if (s == "kinematic_so3") return Mode::kinematic_so3;
  if (s == "dynamic_so3_backstep") return Mode::dynamic_so3_backstep;
  throw ContractError("unknown mode '" + std::string(s) + "'");
}

/// Ground-truth quantities at one instant.
struct Sample {
  double group_error = 0.0;  // tr(I - R_e) on SO(3), |E_r - I|_F otherwise
  int num_measurements = 0;
  std::array<double, kMaxMeasurements> e_norm{};
  double sum_e_sq = 0.0;
  double w_tilde_norm = 0.0;
  double omega_tilde_norm = 0.0;  // dynamic only
  double L = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double L_bs = 0.0;           // dynamic only
  double torque_norm = 0.0;    // dynamic only
  double energy_rate = 0.0;    // analytic dL/dt (dL_bs/dt when dynamic)
  double orthogonality_defect = 0.0;
  double reference_translation = 0.0;  // |translation of X_d|, SE(n) only
};

namespace detail {

template <MatrixGroup G>
[[nodiscard]] double group_error(const GroupElement<G>& er) {
  if constexpr (G::tag == GroupTag::SO3) {
    return 3.0 - er.matrix().trace();
  } else {
    return (er.matrix() - MatN<G>::Identity()).norm();
  }
}

template <MatrixGroup G>
void fill_error_metrics(Sample& out, const ErrorSnapshot<G>& snap, double ki) {
  out.group_error = group_error(snap.Er);
  out.num_measurements = static_cast<int>(snap.e.cols());
  for (Eigen::Index i = 0; i < snap.e.cols(); ++i) {
    out.e_norm[static_cast<std::size_t>(i)] = snap.e.col(i).norm();
  }
  out.sum_e_sq = snap.e.squaredNorm();
  out.w_tilde_norm = snap.w_tilde.norm();
  const LyapunovValue l = lyapunov<G>(snap.e, snap.w_tilde, ki);
  out.L = l.total;
  out.L1 = l.measurement;
  out.L2 = l.internal_model;
}

}  // namespace detail

/// Kinematic plant dX/dt = X U with the general regulator (or its SO(3)
/// cross-product form). Slots: groups {X (right), Xd (left)}, vectors
/// {w, delta}.
template <MatrixGroup G>
class KinematicLoop {
 public:
  using State = HybridState<G, 2, 2>;
  using Rate = HybridRate<G, 2, 2>;

  KinematicLoop(ExoParams<G> exo, MeasurementSet<G> ms, RegulatorGains gains,
                bool so3_form = false)
      : exo_(std::move(exo)), ms_(std::move(ms)), gains_(gains), so3_form_(so3_form) {
    gains_.validate();
    if constexpr (G::tag != GroupTag::SO3) {
      if (so3_form_) throw ContractError("kinematic_so3 mode requires the SO3 group");
    }
  }

  [[nodiscard]] static State make_state(const GroupElement<G>& x, const GroupElement<G>& xd,
                                        const ExoVector& w, const ExoVector& delta) {
    return State{{x, xd}, {Side::right, Side::left}, {w, delta}};
  }

  [[nodiscard]] Rate operator()(double /*t*/, const State& s) const {
    const GroupElement<G>& x = s.groups[0];
    const GroupElement<G>& xd = s.groups[1];
    const RegulatorState reg{s.vectors[1]};
    const MeasurementMatrix<G> y = measure(x, xd, ms_);
    Rate k;
    if constexpr (G::tag == GroupTag::SO3) {
      if (so3_form_) {
        const so3::KinematicControl c = so3::kinematic_control(x, y, ms_, gains_, reg, exo_);
        k.algebra[0] = so3::skew(c.omega_c);
        k.vectors[1] = internal_model_rate<G>(reg, c.beta, exo_);
      } else {
        const ControlOutput<G> c = control(x, y, ms_, gains_, reg, exo_);
        k.algebra[0] = c.U.matrix();
        k.vectors[1] = internal_model_rate<G>(reg, c.beta, exo_);
      }
    } else {
      const ControlOutput<G> c = control(x, y, ms_, gains_, reg, exo_);
      k.algebra[0] = c.U.matrix();
      k.vectors[1] = internal_model_rate<G>(reg, c.beta, exo_);
    }
    k.algebra[1] = exo_velocity(exo_, s.vectors[0]).matrix();
    k.vectors[0] = exo_.S() * s.vectors[0];
    return k;
  }

  [[nodiscard]] Sample sample(const State& s) const {
    const ExoState<G> exo_state{s.groups[1], s.vectors[0]};
    const ErrorSnapshot<G> snap =
        error_snapshot(s.groups[0], exo_state, ms_, RegulatorState{s.vectors[1]}, exo_);
    Sample out;
    detail::fill_error_metrics(out, snap, gains_.ki);
    out.energy_rate = lyapunov_rate(snap.Er, snap.e, gains_, ms_);
    out.orthogonality_defect =
        std::max(s.groups[0].orthogonality_defect(), s.groups[1].orthogonality_defect());
    if constexpr (G::homogeneous) {
      out.reference_translation = s.groups[1].matrix().template topRightCorner<G::r, 1>().norm();
    }
    return out;
  }

  [[nodiscard]] const MeasurementSet<G>& measurements() const { return ms_; }
  [[nodiscard]] const ExoParams<G>& exo() const { return exo_; }
  [[nodiscard]] const RegulatorGains& gains() const { return gains_; }

 private:
  ExoParams<G> exo_;
  MeasurementSet<G> ms_;
  RegulatorGains gains_;
  bool so3_form_;
};

/// Rigid body on SO(3) driven by the backstepping torque. The controller
/// uses `nominal` inertia, the plant integrates with `real`.
/// Slots: groups {R (right), Rd (left)}, vectors {w, delta, Omega}.
class BackstepLoop {
 public:
  using State = HybridState<SO3, 2, 3>;
  using Rate = HybridRate<SO3, 2, 3>;

  BackstepLoop(ExoParams<SO3> exo, MeasurementSet<SO3> ms, so3::BackstepGains gains,
               so3::Inertia nominal, so3::Inertia real,
               so3::BackstepLaw law = so3::BackstepLaw::consistent)
      : exo_(std::move(exo)),
        ms_(std::move(ms)),
        gains_(gains),
        nominal_(std::move(nominal)),
        real_(std::move(real)),
        law_(law) {
    gains_.validate();
  }

  [[nodiscard]] static State make_state(const GroupElement<SO3>& r, const GroupElement<SO3>& rd,
                                        const ExoVector& w, const ExoVector& delta,
                                        const Eigen::Vector3d& omega) {
    return State{{r, rd}, {Side::right, Side::left}, {w, delta, ExoVector(omega)}};
  }

  [[nodiscard]] Rate operator()(double /*t*/, const State& s) const {
    const so3::RigidBodyState body{s.groups[0], Eigen::Vector3d(s.vectors[2])};
    const RegulatorState reg{s.vectors[1]};
    const auto y = measure(s.groups[0], s.groups[1], ms_);
    const so3::BackstepOutput c =
        so3::backstep_torque(nominal_, body, y, ms_, gains_, reg, exo_, law_);
    const so3::RigidBodyRates plant = so3::rigid_body_rhs(real_, body, c.torque);
    Rate k;
    k.algebra[0] = so3::skew(body.omega);
    k.algebra[1] = exo_velocity(exo_, s.vectors[0]).matrix();
    k.vectors[0] = exo_.S() * s.vectors[0];
    k.vectors[1] = c.delta_rate;
    k.vectors[2] = plant.omega_rate;
    return k;
  }

  [[nodiscard]] Sample sample(const State& s) const {
    const ExoState<SO3> exo_state{s.groups[1], s.vectors[0]};
    const RegulatorState reg{s.vectors[1]};
    const ErrorSnapshot<SO3> snap = error_snapshot(s.groups[0], exo_state, ms_, reg, exo_);
    const so3::RigidBodyState body{s.groups[0], Eigen::Vector3d(s.vectors[2])};
    const auto y = measure(s.groups[0], s.groups[1], ms_);
    const so3::BackstepOutput c =
        so3::backstep_torque(nominal_, body, y, ms_, gains_, reg, exo_, law_);
    Sample out;
    detail::fill_error_metrics(out, snap, gains_.ki);
    out.omega_tilde_norm = c.omega_tilde.norm();
    out.L_bs = out.L + 0.5 * c.omega_tilde.dot(real_.matrix() * c.omega_tilde);
    out.torque_norm = c.torque.norm();
    out.energy_rate = so3::backstep_energy_rate(snap.Er, ms_, gains_, c.omega_tilde);
    out.orthogonality_defect =
        std::max(s.groups[0].orthogonality_defect(), s.groups[1].orthogonality_defect());
    return out;
  }

  [[nodiscard]] const MeasurementSet<SO3>& measurements() const { return ms_; }
  [[nodiscard]] const ExoParams<SO3>& exo() const { return exo_; }

 private:
  ExoParams<SO3> exo_;
  MeasurementSet<SO3> ms_;
  so3::BackstepGains gains_;
  so3::Inertia nominal_;
  so3::Inertia real_;
  so3::BackstepLaw law_;
};

}  // namespace liereg::sim

#endif  // LIEREG_SIM_CLOSED_LOOP_HPP
