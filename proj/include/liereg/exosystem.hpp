// SPDX-License-Identifier: Apache-2.0
//
// Right-invariant reference generator:
//   dXd/dt = hat(C w) Xd,   dw/dt = S w,   S = -S^T.

#ifndef LIEREG_EXOSYSTEM_HPP
#define LIEREG_EXOSYSTEM_HPP

#include "liereg/lie_core.hpp"

#include <cmath>
#include <span>
#include <string>
#include <utility>

namespace liereg {

/// Upper bound on the exosystem state dimension m. Keeps the hot loop free of
/// heap allocation.
inline constexpr int kMaxExoDim = 24;

using ExoVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxExoDim, 1>;
using ExoMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxExoDim, kMaxExoDim>;

/// Exosystem parameters (C, S). Validated on construction: S exactly skew,
/// C with k rows and m >= k columns.
template <MatrixGroup G>
class ExoParams {
 public:
  ExoParams(const Eigen::MatrixXd& c, const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols()) throw ContractError("exosystem: S must be square");
    if (s.rows() > kMaxExoDim) {
      throw ContractError("exosystem: m exceeds " + std::to_string(kMaxExoDim));
    }
    if (c.rows() != G::k) {
      throw ContractError("exosystem: C must have " + std::to_string(G::k) +
                          " rows (algebra dimension), got " + std::to_string(c.rows()));
    }
    if (c.cols() != s.rows()) throw ContractError("exosystem: C must have m columns");
    if (s.rows() < G::k) throw ContractError("exosystem: m must be >= kappa");
    if (!c.allFinite() || !s.allFinite()) throw ContractError("exosystem: non-finite entries");
    if (!(s + s.transpose()).isZero(0.0)) {
      throw ContractError("skewness check failed: S must equal -S^T exactly");
    }
    c_ = c;
    s_ = s;
  }

  [[nodiscard]] const ExoMatrix& C() const { return c_; }
  [[nodiscard]] const ExoMatrix& S() const { return s_; }
  [[nodiscard]] int m() const { return static_cast<int>(s_.rows()); }
  [[nodiscard]] int kappa() const { return G::k; }

 private:
  ExoMatrix c_;
  ExoMatrix s_;
};

template <MatrixGroup G>
struct ExoState {
  GroupElement<G> pose;
  ExoVector w;
};

template <MatrixGroup G>
struct ExoRates {
  MatN<G> pose_rate;
  ExoVector w_rate;
};

/// Inertial-frame reference velocity hat(C w).
template <MatrixGroup G>
[[nodiscard]] AlgebraElement<G> exo_velocity(const ExoParams<G>& p, const ExoVector& w) {
  if (w.size() != p.m()) throw ContractError("exo_velocity: w must have length m");
  return hat<G>(VecK<G>(p.C() * w));
}

/// The velocity multiplies the pose on the left.
template <MatrixGroup G>
[[nodiscard]] ExoRates<G> exo_vector_field(const ExoParams<G>& p, const ExoState<G>& s) {
  return {exo_velocity(p, s.w).matrix() * s.pose.matrix(), p.S() * s.w};
}

template <MatrixGroup G>
struct ExoSetup {
  ExoParams<G> params;
  ExoVector w0;
};

/// One planar oscillator per algebra axis: (C w(t))_j = a_j cos(omega_j t).
template <MatrixGroup G>
[[nodiscard]] ExoSetup<G> harmonic_exo(std::span<const double> amplitudes,
                                       std::span<const double> frequencies) {
  if (amplitudes.size() != static_cast<std::size_t>(G::k) ||
      frequencies.size() != static_cast<std::size_t>(G::k)) {
    throw ContractError("harmonic_exo: need one (amplitude, frequency) pair per algebra axis");
  }
  const int m = 2 * G::k;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(G::k, m);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
  ExoVector w0 = ExoVector::Zero(m);
  for (int j = 0; j < G::k; ++j) {
    const double freq = frequencies[static_cast<std::size_t>(j)];
    if (!(freq > 0.0) || !std::isfinite(freq)) {
      throw ContractError("harmonic_exo: frequencies must be positive (use the constant-velocity "
                          "exosystem for zero frequency)");
    }
    s(2 * j, 2 * j + 1) = -freq;
    s(2 * j + 1, 2 * j) = freq;
    c(j, 2 * j) = 1.0;
    w0(2 * j) = amplitudes[static_cast<std::size_t>(j)];
  }
  return {ExoParams<G>(c, s), w0};
}

/// S = 0, C = I: the reference moves with the constant velocity hat(v).
template <MatrixGroup G>
[[nodiscard]] ExoSetup<G> constant_velocity_exo(const VecK<G>& v) {
  ExoVector w0 = v;
  return {ExoParams<G>(Eigen::MatrixXd::Identity(G::k, G::k), Eigen::MatrixXd::Zero(G::k, G::k)),
          w0};
}

}  // namespace liereg

#endif  // LIEREG_EXOSYSTEM_HPP
