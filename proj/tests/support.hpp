// Shared fixtures and independent oracles for the test suites.

#ifndef LIEREG_TESTS_SUPPORT_HPP
#define LIEREG_TESTS_SUPPORT_HPP

#include "liereg/lie_core.hpp"
#include "liereg/regulator.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace liereg::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }

  template <int R, int C>
  Eigen::Matrix<double, R, C> gaussian() {
    Eigen::Matrix<double, R, C> m;
    for (int i = 0; i < m.size(); ++i) m.data()[i] = normal();
    return m;
  }

  Eigen::VectorXd gaussian(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::Matrix3d rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }

  Eigen::Vector3d unit3() { return gaussian<3, 1>().normalized(); }

  /// Random group element built without the library's exp map.
  template <MatrixGroup G>
  GroupElement<G> element() {
    MatN<G> m = MatN<G>::Identity();
    if constexpr (G::tag == GroupTag::SE2) {
      const double a = uniform(-M_PI, M_PI);
      m(0, 0) = std::cos(a);
      m(0, 1) = -std::sin(a);
      m(1, 0) = std::sin(a);
      m(1, 1) = std::cos(a);
      m(0, 2) = normal();
      m(1, 2) = normal();
    } else {
      m.template topLeftCorner<3, 3>() = rotation();
      if constexpr (G::tag == GroupTag::SE3) m.template topRightCorner<3, 1>() = gaussian<3, 1>();
    }
    return GroupElement<G>(m);
  }

  template <MatrixGroup G>
  VecK<G> algebra_vector() { return gaussian<G::k, 1>(); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Algebra basis written out by hand (independent of hat()).
template <MatrixGroup G>
std::vector<MatN<G>> algebra_basis() {
  std::vector<MatN<G>> basis;
  const auto rot = [](int a, int b) {
    MatN<G> e = MatN<G>::Zero();
    e(a, b) = -1.0;
    e(b, a) = 1.0;
    return e;
  };
  if constexpr (G::tag == GroupTag::SO3) {
    basis = {rot(1, 2), rot(2, 0), rot(0, 1)};  // E1 = [[0,0,0],[0,0,-1],[0,1,0]] etc.
  } else if constexpr (G::tag == GroupTag::SE2) {
    MatN<G> tx = MatN<G>::Zero(), ty = MatN<G>::Zero();
    tx(0, 2) = 1.0;
    ty(1, 2) = 1.0;
    basis = {rot(0, 1), tx, ty};
  } else {
    basis = {rot(1, 2), rot(2, 0), rot(0, 1)};
    for (int i = 0; i < 3; ++i) {
      MatN<G> t = MatN<G>::Zero();
      t(i, 3) = 1.0;
      basis.push_back(t);
    }
  }
  return basis;
}

/// Trace-orthogonal projection by solving the normal equations over the basis.
template <MatrixGroup G>
MatN<G> projection_oracle(const MatN<G>& a) {
  const auto basis = algebra_basis<G>();
  const int k = static_cast<int>(basis.size());
  Eigen::MatrixXd gram(k, k);
  Eigen::VectorXd rhs(k);
  for (int i = 0; i < k; ++i) {
    rhs(i) = (basis[i].transpose() * a).trace();
    for (int j = 0; j < k; ++j) gram(i, j) = (basis[i].transpose() * basis[j]).trace();
  }
  const Eigen::VectorXd c = gram.ldlt().solve(rhs);
  MatN<G> p = MatN<G>::Zero();
  for (int i = 0; i < k; ++i) p += c(i) * basis[i];
  return p;
}

/// Truncated power series sum_{j<terms} A^j / j!.
template <class M>
M exp_series(const M& a, int terms = 30) {
  M out = M::Identity(a.rows(), a.cols());
  M term = out;
  for (int j = 1; j < terms; ++j) {
    term = term * a / static_cast<double>(j);
    out += term;
  }
  return out;
}

/// Orthogonal polar factor by Newton iteration X <- (X + X^{-T}) / 2.
inline Eigen::Matrix3d polar_newton(Eigen::Matrix3d x, int iters = 50) {
  for (int i = 0; i < iters; ++i) x = 0.5 * (x + x.inverse().transpose());
  return x;
}

/// Measurement set on SO(3) whose Y has well separated eigenvalues.
inline MeasurementSet<SO3> distinct_measurements(Rng& rng, int nu = 3) {
  for (;;) {
    MeasurementMatrix<SO3> d(3, nu);
    for (int i = 0; i < nu; ++i) d.col(i) = rng.gaussian<3, 1>() * rng.uniform(0.5, 2.0);
    MeasurementSet<SO3> ms(d, GroupElement<SO3>(rng.rotation()));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(ms.references() *
                                                       ms.references().transpose());
    const Eigen::Vector3d l = eig.eigenvalues();
    if ((nu < 3 || l(0) > 0.05) && l(1) - l(0) > 0.1 && l(2) - l(1) > 0.1) return ms;
  }
}

/// Central difference of samples spaced h apart.
inline std::vector<double> central_difference(const std::vector<double>& v, double h) {
  std::vector<double> d(v.size(), NAN);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  return d;
}

}  // namespace liereg::testing

#endif  // LIEREG_TESTS_SUPPORT_HPP
