// SPDX-License-Identifier: Apache-2.0
//
// Matrix Lie group toolkit for SO(3), SE(2) and SE(3): group and algebra
// types, hat/vee, adjoint, trace-orthogonal projection onto the algebra,
// duplication matrix, exponential map and drift retraction.

#ifndef LIEREG_LIE_CORE_HPP
#define LIEREG_LIE_CORE_HPP

#include <Eigen/Core>
#include <Eigen/SVD>

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace liereg {

/// Raised when an argument violates a documented precondition.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Frobenius tolerance on R^T R - I for group membership.
inline constexpr double kGroupTolerance = 1e-9;
/// Tolerance on the symmetric part of an algebra element's rotation block.
inline constexpr double kAlgebraTolerance = 1e-9;
/// Largest orthogonality defect retract() will repair.
inline constexpr double kDriftTolerance = 1e-3;

enum class GroupTag { SO3, SE2, SE3 };

[[nodiscard]] inline std::string_view to_string(GroupTag tag) {
  switch (tag) {
    case GroupTag::SO3: return "SO3";
    case GroupTag::SE2: return "SE2";
    case GroupTag::SE3: return "SE3";
  }
  return "?";
}

[[nodiscard]] inline GroupTag parse_group_tag(std::string_view s) {
  if (s == "SO3") return GroupTag::SO3;
  if (s == "SE2") return GroupTag::SE2;
  if (s == "SE3") return GroupTag::SE3;
  throw ContractError("unknown group tag '" + std::string(s) + "'");
}

// Group descriptors. n is the ambient matrix size, k the algebra dimension,
// r the size of the rotation block. SE(n) elements are homogeneous.

struct SO3 {
  static constexpr GroupTag tag = GroupTag::SO3;
  static constexpr int n = 3;
  static constexpr int k = 3;
  static constexpr int r = 3;
  static constexpr bool homogeneous = false;
};

struct SE2 {
  static constexpr GroupTag tag = GroupTag::SE2;
  static constexpr int n = 3;
  static constexpr int k = 3;
  static constexpr int r = 2;
  static constexpr bool homogeneous = true;
};

struct SE3 {
  static constexpr GroupTag tag = GroupTag::SE3;
  static constexpr int n = 4;
  static constexpr int k = 6;
  static constexpr int r = 3;
  static constexpr bool homogeneous = true;
};

template <class G>
concept MatrixGroup = requires {
  { G::tag } -> std::convertible_to<GroupTag>;
  { G::n } -> std::convertible_to<int>;
  { G::k } -> std::convertible_to<int>;
  { G::r } -> std::convertible_to<int>;
};

template <MatrixGroup G>
using MatN = Eigen::Matrix<double, G::n, G::n>;
template <MatrixGroup G>
using VecN = Eigen::Matrix<double, G::n, 1>;
template <MatrixGroup G>
using VecK = Eigen::Matrix<double, G::k, 1>;
template <MatrixGroup G>
using RotBlock = Eigen::Matrix<double, G::r, G::r>;

namespace detail {

[[nodiscard]] inline Eigen::Matrix3d skew3(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  // clang-format off
  s <<   0.0, -v(2),  v(1),
        v(2),   0.0, -v(0),
       -v(1),  v(0),   0.0;
  // clang-format on
  return s;
}

template <MatrixGroup G>
[[nodiscard]] RotBlock<G> rotation_block(const MatN<G>& m) {
  return m.template topLeftCorner<G::r, G::r>();
}

template <MatrixGroup G>
[[nodiscard]] double orthogonality_defect(const MatN<G>& m) {
  const RotBlock<G> rot = rotation_block<G>(m);
  return (rot.transpose() * rot - RotBlock<G>::Identity()).norm();
}

template <MatrixGroup G>
[[nodiscard]] bool has_homogeneous_row(const MatN<G>& m, double bottom_right) {
  if constexpr (!G::homogeneous) {
    return true;
  } else {
    for (int j = 0; j < G::n - 1; ++j) {
      if (m(G::n - 1, j) != 0.0) return false;
    }
    return m(G::n - 1, G::n - 1) == bottom_right;
  }
}

}  // namespace detail

/// Element of a matrix Lie group. Construction from a raw matrix validates
/// membership; products, inverses and exponentials stay in the group.
template <MatrixGroup G>
class GroupElement {
 public:
  using Group = G;
  using Matrix = MatN<G>;

  GroupElement() : m_(Matrix::Identity()) {}

  explicit GroupElement(const Matrix& m) : m_(m) {
    const double defect = detail::orthogonality_defect<G>(m);
    if (!(defect <= kGroupTolerance)) {
      throw ContractError("group element: rotation block not orthonormal (defect " +
                          std::to_string(defect) + ")");
    }
    if (!(detail::rotation_block<G>(m).determinant() > 0.0)) {
      throw ContractError("group element: rotation block has negative determinant");
    }
    if (!detail::has_homogeneous_row<G>(m, 1.0)) {
      throw ContractError("group element: bottom row must be [0 ... 0 1]");
    }
  }

  /// Wraps a matrix already known to be in the group (e.g. a product of
  /// members). No validation.
  [[nodiscard]] static GroupElement trusted(const Matrix& m) {
    GroupElement g;
    g.m_ = m;
    return g;
  }

  [[nodiscard]] static GroupElement identity() { return GroupElement(); }

  [[nodiscard]] const Matrix& matrix() const { return m_; }

  [[nodiscard]] RotBlock<G> rotation() const { return detail::rotation_block<G>(m_); }

  [[nodiscard]] GroupElement inverse() const {
    Matrix inv = Matrix::Identity();
    const RotBlock<G> rt = rotation().transpose();
    inv.template topLeftCorner<G::r, G::r>() = rt;
    if constexpr (G::homogeneous) {
      inv.template topRightCorner<G::r, 1>() = -rt * m_.template topRightCorner<G::r, 1>();
    }
    return trusted(inv);
  }

  [[nodiscard]] GroupElement operator*(const GroupElement& other) const {
    return trusted(m_ * other.m_);
  }

  /// Linear left action on the homogeneous space.
  [[nodiscard]] VecN<G> act(const VecN<G>& y) const { return m_ * y; }

  /// Frobenius norm of R^T R - I for the rotation block.
  [[nodiscard]] double orthogonality_defect() const {
    return detail::orthogonality_defect<G>(m_);
  }

 private:
  Matrix m_;
};

/// Element of the Lie algebra of G, stored as an n x n matrix.
template <MatrixGroup G>
class AlgebraElement {
 public:
  using Group = G;
  using Matrix = MatN<G>;

  AlgebraElement() : m_(Matrix::Zero()) {}

  explicit AlgebraElement(const Matrix& m) : m_(m) {
    const RotBlock<G> rot = detail::rotation_block<G>(m);
    const double sym = (rot + rot.transpose()).norm();
    if (!(sym <= kAlgebraTolerance)) {
      throw ContractError("algebra element: rotation block not skew-symmetric (defect " +
                          std::to_string(sym) + ")");
    }
    if (!detail::has_homogeneous_row<G>(m, 0.0)) {
      throw ContractError("algebra element: bottom row must be zero");
    }
  }

  [[nodiscard]] static AlgebraElement trusted(const Matrix& m) {
    AlgebraElement a;
    a.m_ = m;
    return a;
  }

  [[nodiscard]] static AlgebraElement zero() { return AlgebraElement(); }

  [[nodiscard]] const Matrix& matrix() const { return m_; }

  AlgebraElement operator+(const AlgebraElement& o) const { return trusted(m_ + o.m_); }
  AlgebraElement operator-(const AlgebraElement& o) const { return trusted(m_ - o.m_); }
  AlgebraElement operator-() const { return trusted(-m_); }
  friend AlgebraElement operator*(double s, const AlgebraElement& a) {
    return trusted(s * a.m_);
  }

 private:
  Matrix m_;
};

/// Algebra basis expansion. Ordering: SO(3) (w1, w2, w3); SE(2) (theta, x, y);
/// SE(3) (w1, w2, w3, x, y, z), rotation first.
template <MatrixGroup G>
[[nodiscard]] AlgebraElement<G> hat(const VecK<G>& v) {
  MatN<G> m = MatN<G>::Zero();
  if constexpr (G::r == 3) {
    m.template topLeftCorner<3, 3>() = detail::skew3(v.template head<3>());
  } else {
    m(0, 1) = -v(0);
    m(1, 0) = v(0);
  }
  if constexpr (G::homogeneous) {
    m.template topRightCorner<G::r, 1>() = v.template tail<G::r>();
  }
  return AlgebraElement<G>::trusted(m);
}

/// hat for a runtime-sized vector; rejects a length other than k.
template <MatrixGroup G>
[[nodiscard]] AlgebraElement<G> hat_checked(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != G::k) {
    throw ContractError("hat: expected vector of length " + std::to_string(G::k) + ", got " +
                        std::to_string(v.size()));
  }
  return hat<G>(VecK<G>(v));
}

/// Inverse of hat. Reads the antisymmetric part so that hat -> vee is exact.
template <MatrixGroup G>
[[nodiscard]] VecK<G> vee(const AlgebraElement<G>& u) {
  const MatN<G>& m = u.matrix();
  VecK<G> v;
  if constexpr (G::r == 3) {
    v(0) = 0.5 * (m(2, 1) - m(1, 2));
    v(1) = 0.5 * (m(0, 2) - m(2, 0));
    v(2) = 0.5 * (m(1, 0) - m(0, 1));
  } else {
    v(0) = 0.5 * (m(1, 0) - m(0, 1));
  }
  if constexpr (G::homogeneous) {
    v.template tail<G::r>() = m.template topRightCorner<G::r, 1>();
  }
  return v;
}

/// Validating vee for raw matrices: refuses inputs outside the algebra.
template <MatrixGroup G>
[[nodiscard]] VecK<G> vee(const MatN<G>& m) {
  return vee<G>(AlgebraElement<G>(m));
}

/// Ad_X U = X U X^{-1}.
template <MatrixGroup G>
[[nodiscard]] AlgebraElement<G> adjoint(const GroupElement<G>& x, const AlgebraElement<G>& u) {
  return AlgebraElement<G>(x.matrix() * u.matrix() * x.inverse().matrix());
}

/// Lie bracket [A, B] = AB - BA.
template <MatrixGroup G>
[[nodiscard]] MatN<G> bracket(const MatN<G>& a, const MatN<G>& b) {
  return a * b - b * a;
}

/// Orthogonal projection of an arbitrary n x n matrix onto the algebra with
/// respect to <A, B> = tr(A^T B).
template <MatrixGroup G, class Derived>
[[nodiscard]] AlgebraElement<G> proj_algebra(const Eigen::MatrixBase<Derived>& a) {
  static_assert(Derived::RowsAtCompileTime == G::n && Derived::ColsAtCompileTime == G::n,
                "proj_algebra: matrix size does not match the group");
  MatN<G> p = MatN<G>::Zero();
  const RotBlock<G> rot = a.template topLeftCorner<G::r, G::r>();
  p.template topLeftCorner<G::r, G::r>() = 0.5 * (rot - rot.transpose());
  if constexpr (G::homogeneous) {
    p.template topRightCorner<G::r, 1>() = a.template topRightCorner<G::r, 1>();
  }
  return AlgebraElement<G>::trusted(p);
}

template <MatrixGroup G>
[[nodiscard]] AlgebraElement<G> proj_algebra(const Eigen::MatrixXd& a) {
  if (a.rows() != G::n || a.cols() != G::n) {
    throw ContractError("proj_algebra: expected a " + std::to_string(G::n) + "x" +
                        std::to_string(G::n) + " matrix");
  }
  return proj_algebra<G>(MatN<G>(a));
}

/// Column-major vec(A).
template <class Derived>
[[nodiscard]] Eigen::VectorXd vec(const Eigen::MatrixBase<Derived>& a) {
  Eigen::VectorXd out(a.size());
  Eigen::Index idx = 0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) out(idx++) = a(r, c);
  }
  return out;
}

template <MatrixGroup G>
struct Duplication {
  Eigen::Matrix<double, G::n * G::n, G::k> D;
  Eigen::Matrix<double, G::k, G::k> Q;
};

/// Duplication matrix D with vec(hat(v)) = D v, and Q = D^T D so that
/// tr(U^T V) = vee(U)^T Q vee(V).
template <MatrixGroup G>
[[nodiscard]] Duplication<G> duplication_Q() {
  Duplication<G> out;
  for (int i = 0; i < G::k; ++i) {
    out.D.col(i) = vec(hat<G>(VecK<G>::Unit(i)).matrix());
  }
  out.Q = out.D.transpose() * out.D;
  return out;
}

namespace detail {

// sin(t)/t, (1 - cos t)/t^2 and (t - sin t)/t^3 without cancellation.
struct ExpCoefficients {
  double a;
  double b;
  double c;
};

[[nodiscard]] inline ExpCoefficients exp_coefficients(double theta) {
  const double t2 = theta * theta;
  if (theta < 1e-8) {
    return {1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0};
  }
  const double half_sin = std::sin(0.5 * theta);
  const double a = std::sin(theta) / theta;
  const double b = 2.0 * half_sin * half_sin / t2;
  double c;
  if (theta < 1e-2) {
    // (t - sin t)/t^3 = 1/6 - t^2/120 + t^4/5040 - t^6/362880
    c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2 * t2 * t2 / 362880.0;
  } else {
    c = (theta - std::sin(theta)) / (t2 * theta);
  }
  return {a, b, c};
}

}  // namespace detail

/// Closed-form exponential: Rodrigues for the rotation block, screw motion
/// for the translation column.
template <MatrixGroup G>
[[nodiscard]] GroupElement<G> exp_map(const AlgebraElement<G>& u) {
  const VecK<G> v = vee(u);
  MatN<G> out = MatN<G>::Identity();
  if constexpr (G::r == 3) {
    const Eigen::Vector3d w = v.template head<3>();
    const auto [a, b, c] = detail::exp_coefficients(w.norm());
    const Eigen::Matrix3d wx = detail::skew3(w);
    const Eigen::Matrix3d wx2 = wx * wx;
    out.template topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + a * wx + b * wx2;
    if constexpr (G::homogeneous) {
      const Eigen::Matrix3d left_jac = Eigen::Matrix3d::Identity() + b * wx + c * wx2;
      out.template topRightCorner<3, 1>() = left_jac * v.template tail<3>();
    }
  } else {
    const double theta = v(0);
    const auto [a, b, c] = detail::exp_coefficients(std::abs(theta));
    (void)c;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    out(0, 0) = ct;
    out(0, 1) = -st;
    out(1, 0) = st;
    out(1, 1) = ct;
    // V = [[sin t/t, -(1-cos t)/t], [(1-cos t)/t, sin t/t]]
    const double bt = b * theta;
    Eigen::Matrix2d left_jac;
    left_jac << a, -bt, bt, a;
    out.template topRightCorner<2, 1>() = left_jac * v.template tail<2>();
  }
  return GroupElement<G>::trusted(out);
}

/// Projects a drifted matrix back onto the group: polar factor of the
/// rotation block, bottom row reset to [0 ... 0 1].
template <MatrixGroup G>
[[nodiscard]] GroupElement<G> retract(const MatN<G>& m) {
  const RotBlock<G> rot = detail::rotation_block<G>(m);
  if (!rot.allFinite()) throw ContractError("retract: non-finite input");
  if (!(rot.determinant() > 0.0)) {
    throw ContractError("retract: rotation block singular or orientation-reversing");
  }
  const double defect = detail::orthogonality_defect<G>(m);
  if (!(defect <= kDriftTolerance)) {
    throw ContractError("retract: input too far from the group (defect " +
                        std::to_string(defect) + ")");
  }
  Eigen::JacobiSVD<RotBlock<G>> svd(rot, Eigen::ComputeFullU | Eigen::ComputeFullV);
  MatN<G> out = m;
  out.template topLeftCorner<G::r, G::r>() = svd.matrixU() * svd.matrixV().transpose();
  if constexpr (G::homogeneous) {
    out.template bottomRows<1>().setZero();
    out(G::n - 1, G::n - 1) = 1.0;
  }
  return GroupElement<G>::trusted(out);
}

template <MatrixGroup G>
[[nodiscard]] GroupElement<G> retract(const GroupElement<G>& x) {
  return retract<G>(x.matrix());
}

/// Rotation angle in [0, pi] of a rotation matrix, robust near 0 and pi.
[[nodiscard]] inline double rotation_angle(const Eigen::Matrix3d& r) {
  const Eigen::Vector3d axis_sin(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * axis_sin.norm(), 0.5 * (r.trace() - 1.0));
}

/// Geodesic distance on SO(3) between a and b.
[[nodiscard]] inline double geodesic_distance(const GroupElement<SO3>& a,
                                              const GroupElement<SO3>& b) {
  return rotation_angle(a.matrix().transpose() * b.matrix());
}

/// Rotation from yaw, pitch, roll (radians), Z-Y-X intrinsic: Rz * Ry * Rx.
[[nodiscard]] inline Eigen::Matrix3d rotation_zyx(double yaw, double pitch, double roll) {
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  Eigen::Matrix3d rz, ry, rx;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  return rz * ry * rx;
}

/// Dispatches a runtime tag to a callable templated on the group type.
template <class F>
decltype(auto) visit_group(GroupTag tag, F&& f) {
  switch (tag) {
    case GroupTag::SO3: return f(SO3{});
    case GroupTag::SE2: return f(SE2{});
    case GroupTag::SE3: return f(SE3{});
  }
  throw ContractError("visit_group: invalid tag");
}

}  // namespace liereg

#endif  // LIEREG_LIE_CORE_HPP
