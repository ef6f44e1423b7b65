// SPDX-License-Identifier: Apache-2.0
//
// Fixed-step integration of coupled group/vector states. Group slots move by
// exponentials of algebra increments, either on the right (dX/dt = X U) or
// on the left (dX/dt = U X); vector slots follow the matching classical
// scheme.

#ifndef LIEREG_INTEGRATOR_HPP
#define LIEREG_INTEGRATOR_HPP

#include "liereg/exosystem.hpp"
#include "liereg/lie_core.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace liereg {

/// Non-finite derivative or state during integration.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double t, const std::string& what)
      : std::runtime_error("t=" + std::to_string(t) + ": " + what), time_(t) {}
  [[nodiscard]] double time() const { return time_; }

 private:
  double time_;
};

/// right: dX/dt = X U (body velocity). left: dX/dt = U X (inertial velocity).
enum class Side { right, left };

enum class Method { lie_euler, rkmk4 };

[[nodiscard]] inline std::string_view to_string(Method m) {
  return m == Method::lie_euler ? "lie_euler" : "rkmk4";
}

[[nodiscard]] inline Method parse_method(std::string_view s) {
  if (s == "lie_euler") return Method::lie_euler;
  if (s == "rkmk4") return Method::rkmk4;
  throw ContractError("unknown integration method '" + std::string(s) + "'");
}

struct StepConfig {
  double h = 1e-3;
  Method method = Method::rkmk4;
  int retract_every = 100;

  void validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw ContractError("step config: h must be positive");
    if (retract_every < 1) throw ContractError("step config: retract_every must be >= 1");
  }
};

template <MatrixGroup G, std::size_t NG, std::size_t NV>
struct HybridState {
  std::array<GroupElement<G>, NG> groups;
  std::array<Side, NG> sides;
  std::array<ExoVector, NV> vectors;
};

/// Velocities (algebra matrices) for group slots, derivatives for vectors.
template <MatrixGroup G, std::size_t NG, std::size_t NV>
struct HybridRate {
  std::array<MatN<G>, NG> algebra;
  std::array<ExoVector, NV> vectors;
};

namespace detail {

template <MatrixGroup G>
[[nodiscard]] GroupElement<G> apply_increment(const GroupElement<G>& x, Side side,
                                              const MatN<G>& theta) {
  const GroupElement<G> step = exp_map(AlgebraElement<G>::trusted(theta));
  return side == Side::right ? x * step : step * x;
}

// Truncated inverse derivative of exp, enough for fourth order. For the
// left action X = exp(theta) X0; for the right action X = X0 exp(theta)
// the odd terms flip sign.
template <MatrixGroup G>
[[nodiscard]] MatN<G> dexp_inv(Side side, const MatN<G>& theta, const MatN<G>& a) {
  const MatN<G> b1 = bracket<G>(theta, a);
  const MatN<G> b2 = bracket<G>(theta, b1);
  const double sign = side == Side::right ? 1.0 : -1.0;
  return a + (0.5 * sign) * b1 + (1.0 / 12.0) * b2;
}

template <MatrixGroup G, std::size_t NG, std::size_t NV>
void check_finite(double t, const HybridRate<G, NG, NV>& k) {
  for (std::size_t i = 0; i < NG; ++i) {
    if (!k.algebra[i].allFinite()) {
      throw IntegrationError(t, "non-finite velocity in group slot " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < NV; ++i) {
    if (!k.vectors[i].allFinite()) {
      throw IntegrationError(t, "non-finite derivative in vector slot " + std::to_string(i));
    }
  }
}

template <MatrixGroup G, std::size_t NG, std::size_t NV, class Rhs>
[[nodiscard]] HybridRate<G, NG, NV> evaluate(Rhs& rhs, double t,
                                             const HybridState<G, NG, NV>& s) {
  HybridRate<G, NG, NV> k = rhs(t, s);
  check_finite(t, k);
  return k;
}

}  // namespace detail

/// Advances the state by one step of size cfg.h from time t.
template <MatrixGroup G, std::size_t NG, std::size_t NV, class Rhs>
[[nodiscard]] HybridState<G, NG, NV> step(const HybridState<G, NG, NV>& s, double t, Rhs&& rhs,
                                          const StepConfig& cfg) {
  using State = HybridState<G, NG, NV>;
  using Rate = HybridRate<G, NG, NV>;
  const double h = cfg.h;

  if (cfg.method == Method::lie_euler) {
    const Rate k = detail::evaluate(rhs, t, s);
    State out = s;
    for (std::size_t i = 0; i < NG; ++i) {
      out.groups[i] = detail::apply_increment(s.groups[i], s.sides[i], MatN<G>(h * k.algebra[i]));
    }
    for (std::size_t i = 0; i < NV; ++i) out.vectors[i] = s.vectors[i] + h * k.vectors[i];
    return out;
  }

  // Munthe-Kaas RK4: classical tableau on the algebra increments.
  std::array<Rate, 4> k;
  std::array<std::array<MatN<G>, NG>, 4> theta;
  constexpr std::array<double, 4> c = {0.0, 0.5, 0.5, 1.0};
  for (std::size_t i = 0; i < NG; ++i) theta[0][i].setZero();
  k[0] = detail::evaluate(rhs, t, s);
  for (int stage = 1; stage < 4; ++stage) {
    const auto prev = static_cast<std::size_t>(stage - 1);
    const auto cur = static_cast<std::size_t>(stage);
    State si = s;
    for (std::size_t i = 0; i < NG; ++i) {
      theta[cur][i] = (c[cur] * h) * k[prev].algebra[i];
      si.groups[i] = detail::apply_increment(s.groups[i], s.sides[i], theta[cur][i]);
    }
    for (std::size_t i = 0; i < NV; ++i) {
      si.vectors[i] = s.vectors[i] + (c[cur] * h) * k[prev].vectors[i];
    }
    k[cur] = detail::evaluate(rhs, t + c[cur] * h, si);
    for (std::size_t i = 0; i < NG; ++i) {
      k[cur].algebra[i] = detail::dexp_inv<G>(s.sides[i], theta[cur][i], k[cur].algebra[i]);
    }
  }

  State out = s;
  for (std::size_t i = 0; i < NG; ++i) {
    const MatN<G> total = (h / 6.0) * (k[0].algebra[i] + 2.0 * k[1].algebra[i] +
                                       2.0 * k[2].algebra[i] + k[3].algebra[i]);
    out.groups[i] = detail::apply_increment(s.groups[i], s.sides[i], total);
  }
  for (std::size_t i = 0; i < NV; ++i) {
    out.vectors[i] = s.vectors[i] + (h / 6.0) * (k[0].vectors[i] + 2.0 * k[1].vectors[i] +
                                                 2.0 * k[2].vectors[i] + k[3].vectors[i]);
  }
  return out;
}

/// Repairs drift on every group slot.
template <MatrixGroup G, std::size_t NG, std::size_t NV>
void retract_all(HybridState<G, NG, NV>& s) {
  for (auto& g : s.groups) g = retract(g);
}

/// Integrates from t = 0 to t_end with fixed steps. `observe(i, t, state)`
/// is called at every grid point including both ends; it may return false to
/// stop early. Returns the final state.
template <MatrixGroup G, std::size_t NG, std::size_t NV, class Rhs, class Observer>
HybridState<G, NG, NV> integrate(HybridState<G, NG, NV> s, Rhs&& rhs, double t_end,
                                 const StepConfig& cfg, Observer&& observe) {
  cfg.validate();
  if (!(t_end > 0.0)) throw ContractError("integrate: t_end must be positive");
  const auto n_steps = static_cast<long long>(std::llround(t_end / cfg.h));
  for (long long i = 0; i <= n_steps; ++i) {
    const double t = static_cast<double>(i) * cfg.h;
    if (!observe(i, t, s)) break;
    if (i == n_steps) break;
    s = step(s, t, rhs, cfg);
    if ((i + 1) % cfg.retract_every == 0) {
      try {
        retract_all(s);
      } catch (const ContractError& err) {
        throw IntegrationError(t + cfg.h, err.what());
      }
    }
  }
  return s;
}

}  // namespace liereg

#endif  // LIEREG_INTEGRATOR_HPP
