// SPDX-License-Identifier: Apache-2.0
//
// Declarative scenario description, its JSON form, load-time validation and
// the built-in presets. Angles are degrees in files and radians internally;
// matrices are row-major nested lists.

#ifndef LIEREG_SIM_SCENARIO_HPP
#define LIEREG_SIM_SCENARIO_HPP

#include "liereg/exosystem.hpp"
#include "liereg/integrator.hpp"
#include "liereg/lie_core.hpp"
#include "liereg/regulator.hpp"
#include "liereg/sim/closed_loop.hpp"
#include "liereg/so3.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace liereg::sim {

using json = nlohmann::json;

/// Load-time failure. `check()` names the failed check ("parse", "schema",
/// "skewness", "group_membership", ...).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string check, const std::string& message)
      : std::runtime_error(check + ": " + message), check_(std::move(check)) {}
  [[nodiscard]] const std::string& check() const { return check_; }

 private:
  std::string check_;
};

struct EulerAttitude {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  std::string convention = "ZYX_intrinsic";

  bool operator==(const EulerAttitude&) const = default;
};

struct HarmonicExo {
  std::vector<double> amplitudes;
  std::vector<double> frequencies;

  bool operator==(const HarmonicExo&) const = default;
};

struct ExplicitExo {
  Eigen::MatrixXd C;
  Eigen::MatrixXd S;
  Eigen::VectorXd w0;
};

struct DynamicsSpec {
  Eigen::Vector3d initial_omega = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia_nominal = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d inertia_real = Eigen::Matrix3d::Identity();
};

struct Scenario {
  std::string name = "unnamed";
  GroupTag group = GroupTag::SO3;
  Mode mode = Mode::kinematic_general;

  Eigen::MatrixXd plant_pose;                 // n x n
  std::optional<DynamicsSpec> dynamics;       // dynamic_so3_backstep only

  std::variant<HarmonicExo, ExplicitExo> exo;
  std::variant<EulerAttitude, Eigen::MatrixXd> exo_pose;

  Eigen::MatrixXd directions;  // n x nu, one column per reference vector
  Eigen::MatrixXd offset;      // X_r

  double kp = 1.0;
  double ki = 1.0;
  double kd = 1.0;
  Eigen::VectorXd delta0;      // empty means zeros
  so3::BackstepLaw backstep_law = so3::BackstepLaw::consistent;

  StepConfig integration;
  double t_end = 10.0;
  int log_every = 1;
};

namespace detail {

[[nodiscard]] inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

[[nodiscard]] inline bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace detail

[[nodiscard]] inline bool operator==(const ExplicitExo& a, const ExplicitExo& b) {
  return detail::same(a.C, b.C) && detail::same(a.S, b.S) && detail::same(a.w0, b.w0);
}

[[nodiscard]] inline bool operator==(const DynamicsSpec& a, const DynamicsSpec& b) {
  return a.initial_omega == b.initial_omega && a.inertia_nominal == b.inertia_nominal &&
         a.inertia_real == b.inertia_real;
}

[[nodiscard]] inline bool operator==(const Scenario& a, const Scenario& b) {
  const bool pose_eq = a.exo_pose.index() == b.exo_pose.index() &&
                       (a.exo_pose.index() == 0
                            ? std::get<0>(a.exo_pose) == std::get<0>(b.exo_pose)
                            : detail::same(std::get<1>(a.exo_pose), std::get<1>(b.exo_pose)));
  return a.name == b.name && a.group == b.group && a.mode == b.mode &&
         detail::same(a.plant_pose, b.plant_pose) && a.dynamics == b.dynamics &&
         a.exo == b.exo && pose_eq && detail::same(a.directions, b.directions) &&
         detail::same(a.offset, b.offset) && a.kp == b.kp && a.ki == b.ki && a.kd == b.kd &&
         detail::same(a.delta0, b.delta0) && a.backstep_law == b.backstep_law &&
         a.integration.h == b.integration.h && a.integration.method == b.integration.method &&
         a.integration.retract_every == b.integration.retract_every && a.t_end == b.t_end &&
         a.log_every == b.log_every;
}

[[nodiscard]] inline int ambient_dim(GroupTag tag) {
  return visit_group(tag, [](auto g) { return decltype(g)::n; });
}

[[nodiscard]] inline int algebra_dim(GroupTag tag) {
  return visit_group(tag, [](auto g) { return decltype(g)::k; });
}

[[nodiscard]] inline constexpr double deg_to_rad(double deg) {
  return deg * std::numbers::pi / 180.0;
}

/// Rotation for an Euler attitude. ZYX_intrinsic: yaw about z, then pitch
/// about the new y, then roll about the new x (Rz Ry Rx).
[[nodiscard]] inline Eigen::Matrix3d euler_rotation(const EulerAttitude& e) {
  const double yaw = deg_to_rad(e.yaw_deg);
  const double pitch = deg_to_rad(e.pitch_deg);
  const double roll = deg_to_rad(e.roll_deg);
  if (e.convention == "ZYX_intrinsic") return rotation_zyx(yaw, pitch, roll);
  if (e.convention == "ZYX_extrinsic") {
    // Same angles applied about fixed axes: Rx Ry Rz.
    return rotation_zyx(0, 0, roll) * rotation_zyx(0, pitch, 0) * rotation_zyx(yaw, 0, 0);
  }
  throw ScenarioError("euler_convention", "unsupported convention '" + e.convention +
                                              "' (use ZYX_intrinsic or ZYX_extrinsic)");
}

/// Exosystem initial pose as a matrix.
[[nodiscard]] inline Eigen::MatrixXd resolved_exo_pose(const Scenario& s) {
  if (const auto* e = std::get_if<EulerAttitude>(&s.exo_pose)) {
    if (s.group != GroupTag::SO3) {
      throw ScenarioError("schema", "/exosystem/initial_attitude is only supported for SO3; "
                                    "use initial_pose");
    }
    return euler_rotation(*e);
  }
  return std::get<Eigen::MatrixXd>(s.exo_pose);
}

// ---------------------------------------------------------------------------
// JSON <-> Scenario

namespace detail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    throw ScenarioError("schema", path + "/" + key + ": missing required field");
  }
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError("schema", path + ": expected a number");
  return j.get<double>();
}

inline std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ScenarioError("schema", path + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ScenarioError("schema", path + ": expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], path + "/" + std::to_string(i)));
  }
  return out;
}

inline Eigen::VectorXd vector(const json& j, const std::string& path) {
  const std::vector<double> v = number_list(j, path);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Eigen::MatrixXd matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ScenarioError("schema", path + ": expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::vector<double> row =
        number_list(j[static_cast<std::size_t>(r)], path + "/" + std::to_string(r));
    if (r == 0) m.resize(rows, static_cast<Eigen::Index>(row.size()));
    if (static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw ScenarioError("schema", path + ": rows have different lengths");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

inline json to_json_matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

inline json to_json_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline std::string_view to_string(so3::BackstepLaw law) {
  return law == so3::BackstepLaw::consistent ? "consistent" : "doubled";
}

inline so3::BackstepLaw parse_law(const std::string& s, const std::string& path) {
  if (s == "consistent") return so3::BackstepLaw::consistent;
  if (s == "doubled") return so3::BackstepLaw::doubled;
  throw ScenarioError("schema", path + ": backstep_law must be 'consistent' or 'doubled'");
}

}  // namespace detail

/// Parses the scenario tree. Only schema problems are reported here;
/// semantic checks live in validate().
[[nodiscard]] inline Scenario scenario_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ScenarioError("schema", "/: expected an object");
  Scenario s;
  if (j.contains("name")) s.name = string(j["name"], "/name");
  try {
    s.group = parse_group_tag(string(require(j, "group", ""), "/group"));
    s.mode = parse_mode(string(require(j, "mode", ""), "/mode"));
  } catch (const ContractError& e) {
    throw ScenarioError("schema", e.what());
  }
  const int n = ambient_dim(s.group);

  const json& plant = require(j, "plant", "");
  s.plant_pose = plant.contains("initial_pose")
                     ? matrix(plant["initial_pose"], "/plant/initial_pose")
                     : Eigen::MatrixXd::Identity(n, n);
  if (s.mode == Mode::dynamic_so3_backstep) {
    DynamicsSpec d;
    if (plant.contains("initial_omega")) {
      const Eigen::VectorXd w = vector(plant["initial_omega"], "/plant/initial_omega");
      if (w.size() != 3) throw ScenarioError("schema", "/plant/initial_omega: need 3 entries");
      d.initial_omega = w;
    }
    const Eigen::MatrixXd jn =
        matrix(require(plant, "inertia_nominal", "/plant"), "/plant/inertia_nominal");
    if (jn.rows() != 3 || jn.cols() != 3) {
      throw ScenarioError("schema", "/plant/inertia_nominal: expected 3x3");
    }
    d.inertia_nominal = jn;
    if (plant.contains("inertia_real")) {
      const Eigen::MatrixXd jr = matrix(plant["inertia_real"], "/plant/inertia_real");
      if (jr.rows() != 3 || jr.cols() != 3) {
        throw ScenarioError("schema", "/plant/inertia_real: expected 3x3");
      }
      d.inertia_real = jr;
    } else {
      d.inertia_real = d.inertia_nominal;
    }
    s.dynamics = d;
  }

  const json& exo = require(j, "exosystem", "");
  if (exo.contains("harmonic")) {
    const json& h = exo["harmonic"];
    s.exo = HarmonicExo{
        number_list(require(h, "amplitudes", "/exosystem/harmonic"),
                    "/exosystem/harmonic/amplitudes"),
        number_list(require(h, "frequencies", "/exosystem/harmonic"),
                    "/exosystem/harmonic/frequencies")};
  } else if (exo.contains("explicit")) {
    const json& e = exo["explicit"];
    s.exo = ExplicitExo{matrix(require(e, "C", "/exosystem/explicit"), "/exosystem/explicit/C"),
                        matrix(require(e, "S", "/exosystem/explicit"), "/exosystem/explicit/S"),
                        vector(require(e, "w0", "/exosystem/explicit"), "/exosystem/explicit/w0")};
  } else {
    throw ScenarioError("schema", "/exosystem: need either 'harmonic' or 'explicit'");
  }
  if (exo.contains("initial_attitude")) {
    const json& a = exo["initial_attitude"];
    const std::string p = "/exosystem/initial_attitude";
    EulerAttitude e;
    e.yaw_deg = number(require(a, "yaw_deg", p), p + "/yaw_deg");
    e.pitch_deg = number(require(a, "pitch_deg", p), p + "/pitch_deg");
    e.roll_deg = number(require(a, "roll_deg", p), p + "/roll_deg");
    if (a.contains("convention")) e.convention = string(a["convention"], p + "/convention");
    s.exo_pose = e;
  } else if (exo.contains("initial_pose")) {
    s.exo_pose = matrix(exo["initial_pose"], "/exosystem/initial_pose");
  } else {
    s.exo_pose = Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n));
  }

  const json& meas = require(j, "measurements", "");
  const json& dirs = require(meas, "directions", "/measurements");
  if (!dirs.is_array() || dirs.empty()) {
    throw ScenarioError("schema", "/measurements/directions: expected a non-empty list");
  }
  s.directions.resize(n, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const std::string p = "/measurements/directions/" + std::to_string(i);
    const Eigen::VectorXd v = vector(dirs[i], p);
    if (v.size() != n) {
      throw ScenarioError("schema", p + ": expected " + std::to_string(n) + " entries");
    }
    s.directions.col(static_cast<Eigen::Index>(i)) = v;
  }
  s.offset = meas.contains("offset") ? matrix(meas["offset"], "/measurements/offset")
                                     : Eigen::MatrixXd::Identity(n, n);

  const json& gains = require(j, "gains", "");
  s.kp = number(require(gains, "kp", "/gains"), "/gains/kp");
  s.ki = number(require(gains, "ki", "/gains"), "/gains/ki");
  if (s.mode == Mode::dynamic_so3_backstep) {
    s.kd = number(require(gains, "kd", "/gains"), "/gains/kd");
  } else if (gains.contains("kd")) {
    s.kd = number(gains["kd"], "/gains/kd");
  }

  if (j.contains("controller")) {
    const json& c = j["controller"];
    if (c.contains("delta0")) s.delta0 = vector(c["delta0"], "/controller/delta0");
    if (c.contains("backstep_law")) {
      s.backstep_law = parse_law(string(c["backstep_law"], "/controller/backstep_law"),
                                 "/controller/backstep_law");
    }
  }

  const json& integ = require(j, "integration", "");
  if (integ.contains("method")) {
    try {
      s.integration.method = parse_method(string(integ["method"], "/integration/method"));
    } catch (const ContractError& e) {
      throw ScenarioError("schema", std::string("/integration/method: ") + e.what());
    }
  }
  if (integ.contains("step")) s.integration.h = number(integ["step"], "/integration/step");
  if (integ.contains("retract_every")) {
    s.integration.retract_every =
        static_cast<int>(number(integ["retract_every"], "/integration/retract_every"));
  }
  s.t_end = number(require(integ, "t_end", "/integration"), "/integration/t_end");
  if (integ.contains("log_every")) {
    s.log_every = static_cast<int>(number(integ["log_every"], "/integration/log_every"));
  }
  return s;
}

/// Full echo of a scenario: every field explicit, defaults resolved.
[[nodiscard]] inline json scenario_to_json(const Scenario& s) {
  using namespace detail;
  json j;
  j["name"] = s.name;
  j["group"] = std::string(to_string(s.group));
  j["mode"] = std::string(to_string(s.mode));

  json plant;
  plant["initial_pose"] = to_json_matrix(s.plant_pose);
  if (s.dynamics) {
    plant["initial_omega"] = to_json_vector(s.dynamics->initial_omega);
    plant["inertia_nominal"] = to_json_matrix(s.dynamics->inertia_nominal);
    plant["inertia_real"] = to_json_matrix(s.dynamics->inertia_real);
  }
  j["plant"] = plant;

  json exo;
  if (const auto* h = std::get_if<HarmonicExo>(&s.exo)) {
    exo["harmonic"] = {{"amplitudes", h->amplitudes}, {"frequencies", h->frequencies}};
  } else {
    const auto& e = std::get<ExplicitExo>(s.exo);
    exo["explicit"] = {
        {"C", to_json_matrix(e.C)}, {"S", to_json_matrix(e.S)}, {"w0", to_json_vector(e.w0)}};
  }
  if (const auto* a = std::get_if<EulerAttitude>(&s.exo_pose)) {
    exo["initial_attitude"] = {{"yaw_deg", a->yaw_deg},
                               {"pitch_deg", a->pitch_deg},
                               {"roll_deg", a->roll_deg},
                               {"convention", a->convention}};
  } else {
    exo["initial_pose"] = to_json_matrix(std::get<Eigen::MatrixXd>(s.exo_pose));
  }
  j["exosystem"] = exo;

  json dirs = json::array();
  for (Eigen::Index i = 0; i < s.directions.cols(); ++i) {
    dirs.push_back(to_json_vector(s.directions.col(i)));
  }
  j["measurements"] = {{"directions", dirs}, {"offset", to_json_matrix(s.offset)}};
  j["gains"] = {{"kp", s.kp}, {"ki", s.ki}, {"kd", s.kd}};
  json controller;
  controller["delta0"] = to_json_vector(s.delta0);
  controller["backstep_law"] = std::string(to_string(s.backstep_law));
  j["controller"] = controller;
  j["integration"] = {{"method", std::string(to_string(s.integration.method))},
                      {"step", s.integration.h},
                      {"retract_every", s.integration.retract_every},
                      {"t_end", s.t_end},
                      {"log_every", s.log_every}};
  return j;
}

// ---------------------------------------------------------------------------
// Typed views used by the runner

template <MatrixGroup G>
[[nodiscard]] ExoSetup<G> build_exo(const Scenario& s) {
  try {
    if (const auto* h = std::get_if<HarmonicExo>(&s.exo)) {
      return harmonic_exo<G>(h->amplitudes, h->frequencies);
    }
    const auto& e = std::get<ExplicitExo>(s.exo);
    ExoParams<G> params(e.C, e.S);
    if (e.w0.size() != params.m()) throw ContractError("w0 must have length m");
    return {params, ExoVector(e.w0)};
  } catch (const ContractError& err) {
    const std::string what = err.what();
    const bool skew = what.find("skewness") != std::string::npos;
    throw ScenarioError(skew ? "skewness" : "exosystem", what);
  }
}

template <MatrixGroup G>
[[nodiscard]] GroupElement<G> build_pose(const Eigen::MatrixXd& m, const std::string& what) {
  if (m.rows() != G::n || m.cols() != G::n) {
    throw ScenarioError("schema", what + ": expected " + std::to_string(G::n) + "x" +
                                      std::to_string(G::n) + " matrix");
  }
  try {
    return GroupElement<G>(MatN<G>(m));
  } catch (const ContractError& err) {
    throw ScenarioError("group_membership", what + ": " + err.what());
  }
}

template <MatrixGroup G>
[[nodiscard]] MeasurementSet<G> build_measurements(const Scenario& s) {
  if (s.directions.cols() > kMaxMeasurements) {
    throw ScenarioError("measurements",
                        "at most " + std::to_string(kMaxMeasurements) + " reference vectors");
  }
  try {
    return MeasurementSet<G>(MeasurementMatrix<G>(s.directions),
                             build_pose<G>(s.offset, "/measurements/offset"));
  } catch (const ContractError& err) {
    throw ScenarioError("measurements", err.what());
  }
}

[[nodiscard]] inline ExoVector initial_delta(const Scenario& s, int m) {
  if (s.delta0.size() == 0) return ExoVector::Zero(m);
  if (s.delta0.size() != m) {
    throw ScenarioError("schema", "/controller/delta0: expected " + std::to_string(m) +
                                      " entries (exosystem dimension m)");
  }
  return ExoVector(s.delta0);
}

struct ValidationReport {
  std::vector<std::string> warnings;
  std::optional<so3::EquilibriumReport> equilibria;  // SO3 only
  ObservabilityCheck observability{};
};

/// Runs every load-time check. Throws ScenarioError on the first failure;
/// non-fatal findings (repeated eigenvalues of Y, drifting SE(n) reference)
/// become warnings.
[[nodiscard]] inline ValidationReport validate(const Scenario& s) {
  ValidationReport rep;
  if (s.mode != Mode::kinematic_general && s.group != GroupTag::SO3) {
    throw ScenarioError("mode", std::string(to_string(s.mode)) + " requires group SO3");
  }
  if (s.mode == Mode::dynamic_so3_backstep && !s.dynamics) {
    throw ScenarioError("schema", "/plant: dynamic mode needs inertia_nominal");
  }
  try {
    s.integration.validate();
  } catch (const ContractError& e) {
    throw ScenarioError("integration", e.what());
  }
  if (!(s.t_end > 0.0) || !std::isfinite(s.t_end)) {
    throw ScenarioError("integration", "t_end must be positive");
  }
  if (s.log_every < 1) throw ScenarioError("integration", "log_every must be >= 1");
  try {
    RegulatorGains{s.kp, s.ki}.validate();
    if (s.mode == Mode::dynamic_so3_backstep) so3::BackstepGains{s.kp, s.ki, s.kd}.validate();
  } catch (const ContractError& e) {
    throw ScenarioError("gains", e.what());
  }
  if (s.dynamics) {
    try {
      so3::Inertia{s.dynamics->inertia_nominal};
      so3::Inertia{s.dynamics->inertia_real};
    } catch (const ContractError& e) {
      throw ScenarioError("inertia", e.what());
    }
  }

  visit_group(s.group, [&](auto g) {
    using G = decltype(g);
    const ExoSetup<G> exo = build_exo<G>(s);
    (void)build_pose<G>(s.plant_pose, "/plant/initial_pose");
    const GroupElement<G> xd0 = build_pose<G>(resolved_exo_pose(s), "/exosystem/initial_pose");
    (void)initial_delta(s, exo.params.m());
    const MeasurementSet<G> ms = build_measurements<G>(s);

    rep.observability = check_local_observability(ms);
    if (!rep.observability.ok) {
      throw ScenarioError("measurement_observability",
                          "measurement cost vanishes at a non-identity E_r near I (radius " +
                              detail::fmt(rep.observability.min_cost_radius) +
                              "); add independent reference vectors");
    }

    if constexpr (G::tag == GroupTag::SO3) {
      rep.equilibria = so3::classify_equilibria(ms, s.kp);
      if (rep.equilibria->repeated_eigenvalues) {
        rep.warnings.push_back(
            "Y = (kp/2) sum y_i^r y_i^r^T has repeated eigenvalues (min gap " +
            detail::fmt(rep.equilibria->min_eigen_gap) +
            "); the almost-global analysis does not apply, local results still do");
      }
    }

    if constexpr (G::homogeneous) {
      // Propagate the reference alone and watch the translation.
      using State = HybridState<G, 1, 1>;
      State st{{xd0}, {Side::left}, {exo.w0}};
      const auto rhs = [&](double, const State& x) {
        HybridRate<G, 1, 1> k;
        k.algebra[0] = exo_velocity(exo.params, x.vectors[0]).matrix();
        k.vectors[0] = exo.params.S() * x.vectors[0];
        return k;
      };
      const double start = xd0.matrix().template topRightCorner<G::r, 1>().norm();
      double peak = start;
      StepConfig coarse{std::min(1e-2, s.integration.h * 10.0), Method::rkmk4, 100};
      integrate(st, rhs, s.t_end, coarse, [&](long long, double, const State& x) {
        peak = std::max(peak, x.groups[0].matrix().template topRightCorner<G::r, 1>().norm());
        return true;
      });
      if (peak > 1e3 * (1.0 + start)) {
        rep.warnings.push_back("reference translation grows to " + detail::fmt(peak) +
                               " over the horizon; the exosystem trajectory may be unbounded");
      }
    }
  });
  return rep;
}

struct LoadedScenario {
  Scenario scenario;
  ValidationReport report;
};

/// Parses and validates scenario text. Parse errors carry line/column.
[[nodiscard]] inline LoadedScenario load_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("parse", e.what());
  }
  Scenario s = scenario_from_json(j);
  ValidationReport rep = validate(s);
  return {std::move(s), std::move(rep)};
}

[[nodiscard]] inline LoadedScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("parse", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario_text(buf.str());
}

// ---------------------------------------------------------------------------
// Presets

namespace detail {

inline Scenario sec5_base() {
  Scenario s;
  s.group = GroupTag::SO3;
  s.mode = Mode::dynamic_so3_backstep;
  s.plant_pose = Eigen::Matrix3d::Identity();
  DynamicsSpec d;
  d.initial_omega = Eigen::Vector3d::Zero();
  d.inertia_nominal = Eigen::Vector3d(2.0, 1.5, 1.0).asDiagonal();
  d.inertia_real = d.inertia_nominal;
  s.dynamics = d;
  s.exo = HarmonicExo{{1.0, 2.0, 3.0}, {1.0, 5.0, 7.0}};
  s.exo_pose = EulerAttitude{180.0, 45.0, 45.0, "ZYX_intrinsic"};
  s.directions.resize(3, 2);
  s.directions << 1, 0, 0, 1, 0, 0;
  s.offset = Eigen::Matrix3d::Identity();
  s.kp = 2.0;
  s.ki = 0.4;
  s.kd = 2.0;
  s.delta0 = Eigen::VectorXd::Zero(6);
  s.integration = StepConfig{1e-3, Method::rkmk4, 100};
  s.t_end = 300.0;
  s.log_every = 100;
  return s;
}

}  // namespace detail

[[nodiscard]] inline std::vector<std::string> preset_names() {
  return {"sec5_nominal", "sec5_mismatch",  "sec5_doubled_law", "almost_global_base",
          "zero_error",   "se2_two_robots", "se3_three_points"};
}

[[nodiscard]] inline std::string preset_description(const std::string& name) {
  if (name == "sec5_nominal") return "rigid body on SO(3), backstepping, exact inertia";
  if (name == "sec5_mismatch") return "as sec5_nominal, plant inertia diag(2.2, 1.3, 1.1)";
  if (name == "sec5_doubled_law") return "as sec5_nominal, torque law with doubled cross and curvature gains";
  if (name == "almost_global_base") return "kinematic SO(3), three references, distinct eigenvalues";
  if (name == "zero_error") return "kinematic SO(3) started on the invariant set";
  if (name == "se2_two_robots") return "kinematic SE(2), two landmark points";
  if (name == "se3_three_points") return "kinematic SE(3), three landmark points";
  return "";
}

[[nodiscard]] inline Scenario preset(const std::string& name) {
  if (name == "sec5_nominal") {
    Scenario s = detail::sec5_base();
    s.name = name;
    return s;
  }
  if (name == "sec5_mismatch") {
    Scenario s = detail::sec5_base();
    s.name = name;
    s.dynamics->inertia_real = Eigen::Vector3d(2.2, 1.3, 1.1).asDiagonal();
    return s;
  }
  if (name == "sec5_doubled_law") {
    Scenario s = detail::sec5_base();
    s.name = name;
    s.backstep_law = so3::BackstepLaw::doubled;
    return s;
  }
  if (name == "almost_global_base" || name == "zero_error") {
    Scenario s = detail::sec5_base();
    s.name = name;
    s.mode = Mode::kinematic_so3;
    s.dynamics.reset();
    s.directions.resize(3, 3);
    s.directions << 1.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.0, 0.0, 2.0;
    if (name == "zero_error") {
      // X = Xd X_r^{-1}, delta = w: every error is zero and stays zero.
      s.offset = rotation_zyx(0.3, -0.2, 0.1);
      s.exo_pose = Eigen::MatrixXd(rotation_zyx(1.0, 0.5, -0.4));
      s.plant_pose = std::get<Eigen::MatrixXd>(s.exo_pose) * s.offset.transpose();
      s.delta0.resize(6);
      s.delta0 << 1.0, 0.0, 2.0, 0.0, 3.0, 0.0;
      s.t_end = 10.0;
      s.log_every = 10;
    }
    return s;
  }
  if (name == "se2_two_robots") {
    Scenario s;
    s.name = name;
    s.group = GroupTag::SE2;
    s.mode = Mode::kinematic_general;
    Eigen::Matrix3d x0 = Eigen::Matrix3d::Identity();
    x0.topLeftCorner<2, 2>() = rotation_zyx(0.6, 0, 0).topLeftCorner<2, 2>();
    x0(0, 2) = -1.0;
    x0(1, 2) = 0.5;
    s.plant_pose = x0;
    s.exo = HarmonicExo{{0.5, 1.0, 0.3}, {0.5, 0.5, 1.0}};
    Eigen::Matrix3d xd0 = Eigen::Matrix3d::Identity();
    xd0(0, 2) = 2.0;
    s.exo_pose = Eigen::MatrixXd(xd0);
    s.directions.resize(3, 2);
    s.directions << 1, 0, 0, 1, 1, 1;
    Eigen::Matrix3d xr = Eigen::Matrix3d::Identity();
    xr(0, 2) = -1.0;
    s.offset = xr;
    s.kp = 1.0;
    s.ki = 0.5;
    s.kd = 1.0;
    s.delta0 = Eigen::VectorXd::Zero(6);
    s.integration = StepConfig{1e-3, Method::rkmk4, 100};
    s.t_end = 100.0;
    s.log_every = 100;
    return s;
  }
  if (name == "se3_three_points") {
    Scenario s;
    s.name = name;
    s.group = GroupTag::SE3;
    s.mode = Mode::kinematic_general;
    Eigen::Matrix4d x0 = Eigen::Matrix4d::Identity();
    x0.topLeftCorner<3, 3>() = rotation_zyx(0.4, -0.3, 0.2);
    x0.topRightCorner<3, 1>() = Eigen::Vector3d(0.5, -0.5, 0.2);
    s.plant_pose = x0;
    s.exo = HarmonicExo{{0.3, 0.2, 0.4, 0.5, 0.5, 0.2}, {0.5, 0.7, 0.9, 0.5, 0.3, 1.1}};
    Eigen::Matrix4d xd0 = Eigen::Matrix4d::Identity();
    xd0.topRightCorner<3, 1>() = Eigen::Vector3d(1.0, 0.0, 0.0);
    s.exo_pose = Eigen::MatrixXd(xd0);
    s.directions.resize(4, 3);
    s.directions << 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1;
    s.offset = Eigen::Matrix4d::Identity();
    s.kp = 1.0;
    s.ki = 0.5;
    s.kd = 1.0;
    s.delta0 = Eigen::VectorXd::Zero(12);
    s.integration = StepConfig{1e-3, Method::rkmk4, 100};
    s.t_end = 60.0;
    s.log_every = 100;
    return s;
  }
  throw ScenarioError("preset", "unknown preset '" + name + "'");
}

}  // namespace liereg::sim

#endif  // LIEREG_SIM_SCENARIO_HPP
