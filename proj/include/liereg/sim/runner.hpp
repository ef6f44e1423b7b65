// SPDX-License-Identifier: Apache-2.0
//
// Runs a validated scenario, reduces the trajectory to a summary and writes
// the per-run files. Batch sweeps run scenarios on a small thread pool; the
// result order depends only on the input order.

#ifndef LIEREG_SIM_RUNNER_HPP
#define LIEREG_SIM_RUNNER_HPP

#include "liereg/sim/closed_loop.hpp"
#include "liereg/sim/scenario.hpp"
#include "liereg/sim/trajectory_log.hpp"

#include <glob.h>

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace liereg::sim {

inline constexpr std::array<double, 3> kConvergenceThresholds = {1e-2, 1e-4, 1e-6};
inline constexpr double kSteadyStateWindow = 40.0;

enum class RunStatus { ok, integration_failure };

[[nodiscard]] inline std::string_view to_string(RunStatus s) {
  return s == RunStatus::ok ? "ok" : "integration_failure";
}

struct Summary {
  std::string scenario;
  RunStatus status = RunStatus::ok;
  std::string failure_message;
  std::optional<double> failure_time;

  double t_final = 0.0;
  Sample initial{};
  Sample final{};
  double initial_geodesic_error = 0.0;
  double max_lyapunov_increase = -INFINITY;  // largest per-step increase of L (L_bs if dynamic)
  std::array<std::optional<double>, 3> convergence_time{};
  double steady_window_start = 0.0;
  double steady_mean_group_error = 0.0;
  double steady_max_group_error = 0.0;
  double steady_mean_omega_tilde = 0.0;
  double max_orthogonality_defect = 0.0;
  double max_reference_translation = 0.0;
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;

  [[nodiscard]] bool converged(double threshold = 1e-6) const {
    return status == RunStatus::ok && final.sum_e_sq <= threshold;
  }
};

struct RunOptions {
  bool keep_log = true;
};

struct RunResult {
  Summary summary;
  TrajectoryLog log;
};

namespace detail {

inline std::string threshold_key(double thr) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.0e", thr);
  return buf;
}

inline json sample_json(const Sample& s, bool dynamic) {
  json j;
  j["group_error"] = s.group_error;
  j["sum_e_sq"] = s.sum_e_sq;
  j["e_norm"] = std::vector<double>(s.e_norm.begin(), s.e_norm.begin() + s.num_measurements);
  j["w_tilde_norm"] = s.w_tilde_norm;
  j["L"] = s.L;
  if (dynamic) {
    j["omega_tilde_norm"] = s.omega_tilde_norm;
    j["L_bs"] = s.L_bs;
    j["torque_norm"] = s.torque_norm;
  }
  return j;
}

template <MatrixGroup G>
double initial_rotation_error(const GroupElement<G>& x, const GroupElement<G>& xd,
                              const GroupElement<G>& xr) {
  const MatN<G> er = (x.inverse() * xd * xr.inverse()).matrix();
  if constexpr (G::tag == GroupTag::SE2) {
    return std::abs(std::atan2(er(1, 0), er(0, 0)));
  } else {
    return rotation_angle(Eigen::Matrix3d(er.template topLeftCorner<3, 3>()));
  }
}

// Integrates one loop, feeding every grid point to the reducer.
template <class Loop>
RunResult drive(const Loop& loop, typename Loop::State s0, const Scenario& sc, bool dynamic,
                const RunOptions& opt) {
  RunResult res;
  Summary& sum = res.summary;
  sum.scenario = sc.name;
  const bool so3 = sc.group == GroupTag::SO3;
  if (opt.keep_log) {
    res.log = TrajectoryLog::for_run(so3, static_cast<int>(sc.directions.cols()), dynamic);
  }
  const double h = sc.integration.h;
  const auto n_steps = static_cast<long long>(std::llround(sc.t_end / h));
  sum.steady_window_start = std::max(0.0, static_cast<double>(n_steps) * h - kSteadyStateWindow);

  std::array<std::optional<double>, 3> last_above{};
  double prev_energy = 0.0;
  long long steady_count = 0;
  double steady_sum = 0.0;
  double steady_omega = 0.0;

  const auto observe = [&](long long i, double t, const typename Loop::State& s) {
    const Sample smp = loop.sample(s);
    const double energy = dynamic ? smp.L_bs : smp.L;
    if (i == 0) {
      sum.initial = smp;
    } else {
      sum.max_lyapunov_increase = std::max(sum.max_lyapunov_increase, energy - prev_energy);
    }
    prev_energy = energy;
    for (std::size_t k = 0; k < kConvergenceThresholds.size(); ++k) {
      if (smp.sum_e_sq > kConvergenceThresholds[k]) last_above[k] = t;
    }
    if (t >= sum.steady_window_start - 0.5 * h) {
      ++steady_count;
      steady_sum += smp.group_error;
      steady_omega += smp.omega_tilde_norm;
      sum.steady_max_group_error = std::max(sum.steady_max_group_error, smp.group_error);
    }
    sum.max_orthogonality_defect = std::max(sum.max_orthogonality_defect, smp.orthogonality_defect);
    sum.max_reference_translation =
        std::max(sum.max_reference_translation, smp.reference_translation);
    if (opt.keep_log && (i % sc.log_every == 0 || i == n_steps)) res.log.append(t, smp, dynamic);
    sum.final = smp;
    sum.t_final = t;
    return true;
  };

  try {
    (void)integrate(std::move(s0), loop, sc.t_end, sc.integration, observe);
  } catch (const IntegrationError& e) {
    sum.status = RunStatus::integration_failure;
    sum.failure_message = e.what();
    sum.failure_time = e.time();
  }

  if (steady_count > 0) {
    sum.steady_mean_group_error = steady_sum / static_cast<double>(steady_count);
    sum.steady_mean_omega_tilde = steady_omega / static_cast<double>(steady_count);
  }
  for (std::size_t k = 0; k < kConvergenceThresholds.size(); ++k) {
    if (sum.status == RunStatus::ok && sum.final.sum_e_sq <= kConvergenceThresholds[k]) {
      sum.convergence_time[k] = last_above[k] ? *last_above[k] + h : 0.0;
    }
  }
  return res;
}

}  // namespace detail

/// Runs a scenario that already passed validate(). Integration failures are
/// recorded in the summary, not thrown.
[[nodiscard]] inline RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {},
                                            std::vector<std::string> warnings = {}) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res = visit_group(sc.group, [&](auto g) -> RunResult {
    using G = decltype(g);
    const ExoSetup<G> exo = build_exo<G>(sc);
    const GroupElement<G> x0 = build_pose<G>(sc.plant_pose, "/plant/initial_pose");
    const GroupElement<G> xd0 = build_pose<G>(resolved_exo_pose(sc), "/exosystem/initial_pose");
    const MeasurementSet<G> ms = build_measurements<G>(sc);
    const ExoVector delta0 = initial_delta(sc, exo.params.m());
    const double err0 = detail::initial_rotation_error(x0, xd0, ms.offset());

    RunResult r;
    if constexpr (G::tag == GroupTag::SO3) {
      if (sc.mode == Mode::dynamic_so3_backstep) {
        const BackstepLoop loop(exo.params, ms, so3::BackstepGains{sc.kp, sc.ki, sc.kd},
                                so3::Inertia(sc.dynamics->inertia_nominal),
                                so3::Inertia(sc.dynamics->inertia_real), sc.backstep_law);
        r = detail::drive(loop,
                          BackstepLoop::make_state(x0, xd0, exo.w0, delta0,
                                                   sc.dynamics->initial_omega),
                          sc, true, opt);
        r.summary.initial_geodesic_error = err0;
        return r;
      }
    }
    const KinematicLoop<G> loop(exo.params, ms, RegulatorGains{sc.kp, sc.ki},
                                sc.mode == Mode::kinematic_so3);
    r = detail::drive(loop, KinematicLoop<G>::make_state(x0, xd0, exo.w0, delta0), sc, false,
                      opt);
    r.summary.initial_geodesic_error = err0;
    return r;
  });
  res.summary.warnings = std::move(warnings);
  res.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

[[nodiscard]] inline json summary_to_json(const Summary& s, bool dynamic) {
  json j;
  j["scenario"] = s.scenario;
  j["status"] = std::string(to_string(s.status));
  if (s.failure_time) {
    j["failure"] = {{"time", *s.failure_time}, {"message", s.failure_message}};
  } else {
    j["failure"] = nullptr;
  }
  j["t_final"] = s.t_final;
  j["initial_geodesic_error"] = s.initial_geodesic_error;
  j["initial"] = detail::sample_json(s.initial, dynamic);
  j["final"] = detail::sample_json(s.final, dynamic);
  j["max_lyapunov_increase"] = s.max_lyapunov_increase;
  j["lyapunov_quantity"] = dynamic ? "L_bs" : "L";
  json conv;
  for (std::size_t k = 0; k < kConvergenceThresholds.size(); ++k) {
    const std::string key = detail::threshold_key(kConvergenceThresholds[k]);
    conv[key] = s.convergence_time[k] ? json(*s.convergence_time[k]) : json(nullptr);
  }
  j["convergence_time_sum_e_sq"] = conv;
  j["steady_state"] = {{"window_start", s.steady_window_start},
                       {"mean_group_error", s.steady_mean_group_error},
                       {"max_group_error", s.steady_max_group_error},
                       {"mean_omega_tilde_norm", s.steady_mean_omega_tilde}};
  j["max_orthogonality_defect"] = s.max_orthogonality_defect;
  j["max_reference_translation"] = s.max_reference_translation;
  j["warnings"] = s.warnings;
  j["wall_seconds"] = s.wall_seconds;
  return j;
}

/// Writes trajectory.csv, metadata.json (full scenario echo) and
/// summary.json into `dir`.
inline void write_run_outputs(const RunResult& r, const Scenario& sc,
                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  r.log.write_csv((dir / "trajectory.csv").string());
  const auto dump = [](const std::filesystem::path& p, const json& j) {
    std::ofstream os(p);
    if (!os) throw std::runtime_error("cannot write '" + p.string() + "'");
    os << j.dump(2) << '\n';
  };
  dump(dir / "metadata.json", scenario_to_json(sc));
  dump(dir / "summary.json", summary_to_json(r.summary, sc.mode == Mode::dynamic_so3_backstep));
}

// ---------------------------------------------------------------------------
// Batch

struct BatchJob {
  std::string run;
  std::optional<std::uint64_t> seed;
  std::optional<Scenario> scenario;  // empty when loading failed
  std::vector<std::string> warnings;
  std::string load_error;
};

struct BatchRow {
  std::string run;
  std::optional<std::uint64_t> seed;
  double initial_geodesic_error = NAN;
  bool converged = false;
  std::optional<double> convergence_time;
  double final_sum_e_sq = NAN;
  std::string status;  // ok, not_converged, integration_failure, validation_failure
  std::string message;

  bool operator==(const BatchRow&) const = default;
};

/// Uniformly distributed rotation (normalized Gaussian quaternion).
[[nodiscard]] inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return q.toRotationMatrix();
}

/// Copy of `base` with a seed-dependent plant attitude and delta = 0.
[[nodiscard]] inline Scenario seeded_scenario(const Scenario& base, std::uint64_t seed) {
  if (base.group != GroupTag::SO3) {
    throw ScenarioError("mode", "seed sweeps randomize an SO3 attitude; base must be SO3");
  }
  std::mt19937_64 rng(seed);
  Scenario s = base;
  s.name = base.name + "_seed" + std::to_string(seed);
  s.plant_pose = random_rotation(rng);
  s.delta0.resize(0);
  return s;
}

[[nodiscard]] inline std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<std::string> out;
  if (rc == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  ::globfree(&g);
  if (out.empty()) throw ScenarioError("batch", "pattern '" + pattern + "' matched no files");
  return out;  // glob() sorts
}

[[nodiscard]] inline std::vector<BatchJob> jobs_from_files(const std::vector<std::string>& paths) {
  std::vector<BatchJob> jobs;
  for (const auto& p : paths) {
    BatchJob job;
    job.run = std::filesystem::path(p).stem().string();
    try {
      LoadedScenario l = load_scenario(p);
      job.scenario = std::move(l.scenario);
      job.warnings = std::move(l.report.warnings);
    } catch (const ScenarioError& e) {
      job.load_error = e.what();
    }
    jobs.push_back(std::move(job));
  }
  return jobs;
}

[[nodiscard]] inline std::vector<BatchJob> jobs_from_seeds(const Scenario& base,
                                                           std::uint64_t first, int count) {
  std::vector<BatchJob> jobs;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = first + static_cast<std::uint64_t>(i);
    BatchJob job;
    job.seed = seed;
    job.scenario = seeded_scenario(base, seed);
    job.run = job.scenario->name;
    jobs.push_back(std::move(job));
  }
  return jobs;
}

/// Runs every job; rows come back in job order regardless of `threads`.
/// If `out_dir` is set each run also writes its own files into a subdirectory.
[[nodiscard]] inline std::vector<BatchRow> run_batch(
    const std::vector<BatchJob>& jobs, unsigned threads = 0, double threshold = 1e-6,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt) {
  std::vector<BatchRow> rows(jobs.size());
  const auto work = [&](std::size_t i) {
    const BatchJob& job = jobs[i];
    BatchRow& row = rows[i];
    row.run = job.run;
    row.seed = job.seed;
    if (!job.scenario) {
      row.status = "validation_failure";
      row.message = job.load_error;
      return;
    }
    try {
      const RunResult r = run_scenario(*job.scenario, RunOptions{out_dir.has_value()},
                                       job.warnings);
      if (out_dir) write_run_outputs(r, *job.scenario, *out_dir / job.run);
      const Summary& s = r.summary;
      row.initial_geodesic_error = s.initial_geodesic_error;
      row.final_sum_e_sq = s.final.sum_e_sq;
      row.converged = s.converged(threshold);
      for (std::size_t k = 0; k < kConvergenceThresholds.size(); ++k) {
        if (kConvergenceThresholds[k] == threshold) row.convergence_time = s.convergence_time[k];
      }
      if (s.status == RunStatus::integration_failure) {
        row.status = "integration_failure";
        row.message = s.failure_message;
      } else {
        row.status = row.converged ? "ok" : "not_converged";
      }
    } catch (const std::exception& e) {
      row.status = "validation_failure";
      row.message = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

inline void write_aggregate_csv(const std::vector<BatchRow>& rows, std::ostream& os) {
  os << "run,seed,initial_geodesic_error,converged,convergence_time,final_sum_e_sq,status\n";
  char buf[32];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.run << ',' << (r.seed ? std::to_string(*r.seed) : "") << ','
       << num(r.initial_geodesic_error) << ',' << (r.converged ? 1 : 0) << ','
       << (r.convergence_time ? num(*r.convergence_time) : "") << ',' << num(r.final_sum_e_sq)
       << ',' << r.status << '\n';
  }
}

inline void write_aggregate_csv(const std::vector<BatchRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  write_aggregate_csv(rows, os);
}

}  // namespace liereg::sim

#endif  // LIEREG_SIM_RUNNER_HPP
