// SPDX-License-Identifier: Apache-2.0
//
// Fixed-width numeric trajectory table with a lossless CSV form.

#ifndef LIEREG_SIM_TRAJECTORY_LOG_HPP
#define LIEREG_SIM_TRAJECTORY_LOG_HPP

#include "liereg/sim/closed_loop.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liereg::sim {

class TrajectoryLog {
 public:
  TrajectoryLog() = default;
  explicit TrajectoryLog(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Column layout for a run: t, group error, |e_i| per i, sum_e_sq,
  /// |w~|, [|Omega~|], L, L1, L2, [L_bs, |Gamma|].
  [[nodiscard]] static TrajectoryLog for_run(bool so3, int num_measurements, bool dynamic) {
    std::vector<std::string> c{"t", so3 ? "tr_I_minus_Re" : "Er_minus_I_fro"};
    for (int i = 0; i < num_measurements; ++i) c.push_back("e_norm_" + std::to_string(i + 1));
    c.emplace_back("sum_e_sq");
    c.emplace_back("w_tilde_norm");
    if (dynamic) c.emplace_back("omega_tilde_norm");
    c.insert(c.end(), {"L", "L1", "L2"});
    if (dynamic) c.insert(c.end(), {"L_bs", "torque_norm"});
    return TrajectoryLog(std::move(c));
  }

  /// Appends the row for `s` at time t, matching for_run's layout.
  void append(double t, const Sample& s, bool dynamic) {
    std::vector<double> row{t, s.group_error};
    for (int i = 0; i < s.num_measurements; ++i) {
      row.push_back(s.e_norm[static_cast<std::size_t>(i)]);
    }
    row.push_back(s.sum_e_sq);
    row.push_back(s.w_tilde_norm);
    if (dynamic) row.push_back(s.omega_tilde_norm);
    row.insert(row.end(), {s.L, s.L1, s.L2});
    if (dynamic) row.insert(row.end(), {s.L_bs, s.torque_norm});
    append(std::move(row));
  }

  void append(std::vector<double> row) {
    if (row.size() != columns_.size()) {
      throw std::invalid_argument("trajectory log: row width " + std::to_string(row.size()) +
                                  " != " + std::to_string(columns_.size()));
    }
    if (!rows_.empty() && !(row.front() > rows_.back().front())) {
      throw std::invalid_argument("trajectory log: time must be strictly increasing");
    }
    rows_.push_back(std::move(row));
  }

  [[nodiscard]] const std::vector<std::string>& columns() const { return columns_; }
  [[nodiscard]] const std::vector<std::vector<double>>& rows() const { return rows_; }
  [[nodiscard]] std::size_t size() const { return rows_.size(); }

  [[nodiscard]] std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i] == name) return i;
    }
    throw std::out_of_range("trajectory log: no column '" + name + "'");
  }

  [[nodiscard]] std::vector<double> column(const std::string& name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r[j]);
    return out;
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    char buf[32];
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        os << (i ? "," : "") << buf;
      }
      os << '\n';
    }
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(os);
  }

  [[nodiscard]] static TrajectoryLog read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("trajectory csv: empty input");
    std::vector<std::string> cols;
    {
      std::stringstream ss(line);
      std::string c;
      while (std::getline(ss, c, ',')) cols.push_back(c);
    }
    TrajectoryLog log(std::move(cols));
    int lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0') {
          throw std::runtime_error("trajectory csv line " + std::to_string(lineno) +
                                   ": bad number '" + cell + "'");
        }
        row.push_back(v);
      }
      log.append(std::move(row));
    }
    return log;
  }

  [[nodiscard]] static TrajectoryLog read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read '" + path + "'");
    return read_csv(is);
  }

  bool operator==(const TrajectoryLog&) const = default;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace liereg::sim

#endif  // LIEREG_SIM_TRAJECTORY_LOG_HPP
