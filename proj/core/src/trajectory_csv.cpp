#include "catsim/trajectory_csv.hpp"

#include <cmath>
#include <cstdio>

namespace catsim {

namespace {

constexpr double kLn10 = 2.302585092994046;

void append_double(std::string& row, double x) {
  char buf[40];
  if (std::isinf(x)) {
    row += x > 0 ? "inf" : "-inf";
    return;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  row += buf;
}

void append_log10(std::string& row, const PopCount& x) {
  if (x.is_exact() && x.exact_value() == 0) {
    row += "-inf";
    return;
  }
  append_double(row, x.log_value() / kLn10);
}

void append_exact(std::string& row, const PopCount& x) {
  if (x.is_exact()) row += std::to_string(x.exact_value());
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "step,population_log10,beta,z_log10,exact\n";
  std::string row;
  for (uint64_t n = 0; n < traj.states.size(); ++n) {
    row.clear();
    row += std::to_string(n);
    row += ',';
    append_log10(row, traj.states[n]);
    row += ',';
    if (n >= 1) append_double(row, traj.env_draws[n - 1]);
    row += ',';
    if (n >= 1) append_log10(row, traj.imm_draws[n - 1]);
    row += ',';
    append_exact(row, traj.states[n]);
    row += '\n';
    os << row;
  }
}

void write_neuts_csv(std::ostream& os, const NeutsTrajectory& traj) {
  os << "step,population_log10,beta,z_log10,exact,collapse\n";
  std::string row;
  for (uint64_t n = 0; n < traj.states.size(); ++n) {
    row.clear();
    row += std::to_string(n);
    row += ',';
    append_log10(row, traj.states[n]);
    row += ',';
    if (n >= 1 && traj.collapse_flags[n - 1]) {
      append_double(row, traj.env_draws[n - 1]);
    }
    row += ',';
    if (n >= 1 && !traj.collapse_flags[n - 1]) {
      append_log10(row, traj.imm_draws[n - 1]);
    }
    row += ',';
    append_exact(row, traj.states[n]);
    row += ',';
    if (n >= 1) row += traj.collapse_flags[n - 1] ? '1' : '0';
    row += '\n';
    os << row;
  }
}

}  // namespace catsim
