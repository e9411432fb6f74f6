#include "config.hpp"

#include <fstream>
#include <set>

namespace catsim::cli {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + " must be a number");
  return j.get<double>();
}

uint64_t as_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && j.get<int64_t>() < 0)) {
    throw ConfigError(where + " must be a nonnegative integer");
  }
  return j.get<uint64_t>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + " must be a string");
  return j.get<std::string>();
}

}  // namespace

EnvDistribution parse_env(const json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw ConfigError("env must be an object with a 'type' field");
  }
  const std::string type = as_string(j.at("type"), "env.type");
  try {
    if (type == "point_mass") {
      require_keys(j, {"type", "beta"}, "env");
      if (!j.contains("beta")) throw ConfigError("env.point_mass needs 'beta'");
      return EnvDistribution::point_mass(as_real(j.at("beta"), "env.beta"));
    }
    if (type == "uniform01") {
      require_keys(j, {"type"}, "env");
      return EnvDistribution::uniform01();
    }
    if (type == "finite_table") {
      require_keys(j, {"type", "atoms"}, "env");
      if (!j.contains("atoms") || !j.at("atoms").is_array()) {
        throw ConfigError("env.finite_table needs an 'atoms' array");
      }
      std::vector<std::pair<double, double>> atoms;
      for (const auto& entry : j.at("atoms")) {
        if (!entry.is_array() || entry.size() != 2) {
          throw ConfigError("env.atoms entries must be [value, weight]");
        }
        atoms.emplace_back(as_real(entry[0], "env.atoms value"),
                           as_real(entry[1], "env.atoms weight"));
      }
      return EnvDistribution::finite_table(std::move(atoms));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("env: ") + e.what());
  }
  throw ConfigError("unknown env type '" + type + "'");
}

ImmigrationDistribution parse_imm(const json& j) {
  if (!j.is_object() || !j.contains("type")) {
    throw ConfigError("imm must be an object with a 'type' field");
  }
  const std::string type = as_string(j.at("type"), "imm.type");
  try {
    if (type == "deterministic") {
      require_keys(j, {"type", "k"}, "imm");
      if (!j.contains("k")) throw ConfigError("imm.deterministic needs 'k'");
      return ImmigrationDistribution::deterministic(as_count(j.at("k"), "imm.k"));
    }
    if (type == "finite_table") {
      require_keys(j, {"type", "pmf"}, "imm");
      if (!j.contains("pmf") || !j.at("pmf").is_array()) {
        throw ConfigError("imm.finite_table needs a 'pmf' array");
      }
      std::vector<std::pair<uint64_t, double>> pmf;
      for (const auto& entry : j.at("pmf")) {
        if (!entry.is_array() || entry.size() != 2) {
          throw ConfigError("imm.pmf entries must be [count, probability]");
        }
        pmf.emplace_back(as_count(entry[0], "imm.pmf count"),
                         as_real(entry[1], "imm.pmf probability"));
      }
      return ImmigrationDistribution::finite_table(std::move(pmf));
    }
    if (type == "log_tail") {
      require_keys(j, {"type", "a", "kmin"}, "imm");
      if (!j.contains("a")) throw ConfigError("imm.log_tail needs 'a'");
      const uint64_t kmin =
          j.contains("kmin") ? as_count(j.at("kmin"), "imm.kmin") : 2;
      return ImmigrationDistribution::log_tail(as_real(j.at("a"), "imm.a"), kmin);
    }
    if (type == "inverse_square") {
      require_keys(j, {"type"}, "imm");
      return ImmigrationDistribution::inverse_square();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("imm: ") + e.what());
  }
  throw ConfigError("unknown imm type '" + type + "'");
}

ExperimentConfig parse_config_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  require_keys(j,
               {"env", "imm", "horizon", "n", "s", "reps", "m", "p",
                "state_cap", "master_seed", "out", "a", "beta", "a_grid",
                "beta_grid", "matrix_cells", "n_max"},
               "config");
  ExperimentConfig cfg;
  if (j.contains("env")) cfg.env = parse_env(j.at("env"));
  if (j.contains("imm")) cfg.imm = parse_imm(j.at("imm"));
  if (j.contains("horizon")) cfg.horizon = as_count(j.at("horizon"), "horizon");
  if (j.contains("n")) cfg.n = as_count(j.at("n"), "n");
  if (j.contains("s")) cfg.s = as_real(j.at("s"), "s");
  if (j.contains("reps")) cfg.reps = as_count(j.at("reps"), "reps");
  if (j.contains("m")) cfg.m = as_count(j.at("m"), "m");
  if (j.contains("p")) cfg.p = as_real(j.at("p"), "p");
  if (j.contains("state_cap")) cfg.state_cap = as_count(j.at("state_cap"), "state_cap");
  if (j.contains("master_seed")) {
    cfg.master_seed = as_count(j.at("master_seed"), "master_seed");
  }
  if (j.contains("out")) cfg.out = as_string(j.at("out"), "out");
  if (j.contains("a")) cfg.a = as_real(j.at("a"), "a");
  if (j.contains("beta")) cfg.beta = as_real(j.at("beta"), "beta");
  if (j.contains("a_grid")) {
    for (const auto& v : j.at("a_grid")) cfg.a_grid.push_back(as_real(v, "a_grid"));
  }
  if (j.contains("beta_grid")) {
    for (const auto& v : j.at("beta_grid")) {
      cfg.beta_grid.push_back(as_real(v, "beta_grid"));
    }
  }
  if (j.contains("matrix_cells")) {
    std::vector<uint64_t> cells;
    for (const auto& v : j.at("matrix_cells")) {
      cells.push_back(as_count(v, "matrix_cells"));
    }
    cfg.matrix_cells = std::move(cells);
  }
  if (j.contains("n_max")) cfg.n_max = as_count(j.at("n_max"), "n_max");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config_json(j);
}

}  // namespace catsim::cli
