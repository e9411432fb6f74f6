#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catsim/distributions.hpp"
#include "json.hpp"

namespace catsim::cli {

// Raised for any malformed configuration; the driver maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON experiment configuration shared by all subcommands. Unknown keys are
// rejected; each command validates that the fields it needs are present.
struct ExperimentConfig {
  std::optional<EnvDistribution> env;
  std::optional<ImmigrationDistribution> imm;
  uint64_t horizon = 1000;
  uint64_t n = 3;
  double s = 0.5;
  uint64_t reps = 100'000;
  uint64_t m = 2;
  double p = 0.5;
  uint64_t state_cap = 64;
  uint64_t master_seed = 12345;
  std::string out;
  std::optional<double> a;
  std::optional<double> beta;
  std::vector<double> a_grid;
  std::vector<double> beta_grid;
  std::optional<std::vector<uint64_t>> matrix_cells;
  uint64_t n_max = 200;  // partial-sum length for diagnostics
};

EnvDistribution parse_env(const nlohmann::json& j);
ImmigrationDistribution parse_imm(const nlohmann::json& j);
ExperimentConfig parse_config_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace catsim::cli
