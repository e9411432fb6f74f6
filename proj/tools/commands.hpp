#pragma once

#include <string>

#include "config.hpp"

namespace catsim::cli {

struct CommandOptions {
  ExperimentConfig cfg;
  std::string out;  // output path; empty = stdout
  unsigned threads = 0;
  // validate-only: swap in the wrong per-individual environment reading to
  // demonstrate the distributional oracle catches it
  bool inject_per_individual_beta = false;
};

// Exit codes: 0 success, 2 config error (thrown as ConfigError), 3
// validation failure.
int cmd_simulate(const CommandOptions& opt);
int cmd_validate(const CommandOptions& opt);
int cmd_classify(const CommandOptions& opt);
int cmd_phase(const CommandOptions& opt);
int cmd_neuts(const CommandOptions& opt);
int cmd_diagnose(const CommandOptions& opt);

}  // namespace catsim::cli
