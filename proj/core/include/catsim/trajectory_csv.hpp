#pragma once

#include <ostream>

#include "catsim/chain.hpp"
#include "catsim/neuts.hpp"

namespace catsim {

// Trajectory CSV: header `step,population_log10,beta,z_log10,exact`.
// Populations are serialized as log10 so that log-scale values survive
// round trips; the `exact` column carries the integer when the value is
// exact (<= 2^53) and is empty otherwise. log10(0) serializes as -inf.
// Fields not defined for a row (beta/z at step 0) are empty.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

// Same columns plus a trailing `collapse` 0/1 column; beta is filled at
// collapse steps and z at immigration steps.
void write_neuts_csv(std::ostream& os, const NeutsTrajectory& traj);

}  // namespace catsim
