#include "catsim/rng.hpp"

#include "catsim/numerics.hpp"

namespace catsim {

double RngState::next_normal() { return num::inverse_normal_cdf(next_open01()); }

}  // namespace catsim
