#include "catsim/pop_count.hpp"

// PopCount is header-only; this translation unit only verifies the header
// is self-contained.
