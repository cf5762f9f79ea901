#pragma once

#include "ds/matrix.hpp"

#include <string>

namespace ds {

// Common result record for the solvers. `objective` and
// `feasibility_residual` carry the solver's own objective and residual
// measure; see each solver for the exact meaning.
struct Estimate {
    Vector beta;
    double objective = 0.0;
    double feasibility_residual = 0.0;
    std::string solver;
    std::size_t iterations = 0;
    double wall_ms = 0.0;
    std::string status = "ok";  // ok | max_iters | numerical_failure
    Vector raw_beta;            // solver output before zero-snapping
    double gap = 0.0;           // LP certificates where applicable
    double primal_infeas = 0.0;
    double dual_infeas = 0.0;
};

}  // namespace ds
