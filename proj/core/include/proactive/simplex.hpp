#pragma once

#include "proactive/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace proactive {

struct FeasibilityResult {
    bool feasible = false;
    double infeasibility = 0.0; // optimal phase-1 objective: sum of artificial variables
    std::vector<double> solution;
    std::size_t pivots = 0;
};

/// Decides whether {x >= 0 : A x = b} is non-empty with the phase-1 simplex
/// method on a dense tableau. Bland's rule picks both the entering and the
/// leaving variable, which rules out cycling. The system is feasible when
/// the optimal sum of artificials is at most `tolerance`.
FeasibilityResult phase_one(const Matrix& a, std::span<const double> b, double tolerance = 1e-8);

} // namespace proactive
