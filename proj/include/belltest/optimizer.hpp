#pragma once

#include "belltest/evaluate.hpp"
#include "belltest/inequalities.hpp"

#include <iosfwd>
#include <vector>

namespace belltest::opt {

struct SurfaceSample {
    SettingsQuad quad;
    double lhs = 0.0;
};

struct ScanResult {
    SettingsQuad best_quad;
    double best_factor = 1.0;
    double best_lhs = 0.0;
    std::vector<SurfaceSample> surface; // filled when requested
};

struct ScanOptions {
    double step_deg = 1.0;
    int refine_rounds = 6;
    // Ties b' to a', the configuration the 1.5 optimum lives in. Without the
    // tie b' becomes a third free axis.
    bool tie_b_prime_to_a_prime = true;
    bool keep_surface = false;
    unsigned workers = 1;
};

/// Left-hand side of a lower-bound inequality (ardehali10, ardehali28 or
/// bell65) at a quad, from closed-form inputs.
double objective(const SettingsQuad& quad, InequalityId id, const Source& source);

/// Minimizes the objective over physical axes. The objective depends only on
/// axis differences, so a is pinned at 0 and b, a' (and b' when untied) are
/// scanned over [0, 180) on a `step_deg` grid. Each refinement round halves
/// the step and rescans a +/-2 step neighbourhood of the incumbent. Ties
/// within 1e-12 go to the lexicographically smallest (a, b, a', b').
/// Throws ValidationError unless step_deg is in (0, 45] and rounds >= 0.
ScanResult grid_scan(InequalityId id, const Source& source, const ScanOptions& options);

// Header `a,b,a_prime,b_prime,lhs`, one row per evaluated quad.
void write_surface_csv(std::ostream& out, const ScanResult& result);

}  // namespace belltest::opt
