#pragma once

namespace lplq {

// Centralized tolerance constants.  `part` governs partition bookkeeping
// (cell sums, breakpoint dedup), `norm` governs norm-level comparisons.
struct Tolerances {
    double part = 1e-12;
    double norm = 1e-9;
};

// Mutable process-wide tolerances.  The CLI scales `norm` by the
// LPLQ_TOLERANCE_SCALE environment variable at startup; library code reads
// through this accessor.
Tolerances& tol();

}  // namespace lplq
