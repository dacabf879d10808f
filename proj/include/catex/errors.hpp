#pragma once

#include <stdexcept>
#include <string>

namespace catex {

// Equilibrium solver failed to converge (iteration cap, or no bracket for the
// latent site term — the latter signals inconsistent inputs, e.g. fewer total
// cation equivalents than the exchange capacity).
struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite or out-of-range inputs (negative concentrations, cec < 0, ...).
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Explicit advection step asked to exceed its stability bound.
struct CflViolation : std::runtime_error {
    explicit CflViolation(const std::string& what) : std::runtime_error(what) {}
};

// Charge-balance rescaling asked to scale a zero-charge output up to a positive
// target; the surrogate has collapsed and the caller should fall back to the
// equilibrium solver for that cell.
struct DegenerateCharge : std::runtime_error {
    explicit DegenerateCharge(const std::string& what) : std::runtime_error(what) {}
};

// Model or sampler specification violates its own invariants (non-positive
// tree count, lo > hi, asymmetric covariance, ...).
struct InvalidSpec : std::invalid_argument {
    explicit InvalidSpec(const std::string& what) : std::invalid_argument(what) {}
};

// Batch shapes disagree with what a fitted model expects.
struct ShapeMismatch : std::invalid_argument {
    explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Truncated-normal sampling rejected too many consecutive draws; the
// covariance spec puts essentially no mass on the non-negative orthant.
struct RejectionOverflow : std::runtime_error {
    explicit RejectionOverflow(const std::string& what) : std::runtime_error(what) {}
};

// Metric arguments have different sample counts.
struct LengthMismatch : std::invalid_argument {
    explicit LengthMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Rollouts compared on different time grids or cell counts.
struct GridMismatch : std::invalid_argument {
    explicit GridMismatch(const std::string& what) : std::invalid_argument(what) {}
};

// Coefficient of determination requested for a constant truth vector.
struct DegenerateTruth : std::invalid_argument {
    explicit DegenerateTruth(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace catex
