#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "robloss/errors.hpp"

namespace robloss {

/// Probability primitives shared by every loss in the library. All
/// functions are pure and thread-safe.

/// Numerically stable softmax (max-shifted exponentials). Throws
/// InvalidInputError on non-finite entries or C < 2.
std::vector<double> softmax(std::span<const double> logits);

/// log(softmax(logits)) computed as x - max - log(sum exp(x - max));
/// never returns -inf for finite inputs.
std::vector<double> log_softmax(std::span<const double> logits);

/// Affine smoothing map s_m = xi * p_m + (1 - xi) / (C - 1) * (1 - p_m).
/// Preserves simplex normalization exactly; preserves the argmax for
/// xi > 1/C. Throws DegenerateDimensionError for C = 1 (divides by C - 1)
/// and InvalidInputError for xi outside [0, 1] or p off the simplex.
std::vector<double> smooth_distribution(std::span<const double> probs, double xi);

/// True iff max(p) strictly exceeds gamma; the indicator is mu(x) = 1 for
/// x > 0 and 0 otherwise, so the boundary max(p) == gamma is excluded.
bool confidence_gate(std::span<const double> probs, double gamma);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax_label(std::span<const double> probs);

/// Validation helper: entries in [0, 1] (within tol), sum within tol of 1.
bool is_prob_vector(std::span<const double> p, double tol = 1e-9);

namespace detail {
/// Throws InvalidInputError if any entry is not finite.
void require_finite(std::span<const double> values, const char* what);
}  // namespace detail

}  // namespace robloss
