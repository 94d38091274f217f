#pragma once

#include "arrayfix/array_model.hpp"

namespace arrayfix {

/// Broadside Dolph-Chebyshev taper for N half-wavelength spaced elements
/// with equiripple sidelobes at sll_db (< 0). Real, symmetric, max weight 1.
Excitations dolph_chebyshev(int element_count, double sll_db);

/// w_n * (1 - Omega_n)
Excitations apply_failures(const Excitations& original, const FailureScenario& scenario);

/// w_faulty + delta. Throws ConstraintViolation when delta is nonzero at a
/// failed element.
Excitations corrected_weights(const Excitations& faulty, const Excitations& delta,
                              const FailureScenario& scenario);

}  // namespace arrayfix
