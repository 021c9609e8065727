#pragma once

#include "sft/path.hpp"

namespace sft {

// Robbin-Salamon index of a nondegenerate symplectic path:
//   mu = (1/2) sign Gamma(0) + sum over interior crossings t of sign Gamma(t),
// where crossings are zeros of det(A(t) - Id) and Gamma(t) is the quadratic
// form v -> omega(v, Adot(t) v) restricted to ker(A(t) - Id). The start kernel
// is the full space, so its signature is even and the result is an integer.
//
// Errors: degenerate_endpoint when 1 in spec(A(1)) within tol;
// irregular_crossing when a crossing form is singular on its kernel, the
// kernel dimension is numerically ambiguous, or a crossing sits on a
// derivative seam (caller must perturb the path); unresolved_crossing when a
// near-zero of det(A(t) - Id) cannot be classified at the working resolution.
int maslov_index_rs(const SymplecticPath& path, double tol = kNondegTol);

}  // namespace sft
