#pragma once

#include <vector>

#include "sft/orbits.hpp"

namespace sft {

// One puncture: the asymptotic orbit plus a marker residue j in Z_m selecting
// which of the m(orbit) asymptotic parameterizations is used.
struct Puncture {
  OrbitKey orbit;
  int marker = 0;
  auto operator<=>(const Puncture&) const = default;
};

// Connected punctured surface decorated with asymptotics. Puncture lists are
// ordered; positions, not orbit identities, distinguish punctures.
struct DecoratedSurface {
  int genus = 0;
  int n = 2;  // ambient half-dimension; orbit paths must have dim 2n-2
  std::vector<Puncture> positives;
  std::vector<Puncture> negatives;
  int chern = 0;  // first Chern number of the relevant bundle
  auto operator<=>(const DecoratedSurface&) const = default;
};

// Closed-surface Euler characteristic 2 - 2g, as used by the index formula.
int euler_characteristic(const DecoratedSurface& surface);

// References resolve, ambient dimensions agree, markers lie in range.
void validate_surface(const DecoratedSurface& surface, const OrbitTable& orbits);

int fredholm_index(const DecoratedSurface& surface, const OrbitTable& orbits);

int moduli_dimension(const DecoratedSurface& surface, const OrbitTable& orbits);

// Glue bottom onto top along t necks: top's negative puncture at position
// s-1+1-m pairs with bottom's positive puncture at position m (1-based), for
// m = 1..t; matched pairs must agree on orbit and marker. Both surfaces and
// the result are connected, whence the genus gain t-1.
DecoratedSurface glue_surfaces(const DecoratedSurface& top,
                               const DecoratedSurface& bottom, int t);

}  // namespace sft
