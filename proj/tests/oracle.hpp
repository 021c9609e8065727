#pragma once

#include "sft/path.hpp"

namespace oracle {

// Independent Robbin-Salamon index evaluation used only by tests, structurally
// separate from the library implementation: crossings are located as minima of
// sigma_min(A(t) - Id) on a 10x finer grid with golden-section refinement, and
// derivatives come from Richardson-extrapolated finite differences. Throws
// std::runtime_error on any numerical ambiguity so a disagreement can never be
// silently absorbed.
int rs_index(const sft::SymplecticPath& path);

}  // namespace oracle
