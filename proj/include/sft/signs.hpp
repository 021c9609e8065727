#pragma once

#include <vector>

#include "sft/surfaces.hpp"

namespace sft {

// Element of {+1, -1} under multiplication.
struct Sign {
  int value = 1;
  friend Sign operator*(Sign a, Sign b) { return Sign{a.value * b.value}; }
  friend bool operator==(Sign a, Sign b) { return a.value == b.value; }
};

// (-1)^parity
inline Sign sign_from_exponent(long long exponent) {
  return Sign{exponent % 2 == 0 ? 1 : -1};
}

// Ordered disjoint union of connected decorated surfaces.
struct Configuration {
  std::vector<DecoratedSurface> components;
};

// Relative sign of the orientations before and after exchanging the negative
// punctures at positions l and l+1 (1-based): +1 iff the product of their
// gradings is even.
Sign swap_adjacent_negative(const DecoratedSurface& surface, int l,
                            const OrbitTable& orbits);

// Same rule at the positive end.
Sign swap_adjacent_positive(const DecoratedSurface& surface, int k,
                            const OrbitTable& orbits);

// Sign for arbitrary reorderings of both puncture lists. A permutation is
// encoded as the list of original 1-based positions in their new order; the
// sign is the product over inverted pairs of (-1)^{grading_i * grading_j},
// independent of any decomposition into adjacent swaps.
Sign permutation_sign(const DecoratedSurface& surface,
                      const std::vector<int>& perm_pos,
                      const std::vector<int>& perm_neg,
                      const OrbitTable& orbits);

// Sign relating the orientation of the ordered pair (first, second) to the
// disjoint-union orientation assembled in the order (second, first):
// (-1)^epsilon with epsilon = (sum of gradings over all negative punctures of
// first) * (sum over all positive punctures of second).
Sign union_sign(const Configuration& first, const Configuration& second,
                const OrbitTable& orbits);

// Sign by which the coherent orientation of the glued surface differs from
// the naively glued pair: epsilon = (gradings of top's leftover negatives) *
// (gradings of bottom's extra positives). Complete gluings give +1.
Sign glue_sign(const DecoratedSurface& top, const DecoratedSurface& bottom,
               int t, const OrbitTable& orbits);

// Rotating the marker at one puncture by j generator steps (2*pi/m each):
// orientation preserving for good orbits, alternating for bad ones.
Sign rotate_marker(const DecoratedSurface& surface, bool positive_side,
                   int position, int j, const OrbitTable& orbits);

}  // namespace sft
