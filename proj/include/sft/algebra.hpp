#pragma once

#include <compare>
#include <map>
#include <utility>
#include <vector>

#include "sft/orbits.hpp"
#include "sft/rational.hpp"

namespace sft {

// Word in good-orbit generators. Normalized means: factors sorted in the
// generator order (id, then multiplicity) and no odd-graded factor repeated.
struct Monomial {
  std::vector<OrbitKey> factors;
  auto operator<=>(const Monomial&) const = default;
};

// Finite rational combination of normalized monomials; no explicit zero
// coefficients are stored, the empty map is the zero element.
struct AlgebraElement {
  std::map<Monomial, Rational> terms;

  bool is_zero() const { return terms.empty(); }
  void add_term(const Monomial& monomial, const Rational& coefficient);
  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;
};

AlgebraElement algebra_zero();
AlgebraElement algebra_one();
AlgebraElement algebra_generator(const OrbitKey& key, const OrbitTable& orbits);

// Koszul normalization of a factor sequence: the sorted monomial together
// with the inversion sign, or sign 0 when an odd generator repeats. Bad
// orbits are rejected as generators.
struct NormalizedMonomial {
  Monomial monomial;
  int sign = 1;  // +1, -1, or 0
};
NormalizedMonomial normalize(const std::vector<OrbitKey>& factors,
                             const OrbitTable& orbits);

long long monomial_grading(const Monomial& monomial, const OrbitTable& orbits);

AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement scale(const AlgebraElement& x, const Rational& c);
AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y,
                        const OrbitTable& orbits);

std::string to_string(const AlgebraElement& element);

// Generator images of a degree -1 derivation. Generators without an image
// map to zero.
struct DifferentialData {
  int n = 2;
  std::map<OrbitKey, AlgebraElement> images;
};

// Generators must be good orbits of the declared ambient dimension, and every
// image term must have grading exactly one below its generator.
void validate_differential(const DifferentialData& d, const OrbitTable& orbits);

// The unique graded derivation extending the images:
// d(uv) = d(u) v + (-1)^{|u|} u d(v).
AlgebraElement apply_differential(const DifferentialData& d,
                                  const AlgebraElement& x,
                                  const OrbitTable& orbits);

// Nonzero residuals of d(d(generator)), empty iff d squares to zero on the
// whole algebra.
std::vector<std::pair<OrbitKey, AlgebraElement>> verify_d_squared(
    const DifferentialData& d, const OrbitTable& orbits);

}  // namespace sft
