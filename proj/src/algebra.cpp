#include "sft/algebra.hpp"

#include <algorithm>
#include <string>

#include "sft/errors.hpp"

namespace sft {

void AlgebraElement::add_term(const Monomial& monomial,
                              const Rational& coefficient) {
  if (coefficient.is_zero()) return;
  auto [it, fresh] = terms.emplace(monomial, coefficient);
  if (!fresh) {
    it->second = it->second + coefficient;
    if (it->second.is_zero()) terms.erase(it);
  }
}

AlgebraElement algebra_zero() { return {}; }

AlgebraElement algebra_one() {
  AlgebraElement e;
  e.add_term(Monomial{}, Rational{1, 1});
  return e;
}

AlgebraElement algebra_generator(const OrbitKey& key, const OrbitTable& orbits) {
  if (!orbits.at(key).good)
    fail(Errc::bad_orbit_generator,
         "orbit '" + to_string(key) + "' is bad and cannot generate");
  AlgebraElement e;
  e.add_term(Monomial{{key}}, Rational{1, 1});
  return e;
}

NormalizedMonomial normalize(const std::vector<OrbitKey>& factors,
                             const OrbitTable& orbits) {
  std::vector<OrbitKey> sorted = factors;
  std::vector<int> parity(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const OrbitInfo& info = orbits.at(sorted[i]);
    if (!info.good)
      fail(Errc::bad_orbit_generator,
           "orbit '" + to_string(sorted[i]) + "' is bad and cannot generate");
    parity[i] = info.grading % 2 != 0;
  }
  // stable insertion sort; each adjacent transposition of two odd factors
  // flips the sign (Koszul rule)
  int sign = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    for (std::size_t j = i; j > 0 && sorted[j] < sorted[j - 1]; --j) {
      if (parity[j] && parity[j - 1]) sign = -sign;
      std::swap(sorted[j], sorted[j - 1]);
      std::swap(parity[j], parity[j - 1]);
    }
  }
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (parity[i] && sorted[i] == sorted[i + 1])
      return NormalizedMonomial{Monomial{}, 0};
  return NormalizedMonomial{Monomial{std::move(sorted)}, sign};
}

long long monomial_grading(const Monomial& monomial, const OrbitTable& orbits) {
  long long sum = 0;
  for (const auto& key : monomial.factors) sum += orbits.at(key).grading;
  return sum;
}

AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y) {
  AlgebraElement result = x;
  for (const auto& [monomial, coefficient] : y.terms)
    result.add_term(monomial, coefficient);
  return result;
}

AlgebraElement scale(const AlgebraElement& x, const Rational& c) {
  AlgebraElement result;
  if (c.is_zero()) return result;
  for (const auto& [monomial, coefficient] : x.terms)
    result.add_term(monomial, coefficient * c);
  return result;
}

AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y,
                        const OrbitTable& orbits) {
  AlgebraElement result;
  for (const auto& [mx, cx] : x.terms) {
    for (const auto& [my, cy] : y.terms) {
      std::vector<OrbitKey> joined = mx.factors;
      joined.insert(joined.end(), my.factors.begin(), my.factors.end());
      NormalizedMonomial norm = normalize(joined, orbits);
      if (norm.sign == 0) continue;
      result.add_term(norm.monomial,
                      cx * cy * Rational{norm.sign, 1});
    }
  }
  return result;
}

std::string to_string(const AlgebraElement& element) {
  if (element.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [monomial, coefficient] : element.terms) {
    Rational c = coefficient;
    if (first) {
      if (c.num < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += c.num < 0 ? " - " : " + ";
      if (c.num < 0) c = -c;
    }
    out += c.to_string();
    for (const auto& key : monomial.factors) out += "*" + to_string(key);
    first = false;
  }
  return out;
}

void validate_differential(const DifferentialData& d, const OrbitTable& orbits) {
  for (const auto& [generator, image] : d.images) {
    const OrbitInfo& info = orbits.at(generator);
    if (!info.good)
      fail(Errc::bad_orbit_generator,
           "orbit '" + to_string(generator) + "' is bad and cannot generate");
    if (info.n != d.n)
      fail(Errc::mismatched_ambient,
           "generator '" + to_string(generator) + "' lives in n=" +
               std::to_string(info.n) + ", differential declares n=" +
               std::to_string(d.n));
    for (const auto& [monomial, coefficient] : image.terms) {
      (void)coefficient;
      if (monomial_grading(monomial, orbits) != info.grading - 1)
        fail(Errc::grading_violation,
             "image term of '" + to_string(generator) +
                 "' does not have grading " + std::to_string(info.grading - 1));
    }
  }
}

AlgebraElement apply_differential(const DifferentialData& d,
                                  const AlgebraElement& x,
                                  const OrbitTable& orbits) {
  AlgebraElement result;
  for (const auto& [monomial, coefficient] : x.terms) {
    long long passed_grading = 0;
    for (std::size_t i = 0; i < monomial.factors.size(); ++i) {
      const OrbitKey& factor = monomial.factors[i];
      auto it = d.images.find(factor);
      if (it != d.images.end() && !it->second.is_zero()) {
        AlgebraElement piece;
        piece.add_term(
            Monomial{{monomial.factors.begin(),
                      monomial.factors.begin() + static_cast<long>(i)}},
            coefficient * Rational{passed_grading % 2 == 0 ? 1 : -1, 1});
        piece = multiply(piece, it->second, orbits);
        AlgebraElement suffix;
        suffix.add_term(
            Monomial{{monomial.factors.begin() + static_cast<long>(i) + 1,
                      monomial.factors.end()}},
            Rational{1, 1});
        result = add(result, multiply(piece, suffix, orbits));
      }
      passed_grading += orbits.at(factor).grading;
    }
  }
  return result;
}

std::vector<std::pair<OrbitKey, AlgebraElement>> verify_d_squared(
    const DifferentialData& d, const OrbitTable& orbits) {
  validate_differential(d, orbits);
  std::vector<std::pair<OrbitKey, AlgebraElement>> residuals;
  for (const auto& [generator, image] : d.images) {
    AlgebraElement dd = apply_differential(d, image, orbits);
    if (!dd.is_zero()) residuals.emplace_back(generator, std::move(dd));
  }
  return residuals;
}

}  // namespace sft
