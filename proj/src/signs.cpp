#include "sft/signs.hpp"

#include <algorithm>
#include <string>

#include "sft/errors.hpp"

namespace sft {
namespace {

long long grading_of(const Puncture& p, const OrbitTable& orbits) {
  return orbits.at(p.orbit).grading;
}

long long grading_sum(const std::vector<Puncture>& punctures,
                      const OrbitTable& orbits) {
  long long sum = 0;
  for (const auto& p : punctures) sum += grading_of(p, orbits);
  return sum;
}

Sign swap_at(const std::vector<Puncture>& punctures, int pos,
             const OrbitTable& orbits, const char* side) {
  const int count = static_cast<int>(punctures.size());
  if (pos < 1 || pos + 1 > count)
    fail(Errc::bad_parameter, std::string("no adjacent pair of ") + side +
                                  " punctures at position " +
                                  std::to_string(pos));
  const long long a = grading_of(punctures[pos - 1], orbits);
  const long long b = grading_of(punctures[pos], orbits);
  return sign_from_exponent(a * b);
}

Sign list_permutation_sign(const std::vector<Puncture>& punctures,
                           const std::vector<int>& perm,
                           const OrbitTable& orbits) {
  const int count = static_cast<int>(punctures.size());
  if (static_cast<int>(perm.size()) != count)
    fail(Errc::bad_parameter, "permutation length does not match puncture count");
  std::vector<char> hit(count, 0);
  for (int v : perm) {
    if (v < 1 || v > count || hit[v - 1])
      fail(Errc::bad_parameter, "malformed permutation");
    hit[v - 1] = 1;
  }
  long long exponent = 0;
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j)
      if (perm[i] > perm[j])
        exponent += grading_of(punctures[perm[i] - 1], orbits) *
                    grading_of(punctures[perm[j] - 1], orbits);
  return sign_from_exponent(exponent);
}

}  // namespace

Sign swap_adjacent_negative(const DecoratedSurface& surface, int l,
                            const OrbitTable& orbits) {
  return swap_at(surface.negatives, l, orbits, "negative");
}

Sign swap_adjacent_positive(const DecoratedSurface& surface, int k,
                            const OrbitTable& orbits) {
  return swap_at(surface.positives, k, orbits, "positive");
}

Sign permutation_sign(const DecoratedSurface& surface,
                      const std::vector<int>& perm_pos,
                      const std::vector<int>& perm_neg,
                      const OrbitTable& orbits) {
  return list_permutation_sign(surface.positives, perm_pos, orbits) *
         list_permutation_sign(surface.negatives, perm_neg, orbits);
}

Sign union_sign(const Configuration& first, const Configuration& second,
                const OrbitTable& orbits) {
  int n = 0;
  for (const auto* config : {&first, &second}) {
    for (const auto& component : config->components) {
      if (n == 0) n = component.n;
      if (component.n != n)
        fail(Errc::mismatched_ambient,
             "disjoint union mixes ambient half-dimensions " +
                 std::to_string(n) + " and " + std::to_string(component.n));
    }
  }
  long long neg_first = 0;
  for (const auto& component : first.components)
    neg_first += grading_sum(component.negatives, orbits);
  long long pos_second = 0;
  for (const auto& component : second.components)
    pos_second += grading_sum(component.positives, orbits);
  return sign_from_exponent(neg_first * pos_second);
}

Sign glue_sign(const DecoratedSurface& top, const DecoratedSurface& bottom,
               int t, const OrbitTable& orbits) {
  glue_surfaces(top, bottom, t);  // validates arity and matchings
  const int s_neg = static_cast<int>(top.negatives.size());
  long long leftover = 0;
  for (int l = 0; l < s_neg - t; ++l)
    leftover += grading_of(top.negatives[l], orbits);
  long long extra = 0;
  for (std::size_t k = t; k < bottom.positives.size(); ++k)
    extra += grading_of(bottom.positives[k], orbits);
  return sign_from_exponent(leftover * extra);
}

Sign rotate_marker(const DecoratedSurface& surface, bool positive_side,
                   int position, int j, const OrbitTable& orbits) {
  const auto& punctures = positive_side ? surface.positives : surface.negatives;
  if (position < 1 || position > static_cast<int>(punctures.size()))
    fail(Errc::bad_parameter,
         "no " + std::string(positive_side ? "positive" : "negative") +
             " puncture at position " + std::to_string(position));
  const OrbitInfo& info = orbits.at(punctures[position - 1].orbit);
  if (info.good) return Sign{1};
  // bad orbits force even multiplicity, so j mod 2 is well defined on Z_m
  return sign_from_exponent(j);
}

}  // namespace sft
