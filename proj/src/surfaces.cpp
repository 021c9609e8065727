#include "sft/surfaces.hpp"

#include <string>

#include "sft/errors.hpp"

namespace sft {
namespace {

void check_shape(const DecoratedSurface& surface) {
  if (surface.genus < 0) fail(Errc::bad_parameter, "surface genus must be >= 0");
  if (surface.n < 2)
    fail(Errc::bad_parameter, "ambient half-dimension n must be >= 2");
}

int mu_sum(const std::vector<Puncture>& punctures, const OrbitTable& orbits) {
  int sum = 0;
  for (const auto& p : punctures) sum += orbits.at(p.orbit).mu;
  return sum;
}

}  // namespace

int euler_characteristic(const DecoratedSurface& surface) {
  check_shape(surface);
  return 2 - 2 * surface.genus;
}

void validate_surface(const DecoratedSurface& surface, const OrbitTable& orbits) {
  check_shape(surface);
  auto check_list = [&](const std::vector<Puncture>& punctures) {
    for (const auto& p : punctures) {
      const OrbitInfo& info = orbits.at(p.orbit);
      if (info.n != surface.n)
        fail(Errc::mismatched_ambient,
             "orbit '" + to_string(p.orbit) + "' lives in n=" +
                 std::to_string(info.n) + ", surface has n=" +
                 std::to_string(surface.n));
      if (p.marker < 0 || p.marker >= info.multiplicity)
        fail(Errc::bad_parameter,
             "marker " + std::to_string(p.marker) + " out of range for orbit '" +
                 to_string(p.orbit) + "'");
    }
  };
  check_list(surface.positives);
  check_list(surface.negatives);
}

int fredholm_index(const DecoratedSurface& surface, const OrbitTable& orbits) {
  validate_surface(surface, orbits);
  const int n = surface.n;
  int index = n * euler_characteristic(surface) + 2 * surface.chern;
  for (const auto& p : surface.positives) index += orbits.at(p.orbit).mu - (n - 1);
  for (const auto& p : surface.negatives) index -= orbits.at(p.orbit).mu + (n - 1);
  return index;
}

int moduli_dimension(const DecoratedSurface& surface, const OrbitTable& orbits) {
  validate_surface(surface, orbits);
  const int punctures = static_cast<int>(surface.positives.size()) +
                        static_cast<int>(surface.negatives.size());
  return mu_sum(surface.positives, orbits) - mu_sum(surface.negatives, orbits) +
         (surface.n - 3) * (euler_characteristic(surface) - punctures) +
         2 * surface.chern;
}

DecoratedSurface glue_surfaces(const DecoratedSurface& top,
                               const DecoratedSurface& bottom, int t) {
  check_shape(top);
  check_shape(bottom);
  if (top.n != bottom.n)
    fail(Errc::mismatched_ambient,
         "cannot glue surfaces with n=" + std::to_string(top.n) + " and n=" +
             std::to_string(bottom.n));
  const int s_neg = static_cast<int>(top.negatives.size());
  const int s_pos = static_cast<int>(bottom.positives.size());
  if (t < 1 || t > s_neg || t > s_pos)
    fail(Errc::bad_arity,
         "gluing arity t=" + std::to_string(t) + " out of range [1, min(" +
             std::to_string(s_neg) + ", " + std::to_string(s_pos) + ")]");

  // neck m joins top's negative s_neg+1-m to bottom's positive m (1-based)
  for (int m = 1; m <= t; ++m) {
    const Puncture& upper = top.negatives[s_neg - m];
    const Puncture& lower = bottom.positives[m - 1];
    if (upper != lower)
      fail(Errc::mismatched_orbits,
           "neck " + std::to_string(m) + " joins '" + to_string(upper.orbit) +
               "' (marker " + std::to_string(upper.marker) + ") to '" +
               to_string(lower.orbit) + "' (marker " +
               std::to_string(lower.marker) + ")");
  }

  DecoratedSurface glued;
  glued.genus = top.genus + bottom.genus + t - 1;
  glued.n = top.n;
  glued.chern = top.chern + bottom.chern;
  glued.positives = top.positives;
  glued.positives.insert(glued.positives.end(), bottom.positives.begin() + t,
                         bottom.positives.end());
  glued.negatives.assign(top.negatives.begin(), top.negatives.end() - t);
  glued.negatives.insert(glued.negatives.end(), bottom.negatives.begin(),
                         bottom.negatives.end());
  return glued;
}

}  // namespace sft
