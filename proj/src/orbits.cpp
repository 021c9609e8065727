#include "sft/orbits.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "sft/errors.hpp"
#include "sft/maslov.hpp"

namespace sft {
namespace {

void check_multiplicity(const OrbitDescriptor& orbit) {
  if (orbit.multiplicity < 1)
    fail(Errc::bad_parameter, "orbit multiplicity must be at least 1");
}

// Covers of a nondegenerate orbit must themselves be nondegenerate up to the
// requested multiplicity; a degenerate intermediate cover is caller error.
void check_covers(const OrbitDescriptor& orbit, double tol) {
  for (int k = 1; k <= orbit.multiplicity; ++k) {
    if (!is_nondegenerate(iterate(orbit.simple_path, k), tol))
      fail(Errc::degenerate_endpoint,
           "orbit '" + orbit.id + "': cover " + std::to_string(k) +
               " is degenerate");
  }
}

}  // namespace

int cz_index(const OrbitDescriptor& orbit, double tol) {
  check_multiplicity(orbit);
  return maslov_index_rs(iterate(orbit.simple_path, orbit.multiplicity), tol);
}

int grading(const OrbitDescriptor& orbit, int n, double tol) {
  if (n < 2) fail(Errc::bad_parameter, "ambient half-dimension n must be >= 2");
  return cz_index(orbit, tol) + n - 3;
}

OrbitClass classify(const OrbitDescriptor& orbit, double tol) {
  check_multiplicity(orbit);
  if (orbit.multiplicity == 1) return OrbitClass::good;
  const int mu_1 = maslov_index_rs(orbit.simple_path, tol);
  const int mu_m = cz_index(orbit, tol);
  const bool bad = (mu_m - mu_1) % 2 != 0;
  if (bad && orbit.multiplicity % 2 != 0)
    fail(Errc::internal_inconsistency,
         "orbit '" + orbit.id + "': odd cover classified bad");
  return bad ? OrbitClass::bad : OrbitClass::good;
}

std::string to_string(const OrbitKey& key) {
  return key.id + "@" + std::to_string(key.multiplicity);
}

const OrbitInfo& OrbitTable::at(const OrbitKey& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    fail(Errc::unresolved_reference,
         "orbit '" + to_string(key) + "' is not registered");
  return it->second;
}

OrbitTable build_orbit_table(const std::vector<OrbitDescriptor>& orbits,
                             double tol) {
  OrbitTable table;
  std::map<std::string, const SymplecticPath*> family_path;
  for (const auto& orbit : orbits) {
    check_multiplicity(orbit);
    const OrbitKey key{orbit.id, orbit.multiplicity};
    if (table.entries.count(key))
      fail(Errc::inconsistent_family,
           "orbit '" + to_string(key) + "' is declared twice");
    auto [it, fresh] = family_path.emplace(orbit.id, &orbit.simple_path);
    if (!fresh && !(*it->second == orbit.simple_path))
      fail(Errc::inconsistent_family,
           "orbit family '" + orbit.id + "' has conflicting simple paths");
    check_covers(orbit, tol);
    OrbitInfo info;
    info.multiplicity = orbit.multiplicity;
    info.mu = cz_index(orbit, tol);
    info.n = orbit.simple_path.dim / 2 + 1;
    info.grading = info.mu + info.n - 3;
    info.good = classify(orbit, tol) == OrbitClass::good;
    table.entries.emplace(key, info);
  }
  return table;
}

std::vector<ChoiceRequirement> orientation_choice_set(
    const std::vector<OrbitDescriptor>& orbits, int n, double tol) {
  if (n < 2) fail(Errc::bad_parameter, "ambient half-dimension n must be >= 2");

  // group covers by simple-orbit id, preserving first-seen family order
  std::vector<std::string> order;
  std::map<std::string, std::vector<const OrbitDescriptor*>> families;
  std::map<std::string, const SymplecticPath*> family_path;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& orbit : orbits) {
    check_multiplicity(orbit);
    if (!seen.insert({orbit.id, orbit.multiplicity}).second)
      fail(Errc::inconsistent_family,
           "orbit '" + to_string(OrbitKey{orbit.id, orbit.multiplicity}) +
               "' is declared twice");
    auto [it, fresh] = family_path.emplace(orbit.id, &orbit.simple_path);
    if (!fresh && !(*it->second == orbit.simple_path))
      fail(Errc::inconsistent_family,
           "orbit family '" + orbit.id + "' has conflicting simple paths");
    if (!families.count(orbit.id)) order.push_back(orbit.id);
    families[orbit.id].push_back(&orbit);
  }

  std::vector<ChoiceRequirement> result;
  for (const auto& id : order) {
    const auto& members = families[id];
    bool has_even = false;
    bool all_even_good = true;
    for (const OrbitDescriptor* orbit : members) {
      if (orbit->multiplicity % 2 == 0) {
        has_even = true;
        if (classify(*orbit, tol) == OrbitClass::bad) all_even_good = false;
      }
    }
    // A choice on the simple orbit always induces choices on odd covers. Even
    // covers need a second choice, except in the lowest ambient dimension,
    // where the simple choice already induces orientations on good even
    // covers (and bad ones carry none at all).
    bool need_double;
    if (n > 2)
      need_double = has_even;
    else
      need_double = has_even && !all_even_good;
    ChoiceRequirement req;
    req.id = id;
    req.multiplicities = need_double ? std::vector<int>{1, 2}
                                     : std::vector<int>{1};
    result.push_back(std::move(req));
  }
  return result;
}

}  // namespace sft
