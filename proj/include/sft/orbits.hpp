#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sft/path.hpp"

namespace sft {

// A closed Reeb orbit: the linearized return map of the underlying simple
// orbit (as a symplectic path in a fixed trivialization) plus the covering
// multiplicity. Descriptors sharing an id describe covers of one simple
// orbit and must carry structurally identical paths.
struct OrbitDescriptor {
  std::string id;
  SymplecticPath simple_path;
  int multiplicity = 1;
  std::optional<double> action;  // metadata only, never used in computations
};

enum class OrbitClass { good, bad };

// Index of the multiplicity-fold cover of the simple path.
int cz_index(const OrbitDescriptor& orbit, double tol = kNondegTol);

// cz_index + n - 3; its parity drives every sign in the orientation calculus.
int grading(const OrbitDescriptor& orbit, int n, double tol = kNondegTol);

// Bad iff the index difference between the cover and the simple orbit is odd.
// Bad with odd multiplicity is impossible and reported as an internal error.
OrbitClass classify(const OrbitDescriptor& orbit, double tol = kNondegTol);

// Minimal set of per-family orientation choices: which multiplicities need an
// explicit choice so that every listed cover inherits an orientation.
struct ChoiceRequirement {
  std::string id;
  std::vector<int> multiplicities;
};
std::vector<ChoiceRequirement> orientation_choice_set(
    const std::vector<OrbitDescriptor>& orbits, int n, double tol = kNondegTol);

// (id, multiplicity) names one orbit; the ordering is the generator order of
// the algebra module.
struct OrbitKey {
  std::string id;
  int multiplicity = 1;
  auto operator<=>(const OrbitKey&) const = default;
};

std::string to_string(const OrbitKey& key);

struct OrbitInfo {
  int multiplicity = 1;
  int mu = 0;       // index of the multiplicity-fold cover
  int n = 2;        // ambient half-dimension, path dim = 2n-2
  int grading = 0;  // mu + n - 3
  bool good = true;
};

// Resolved, index-computed view of a set of descriptors.
struct OrbitTable {
  std::map<OrbitKey, OrbitInfo> entries;
  const OrbitInfo& at(const OrbitKey& key) const;
  bool contains(const OrbitKey& key) const { return entries.count(key) != 0; }
};

OrbitTable build_orbit_table(const std::vector<OrbitDescriptor>& orbits,
                             double tol = kNondegTol);

}  // namespace sft
