#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sft/orbits.hpp"
#include "sft/path.hpp"
#include "sft/rational.hpp"
#include "sft/surfaces.hpp"

namespace sft {

// Batch request against the declared tables; parameters are kind-specific.
struct Scenario {
  enum class Kind { swap, permute, join, glue, rotate_marker, choices };
  Kind kind = Kind::swap;
  // swap / rotate_marker
  std::string surface;
  bool positive_side = false;
  int position = 0;
  int steps = 0;  // rotate_marker j
  // permute (original 1-based positions in new order; empty = identity)
  std::vector<int> perm_pos;
  std::vector<int> perm_neg;
  // join (disjoint union of two ordered configurations)
  std::vector<std::string> first;
  std::vector<std::string> second;
  // glue, optionally inside ambient configurations
  std::string top;
  std::string bottom;
  int necks = 0;
  std::vector<std::string> top_config;
  std::vector<std::string> bottom_config;
  // choices
  std::vector<std::string> family;
  int n = 0;
};

// Parsed and structurally validated document: all references resolve, markers
// are in range, declared families are consistent. Indices are NOT computed at
// load time; commands build an OrbitTable for the orbits they touch.
struct Document {
  std::map<std::string, SymplecticPath> paths;
  std::vector<OrbitDescriptor> orbits;
  std::map<std::string, DecoratedSurface> surfaces;
  std::map<std::string, Scenario> scenarios;

  struct DifferentialTerm {
    std::vector<OrbitKey> monomial;
    Rational coefficient;
  };
  struct DifferentialSection {
    int n = 2;
    std::vector<std::pair<OrbitKey, std::vector<DifferentialTerm>>> images;
  };
  std::optional<DifferentialSection> differential;

  // "id@m", or a bare id when only one multiplicity is declared for it
  OrbitKey resolve_orbit_ref(const std::string& ref) const;
  const OrbitDescriptor* find_orbit(const OrbitKey& key) const;
};

Document load_document(const std::string& file);
Document parse_document(const std::string& text, const std::string& origin);

// Expression grammar: rotation(theta), pos_hyp(a), neg_hyp(a), shear(s),
// sum(p1,p2,...), concat(p1,p2,...), twist(p, delta, +|-), iterate(p, m),
// and names of other declared paths.
SymplecticPath parse_path_expression(
    const std::string& text, const std::map<std::string, SymplecticPath>& env);

}  // namespace sft
