#pragma once

#include <stdexcept>
#include <string>

namespace sft {

// One code per distinct failure condition. Codes up to unresolved_reference
// describe malformed input (CLI exit 2); the rest are domain errors (exit 1).
enum class Errc {
  usage,
  file_not_found,
  parse_error,
  schema_error,
  unresolved_reference,
  bad_parameter,
  symplectic_violation,
  coarse_samples,
  degenerate_endpoint,
  irregular_crossing,
  unresolved_crossing,
  internal_inconsistency,
  inconsistent_family,
  mismatched_orbits,
  mismatched_ambient,
  bad_arity,
  bad_orbit_generator,
  grading_violation,
  union_convention,
  d_squared_failure,
};

inline const char* code_name(Errc c) {
  switch (c) {
    case Errc::usage: return "E_USAGE";
    case Errc::file_not_found: return "E_FILE_NOT_FOUND";
    case Errc::parse_error: return "E_PARSE";
    case Errc::schema_error: return "E_SCHEMA";
    case Errc::unresolved_reference: return "E_UNRESOLVED_REFERENCE";
    case Errc::bad_parameter: return "E_BAD_PARAMETER";
    case Errc::symplectic_violation: return "E_SYMPLECTIC_VIOLATION";
    case Errc::coarse_samples: return "E_COARSE_SAMPLES";
    case Errc::degenerate_endpoint: return "E_DEGENERATE_ENDPOINT";
    case Errc::irregular_crossing: return "E_IRREGULAR_CROSSING";
    case Errc::unresolved_crossing: return "E_UNRESOLVED_CROSSING";
    case Errc::internal_inconsistency: return "E_INTERNAL_INCONSISTENCY";
    case Errc::inconsistent_family: return "E_INCONSISTENT_FAMILY";
    case Errc::mismatched_orbits: return "E_MISMATCHED_ORBITS";
    case Errc::mismatched_ambient: return "E_MISMATCHED_AMBIENT";
    case Errc::bad_arity: return "E_BAD_ARITY";
    case Errc::bad_orbit_generator: return "E_BAD_ORBIT_GENERATOR";
    case Errc::grading_violation: return "E_GRADING_VIOLATION";
    case Errc::union_convention: return "E_UNION_CONVENTION";
    case Errc::d_squared_failure: return "E_D_SQUARED";
  }
  return "E_UNKNOWN";
}

inline bool is_input_error(Errc c) {
  switch (c) {
    case Errc::usage:
    case Errc::file_not_found:
    case Errc::parse_error:
    case Errc::schema_error:
    case Errc::unresolved_reference:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace sft
