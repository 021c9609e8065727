#include "sft/document.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sft/errors.hpp"

namespace sft {
namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& context, const std::string& what) {
  fail(Errc::schema_error, context + ": " + what);
}

void check_fields(const json& obj, const std::set<std::string>& allowed,
                  const std::string& context) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      schema(context, "unknown field '" + it.key() + "'");
}

const json& require(const json& obj, const char* key,
                    const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(context, std::string("missing field '") + key + "'");
  return *it;
}

int as_int(const json& v, const std::string& context) {
  if (!v.is_number_integer())
    schema(context, "expected an integer, got " + std::string(v.type_name()));
  return v.get<int>();
}

double as_number(const json& v, const std::string& context) {
  if (!v.is_number())
    schema(context, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& context) {
  if (!v.is_string())
    schema(context, "expected a string, got " + std::string(v.type_name()));
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& context) {
  if (!v.is_array())
    schema(context, "expected an array, got " + std::string(v.type_name()));
  return v;
}

const json& as_object(const json& v, const std::string& context) {
  if (!v.is_object())
    schema(context, "expected an object, got " + std::string(v.type_name()));
  return v;
}

std::vector<std::string> as_string_list(const json& v,
                                        const std::string& context) {
  std::vector<std::string> out;
  for (const auto& item : as_array(v, context))
    out.push_back(as_string(item, context));
  return out;
}

std::vector<int> as_int_list(const json& v, const std::string& context) {
  std::vector<int> out;
  for (const auto& item : as_array(v, context))
    out.push_back(as_int(item, context));
  return out;
}

// --- path expression grammar ---------------------------------------------

class ExprParser {
 public:
  ExprParser(const std::string& text,
             const std::function<SymplecticPath(const std::string&)>& lookup,
             const std::string& context)
      : text_(text), lookup_(lookup), context_(context) {}

  SymplecticPath parse() {
    SymplecticPath p = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) syntax("trailing input after expression");
    return p;
  }

 private:
  [[noreturn]] void syntax(const std::string& what) const {
    fail(Errc::parse_error,
         context_ + ": " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) syntax(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) syntax("expected a name");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) syntax("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return value;
  }

  int integer() {
    const double v = number();
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) syntax("expected an integer");
    return i;
  }

  SymplecticPath parse_expr() {
    skip_ws();
    if (pos_ >= text_.size() ||
        !(std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
          text_[pos_] == '_'))
      syntax("expected a constructor or path name");
    const std::string name = ident();
    if (name == "rotation" || name == "pos_hyp" || name == "neg_hyp" ||
        name == "shear") {
      expect('(');
      const double a = number();
      expect(')');
      if (name == "rotation") return rotation(a);
      if (name == "pos_hyp") return positive_hyperbolic(a);
      if (name == "neg_hyp") return negative_hyperbolic(a);
      return shear(a);
    }
    if (name == "sum" || name == "concat") {
      expect('(');
      std::vector<SymplecticPath> parts;
      parts.push_back(parse_expr());
      while (eat(',')) parts.push_back(parse_expr());
      expect(')');
      return name == "sum" ? direct_sum(std::move(parts))
                           : concatenate(std::move(parts));
    }
    if (name == "twist") {
      expect('(');
      SymplecticPath base = parse_expr();
      expect(',');
      const double delta = number();
      expect(',');
      skip_ws();
      Orientation orient;
      if (eat('+'))
        orient = Orientation::positive_puncture;
      else if (eat('-'))
        orient = Orientation::negative_puncture;
      else
        syntax("expected '+' or '-'");
      expect(')');
      return twist(base, delta, orient);
    }
    if (name == "iterate") {
      expect('(');
      SymplecticPath base = parse_expr();
      expect(',');
      const int m = integer();
      expect(')');
      return iterate(base, m);
    }
    return lookup_(name);
  }

  const std::string& text_;
  const std::function<SymplecticPath(const std::string&)>& lookup_;
  std::string context_;
  std::size_t pos_ = 0;
};

// --- sections --------------------------------------------------------------

SymplecticPath parse_table_body(const json& obj, const std::string& context) {
  check_fields(obj, {"times", "matrices", "tol"}, context);
  std::vector<double> times;
  for (const auto& t : as_array(require(obj, "times", context), context + ".times"))
    times.push_back(as_number(t, context + ".times"));
  const json& rows = as_array(require(obj, "matrices", context), context + ".matrices");
  std::vector<Mat> mats;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string mctx = context + ".matrices[" + std::to_string(i) + "]";
    const json& row = as_array(rows[i], mctx);
    int dim = 0;
    while (dim * dim < static_cast<int>(row.size())) ++dim;
    if (dim * dim != static_cast<int>(row.size()) || dim == 0 || dim % 2 != 0)
      schema(mctx, "entry count is not an even square");
    Mat m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        m(r, c) = as_number(row[static_cast<std::size_t>(r * dim + c)], mctx);
    mats.push_back(std::move(m));
  }
  double tol = kSymplecticTol;
  if (auto it = obj.find("tol"); it != obj.end()) {
    tol = as_number(*it, context + ".tol");
    if (tol <= 0) schema(context + ".tol", "tolerance must be positive");
  }
  return sample_table(std::move(times), std::move(mats), tol);
}

std::map<std::string, SymplecticPath> parse_paths(const json& section) {
  std::map<std::string, SymplecticPath> done;
  std::set<std::string> in_progress;

  std::function<SymplecticPath(const std::string&)> resolve =
      [&](const std::string& name) -> SymplecticPath {
    auto hit = done.find(name);
    if (hit != done.end()) return hit->second;
    auto it = section.find(name);
    if (it == section.end())
      fail(Errc::unresolved_reference, "path '" + name + "' is not declared");
    if (!in_progress.insert(name).second)
      fail(Errc::unresolved_reference,
           "path '" + name + "' is defined in terms of itself");
    const std::string context = "paths." + name;
    SymplecticPath p = [&] {
      if (it->is_string()) {
        ExprParser parser(it->get_ref<const std::string&>(), resolve, context);
        return parser.parse();
      }
      return parse_table_body(as_object(*it, context), context);
    }();
    in_progress.erase(name);
    done.emplace(name, p);
    return p;
  };

  for (auto it = section.begin(); it != section.end(); ++it) resolve(it.key());
  return done;
}

void parse_orbits(const json& section, Document& doc) {
  for (std::size_t i = 0; i < section.size(); ++i) {
    const std::string context = "orbits[" + std::to_string(i) + "]";
    const json& entry = as_object(section[i], context);
    check_fields(entry, {"id", "path", "multiplicity", "action"}, context);
    OrbitDescriptor orbit;
    orbit.id = as_string(require(entry, "id", context), context + ".id");
    if (orbit.id.empty() || orbit.id.find('@') != std::string::npos)
      schema(context + ".id", "orbit id must be nonempty and free of '@'");
    const std::string ref =
        as_string(require(entry, "path", context), context + ".path");
    auto path = doc.paths.find(ref);
    if (path == doc.paths.end())
      fail(Errc::unresolved_reference,
           context + ": path '" + ref + "' is not declared");
    orbit.simple_path = path->second;
    orbit.multiplicity = as_int(require(entry, "multiplicity", context),
                                context + ".multiplicity");
    if (orbit.multiplicity < 1)
      schema(context + ".multiplicity", "multiplicity must be at least 1");
    if (auto it = entry.find("action"); it != entry.end()) {
      const double action = as_number(*it, context + ".action");
      if (action <= 0) schema(context + ".action", "action must be positive");
      orbit.action = action;
    }
    for (const auto& other : doc.orbits) {
      if (other.id != orbit.id) continue;
      if (other.multiplicity == orbit.multiplicity)
        fail(Errc::inconsistent_family,
             "orbit '" + orbit.id + "@" + std::to_string(orbit.multiplicity) +
                 "' is declared twice");
      if (!(other.simple_path == orbit.simple_path))
        fail(Errc::inconsistent_family,
             "orbit family '" + orbit.id + "' has conflicting simple paths");
    }
    doc.orbits.push_back(std::move(orbit));
  }
}

Puncture parse_puncture(const json& v, const Document& doc,
                        const std::string& context) {
  const json& entry = as_object(v, context);
  check_fields(entry, {"orbit", "marker"}, context);
  Puncture p;
  p.orbit = doc.resolve_orbit_ref(
      as_string(require(entry, "orbit", context), context + ".orbit"));
  if (auto it = entry.find("marker"); it != entry.end())
    p.marker = as_int(*it, context + ".marker");
  const OrbitDescriptor* orbit = doc.find_orbit(p.orbit);
  if (p.marker < 0 || p.marker >= orbit->multiplicity)
    schema(context + ".marker",
           "marker must lie in 0.." + std::to_string(orbit->multiplicity - 1));
  return p;
}

void parse_surfaces(const json& section, Document& doc) {
  for (auto it = section.begin(); it != section.end(); ++it) {
    const std::string context = "surfaces." + it.key();
    const json& entry = as_object(*it, context);
    check_fields(entry, {"genus", "n", "chern", "positives", "negatives"},
                 context);
    DecoratedSurface s;
    s.genus = as_int(require(entry, "genus", context), context + ".genus");
    if (s.genus < 0) schema(context + ".genus", "genus must be >= 0");
    s.n = as_int(require(entry, "n", context), context + ".n");
    if (s.n < 2) schema(context + ".n", "ambient half-dimension must be >= 2");
    if (auto f = entry.find("chern"); f != entry.end())
      s.chern = as_int(*f, context + ".chern");
    auto read_side = [&](const char* key, std::vector<Puncture>& out) {
      auto f = entry.find(key);
      if (f == entry.end()) return;
      const json& list = as_array(*f, context + "." + key);
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string pctx =
            context + "." + key + "[" + std::to_string(i) + "]";
        Puncture p = parse_puncture(list[i], doc, pctx);
        const OrbitDescriptor* orbit = doc.find_orbit(p.orbit);
        if (orbit->simple_path.dim != 2 * s.n - 2)
          schema(pctx, "orbit '" + to_string(p.orbit) + "' has path dimension " +
                           std::to_string(orbit->simple_path.dim) +
                           ", surface needs " + std::to_string(2 * s.n - 2));
        out.push_back(p);
      }
    };
    read_side("positives", s.positives);
    read_side("negatives", s.negatives);
    doc.surfaces.emplace(it.key(), std::move(s));
  }
}

void require_surface(const Document& doc, const std::string& name,
                     const std::string& context) {
  if (!doc.surfaces.count(name))
    fail(Errc::unresolved_reference,
         context + ": surface '" + name + "' is not declared");
}

void parse_scenarios(const json& section, Document& doc) {
  for (auto it = section.begin(); it != section.end(); ++it) {
    const std::string context = "scenarios." + it.key();
    const json& entry = as_object(*it, context);
    const std::string kind =
        as_string(require(entry, "kind", context), context + ".kind");
    Scenario sc;
    auto read_side = [&]() {
      const std::string side =
          as_string(require(entry, "side", context), context + ".side");
      if (side != "positive" && side != "negative")
        schema(context + ".side", "side must be 'positive' or 'negative'");
      sc.positive_side = side == "positive";
    };
    if (kind == "swap") {
      sc.kind = Scenario::Kind::swap;
      check_fields(entry, {"kind", "surface", "side", "position"}, context);
      sc.surface = as_string(require(entry, "surface", context), context);
      require_surface(doc, sc.surface, context);
      read_side();
      sc.position = as_int(require(entry, "position", context),
                           context + ".position");
    } else if (kind == "permute") {
      sc.kind = Scenario::Kind::permute;
      check_fields(entry, {"kind", "surface", "positive", "negative"}, context);
      sc.surface = as_string(require(entry, "surface", context), context);
      require_surface(doc, sc.surface, context);
      if (auto f = entry.find("positive"); f != entry.end())
        sc.perm_pos = as_int_list(*f, context + ".positive");
      if (auto f = entry.find("negative"); f != entry.end())
        sc.perm_neg = as_int_list(*f, context + ".negative");
    } else if (kind == "union") {
      sc.kind = Scenario::Kind::join;
      check_fields(entry, {"kind", "first", "second"}, context);
      sc.first = as_string_list(require(entry, "first", context),
                                context + ".first");
      sc.second = as_string_list(require(entry, "second", context),
                                 context + ".second");
      for (const auto& name : sc.first) require_surface(doc, name, context);
      for (const auto& name : sc.second) require_surface(doc, name, context);
    } else if (kind == "glue") {
      sc.kind = Scenario::Kind::glue;
      check_fields(entry,
                   {"kind", "top", "bottom", "t", "top_config", "bottom_config"},
                   context);
      sc.top = as_string(require(entry, "top", context), context + ".top");
      sc.bottom =
          as_string(require(entry, "bottom", context), context + ".bottom");
      require_surface(doc, sc.top, context);
      require_surface(doc, sc.bottom, context);
      sc.necks = as_int(require(entry, "t", context), context + ".t");
      if (auto f = entry.find("top_config"); f != entry.end()) {
        sc.top_config = as_string_list(*f, context + ".top_config");
        for (const auto& name : sc.top_config)
          require_surface(doc, name, context);
      }
      if (auto f = entry.find("bottom_config"); f != entry.end()) {
        sc.bottom_config = as_string_list(*f, context + ".bottom_config");
        for (const auto& name : sc.bottom_config)
          require_surface(doc, name, context);
      }
    } else if (kind == "rotate_marker") {
      sc.kind = Scenario::Kind::rotate_marker;
      check_fields(entry, {"kind", "surface", "side", "position", "j"}, context);
      sc.surface = as_string(require(entry, "surface", context), context);
      require_surface(doc, sc.surface, context);
      read_side();
      sc.position = as_int(require(entry, "position", context),
                           context + ".position");
      sc.steps = as_int(require(entry, "j", context), context + ".j");
    } else if (kind == "choices") {
      sc.kind = Scenario::Kind::choices;
      check_fields(entry, {"kind", "family", "n"}, context);
      sc.family = as_string_list(require(entry, "family", context),
                                 context + ".family");
      sc.n = as_int(require(entry, "n", context), context + ".n");
      for (const auto& id : sc.family) {
        bool found = false;
        for (const auto& orbit : doc.orbits) found |= orbit.id == id;
        if (!found)
          fail(Errc::unresolved_reference,
               context + ": no orbit with id '" + id + "' is declared");
      }
    } else {
      schema(context + ".kind", "unknown scenario kind '" + kind + "'");
    }
    doc.scenarios.emplace(it.key(), std::move(sc));
  }
}

Rational parse_rational(const std::string& text, const std::string& context) {
  const auto slash = text.find('/');
  auto parse_part = [&](const std::string& part) -> std::int64_t {
    std::int64_t value = 0;
    const char* begin = part.data();
    const char* end = part.data() + part.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      schema(context, "invalid rational literal '" + text + "'");
    return value;
  };
  const std::int64_t num =
      parse_part(slash == std::string::npos ? text : text.substr(0, slash));
  std::int64_t den = 1;
  if (slash != std::string::npos) {
    den = parse_part(text.substr(slash + 1));
    if (den == 0) schema(context, "rational denominator is zero");
  }
  return Rational::make(num, den);
}

void parse_differential(const json& section, Document& doc) {
  const std::string context = "differential";
  const json& entry = as_object(section, context);
  check_fields(entry, {"n", "images"}, context);
  Document::DifferentialSection diff;
  diff.n = as_int(require(entry, "n", context), context + ".n");
  if (diff.n < 2) schema(context + ".n", "ambient half-dimension must be >= 2");
  const json& images = as_object(require(entry, "images", context),
                                 context + ".images");
  for (auto it = images.begin(); it != images.end(); ++it) {
    const std::string gctx = context + ".images." + it.key();
    const OrbitKey generator = doc.resolve_orbit_ref(it.key());
    std::vector<Document::DifferentialTerm> terms;
    for (std::size_t i = 0; i < as_array(*it, gctx).size(); ++i) {
      const std::string tctx = gctx + "[" + std::to_string(i) + "]";
      const json& term = as_object((*it)[i], tctx);
      check_fields(term, {"monomial", "coefficient"}, tctx);
      Document::DifferentialTerm out;
      for (const auto& ref :
           as_array(require(term, "monomial", tctx), tctx + ".monomial"))
        out.monomial.push_back(
            doc.resolve_orbit_ref(as_string(ref, tctx + ".monomial")));
      out.coefficient = parse_rational(
          as_string(require(term, "coefficient", tctx), tctx + ".coefficient"),
          tctx + ".coefficient");
      terms.push_back(std::move(out));
    }
    diff.images.emplace_back(generator, std::move(terms));
  }
  doc.differential = std::move(diff);
}

}  // namespace

OrbitKey Document::resolve_orbit_ref(const std::string& ref) const {
  const auto at = ref.find('@');
  if (at == std::string::npos) {
    int multiplicity = 0;
    int hits = 0;
    for (const auto& orbit : orbits) {
      if (orbit.id == ref) {
        ++hits;
        multiplicity = orbit.multiplicity;
      }
    }
    if (hits == 0)
      fail(Errc::unresolved_reference, "orbit '" + ref + "' is not declared");
    if (hits > 1)
      fail(Errc::schema_error, "orbit reference '" + ref +
                                   "' is ambiguous; use '" + ref + "@m'");
    return OrbitKey{ref, multiplicity};
  }
  const std::string id = ref.substr(0, at);
  const std::string mtext = ref.substr(at + 1);
  int multiplicity = 0;
  auto [ptr, ec] = std::from_chars(mtext.data(), mtext.data() + mtext.size(),
                                   multiplicity);
  if (id.empty() || ec != std::errc() || ptr != mtext.data() + mtext.size() ||
      multiplicity < 1)
    fail(Errc::schema_error, "malformed orbit reference '" + ref + "'");
  const OrbitKey key{id, multiplicity};
  if (!find_orbit(key))
    fail(Errc::unresolved_reference,
         "orbit '" + to_string(key) + "' is not declared");
  return key;
}

const OrbitDescriptor* Document::find_orbit(const OrbitKey& key) const {
  for (const auto& orbit : orbits)
    if (orbit.id == key.id && orbit.multiplicity == key.multiplicity)
      return &orbit;
  return nullptr;
}

SymplecticPath parse_path_expression(
    const std::string& text, const std::map<std::string, SymplecticPath>& env) {
  std::function<SymplecticPath(const std::string&)> lookup =
      [&](const std::string& name) -> SymplecticPath {
    auto it = env.find(name);
    if (it == env.end())
      fail(Errc::unresolved_reference, "path '" + name + "' is not declared");
    return it->second;
  };
  ExprParser parser(text, lookup, "path expression");
  return parser.parse();
}

Document parse_document(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, origin + ": " + e.what());
  }
  if (!root.is_object())
    fail(Errc::schema_error, origin + ": document root must be an object");
  check_fields(root,
               {"version", "paths", "orbits", "surfaces", "scenarios",
                "differential"},
               origin);
  const json& version = require(root, "version", origin);
  if (!version.is_number_integer() || version.get<int>() != 1)
    fail(Errc::schema_error, origin + ": unsupported document version");

  Document doc;
  if (auto it = root.find("paths"); it != root.end())
    doc.paths = parse_paths(as_object(*it, "paths"));
  if (auto it = root.find("orbits"); it != root.end())
    parse_orbits(as_array(*it, "orbits"), doc);
  if (auto it = root.find("surfaces"); it != root.end())
    parse_surfaces(as_object(*it, "surfaces"), doc);
  if (auto it = root.find("scenarios"); it != root.end())
    parse_scenarios(as_object(*it, "scenarios"), doc);
  if (auto it = root.find("differential"); it != root.end())
    parse_differential(*it, doc);
  return doc;
}

Document load_document(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(Errc::file_not_found, "cannot open '" + file + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_document(buffer.str(), file);
}

}  // namespace sft
