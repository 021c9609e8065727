#include "sft/algebra.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "sft/errors.hpp"
#include "sft/signs.hpp"

using namespace sft;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::usage;
}

// n = 3, so gradings equal the indices: x odd, u and v even, p and q odd,
// z odd; w is a bad double cover
OrbitTable fixture_table() {
  OrbitTable t;
  testgen::put_orbit(t, "x", 1, 1, 3);
  testgen::put_orbit(t, "u", 1, 2, 3);
  testgen::put_orbit(t, "v", 1, 2, 3);
  testgen::put_orbit(t, "p", 1, 3, 3);
  testgen::put_orbit(t, "q", 1, 3, 3);
  testgen::put_orbit(t, "z", 1, 5, 3);
  testgen::put_orbit(t, "w", 2, 4, 3, /*good=*/false);
  return t;
}

AlgebraElement gen(const std::string& id, const OrbitTable& orbits) {
  return algebra_generator({id, 1}, orbits);
}

// d(u) = d(v) = x, d(p) = u - v, d(q) = u/2 - v/2, d(z) = uv - u^2/2 - v^2/2;
// squares to zero by cancellation through the Koszul signs
DifferentialData contact_fixture(const OrbitTable& orbits) {
  DifferentialData d;
  d.n = 3;
  const auto u = gen("u", orbits);
  const auto v = gen("v", orbits);
  d.images[{"u", 1}] = gen("x", orbits);
  d.images[{"v", 1}] = gen("x", orbits);
  d.images[{"p", 1}] = add(u, scale(v, Rational{-1, 1}));
  d.images[{"q", 1}] =
      add(scale(u, Rational{1, 2}), scale(v, Rational{-1, 2}));
  d.images[{"z", 1}] =
      add(multiply(u, v, orbits),
          add(scale(multiply(u, u, orbits), Rational{-1, 2}),
              scale(multiply(v, v, orbits), Rational{-1, 2})));
  return d;
}

AlgebraElement random_monomial(testgen::Rng& rng, const OrbitTable& orbits,
                               int max_len) {
  static const std::vector<std::string> pool = {"x", "u", "v", "p", "q"};
  AlgebraElement e = algebra_one();
  const int len = rng.range(0, max_len);
  for (int k = 0; k < len; ++k)
    e = multiply(e, gen(pool[rng.pick(static_cast<int>(pool.size()))], orbits),
                 orbits);
  return e;
}

AlgebraElement random_element(testgen::Rng& rng, const OrbitTable& orbits) {
  static const Rational coeffs[] = {
      {1, 1}, {-1, 1}, {1, 2}, {3, 1}, {-2, 3}};
  AlgebraElement e;
  const int terms = rng.range(1, 2);
  for (int i = 0; i < terms; ++i)
    e = add(e, scale(random_monomial(rng, orbits, 2), coeffs[rng.pick(5)]));
  return e;
}

}  // namespace

TEST_CASE("exact rational arithmetic") {
  CHECK(Rational::make(2, 4) == Rational{1, 2});
  CHECK(Rational::make(1, -2) == Rational{-1, 2});
  CHECK(Rational::make(-3, 6).to_string() == "-1/2");
  CHECK(Rational::make(5, 1).to_string() == "5");
  CHECK((Rational{1, 2} + Rational{1, 3}) == Rational{5, 6});
  CHECK((Rational{1, 2} * Rational{2, 3}) == Rational{1, 3});
  CHECK((Rational{1, 2} - Rational{1, 2}).is_zero());
  CHECK(code_of([] { Rational::make(1, 0); }) == Errc::bad_parameter);
  CHECK(code_of([] {
          Rational big{INT64_C(1) << 62, 1};
          (void)(big * Rational{4, 1});
        }) == Errc::internal_inconsistency);
}

TEST_CASE("normalization sorts factors with the Koszul sign") {
  const auto orbits = fixture_table();
  SUBCASE("two odd factors anticommute") {
    const auto norm = normalize({{"q", 1}, {"p", 1}}, orbits);
    CHECK(norm.sign == -1);
    CHECK(norm.monomial == Monomial{{{"p", 1}, {"q", 1}}});
  }
  SUBCASE("an even factor moves freely") {
    const auto norm = normalize({{"u", 1}, {"p", 1}}, orbits);
    CHECK(norm.sign == 1);
    CHECK(norm.monomial == Monomial{{{"p", 1}, {"u", 1}}});
  }
  SUBCASE("an odd repeat kills the monomial") {
    CHECK(normalize({{"x", 1}, {"x", 1}}, orbits).sign == 0);
    CHECK(normalize({{"p", 1}, {"u", 1}, {"p", 1}}, orbits).sign == 0);
  }
  SUBCASE("even repeats survive") {
    const auto norm = normalize({{"u", 1}, {"u", 1}}, orbits);
    CHECK(norm.sign == 1);
    CHECK(norm.monomial == Monomial{{{"u", 1}, {"u", 1}}});
  }
  SUBCASE("three odd factors reversed") {
    CHECK(normalize({{"z", 1}, {"q", 1}, {"p", 1}}, orbits).sign == -1);
  }
  SUBCASE("bad orbits cannot generate") {
    CHECK(code_of([&] { normalize({{"w", 2}}, orbits); }) ==
          Errc::bad_orbit_generator);
    CHECK(code_of([&] { gen("w", orbits); }) == Errc::unresolved_reference);
    CHECK(code_of([&] { algebra_generator({"w", 2}, orbits); }) ==
          Errc::bad_orbit_generator);
  }
}

TEST_CASE("normalization agrees with the puncture permutation sign") {
  const auto orbits = fixture_table();
  const std::vector<OrbitKey> sorted = {
      {"p", 1}, {"q", 1}, {"x", 1}, {"z", 1}};
  DecoratedSurface s;
  s.n = 3;
  for (const auto& key : sorted) s.positives.push_back({key, 0});

  std::vector<int> perm = {1, 2, 3, 4};
  do {
    std::vector<OrbitKey> arranged;
    for (int v : perm) arranged.push_back(sorted[v - 1]);
    const auto norm = normalize(arranged, orbits);
    REQUIRE(norm.sign != 0);
    CHECK(norm.monomial == Monomial{sorted});
    CHECK(norm.sign == permutation_sign(s, perm, {}, orbits).value);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("multiplication is unital, bilinear, and supercommutative") {
  const auto orbits = fixture_table();
  const auto x = gen("x", orbits);
  const auto u = gen("u", orbits);
  const auto v = gen("v", orbits);
  const auto p = gen("p", orbits);

  CHECK(multiply(x, algebra_one(), orbits) == x);
  CHECK(multiply(algebra_one(), x, orbits) == x);
  CHECK(multiply(x, algebra_zero(), orbits).is_zero());
  CHECK(multiply(x, x, orbits).is_zero());
  CHECK_FALSE(multiply(u, u, orbits).is_zero());

  // (u/2 + 3v) p = (up)/2 + 3 vp
  const auto lhs = multiply(
      add(scale(u, Rational{1, 2}), scale(v, Rational{3, 1})), p, orbits);
  const auto rhs = add(scale(multiply(u, p, orbits), Rational{1, 2}),
                       scale(multiply(v, p, orbits), Rational{3, 1}));
  CHECK(lhs == rhs);

  testgen::Rng rng(515);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_monomial(rng, orbits, 2);
    const auto b = random_monomial(rng, orbits, 2);
    if (a.is_zero() || b.is_zero()) continue;
    const long long ga = monomial_grading(a.terms.begin()->first, orbits);
    const long long gb = monomial_grading(b.terms.begin()->first, orbits);
    const int sign = ga * gb % 2 == 0 ? 1 : -1;
    CHECK(multiply(a, b, orbits) ==
          scale(multiply(b, a, orbits), Rational{sign, 1}));
  }
}

TEST_CASE("multiplication is associative") {
  const auto orbits = fixture_table();
  testgen::Rng rng(616);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = random_element(rng, orbits);
    const auto b = random_element(rng, orbits);
    const auto c = random_element(rng, orbits);
    CHECK(multiply(multiply(a, b, orbits), c, orbits) ==
          multiply(a, multiply(b, c, orbits), orbits));
  }
}

TEST_CASE("element rendering is deterministic") {
  const auto orbits = fixture_table();
  CHECK(to_string(algebra_zero()) == "0");
  CHECK(to_string(algebra_one()) == "1");
  const auto u = gen("u", orbits);
  const auto x = gen("x", orbits);
  CHECK(to_string(scale(x, Rational{-2, 1})) == "-2*x@1");
  CHECK(to_string(add(gen("p", orbits),
                      scale(multiply(u, x, orbits), Rational{-1, 2}))) ==
        "1*p@1 - 1/2*u@1*x@1");
}

TEST_CASE("the differential is the graded Leibniz extension of its images") {
  const auto orbits = fixture_table();
  const auto d = contact_fixture(orbits);

  CHECK(apply_differential(d, algebra_one(), orbits).is_zero());
  CHECK(apply_differential(d, algebra_zero(), orbits).is_zero());
  // x has no declared image, so it maps to zero
  CHECK(apply_differential(d, gen("x", orbits), orbits).is_zero());

  // d(xu) = d(x)u - x d(u) = -xx = 0 plus u from nothing: here d(x) = 0 and
  // d(u) = x with |x| odd, so d(xu) = -x x = 0
  const auto xu = multiply(gen("x", orbits), gen("u", orbits), orbits);
  CHECK(apply_differential(d, xu, orbits).is_zero());

  // odd unit image: e has |e| = 1 with d(e) = 1, f has no image, so
  // d(ef) = f
  {
    OrbitTable two;
    testgen::put_orbit(two, "e", 1, 1, 3);
    testgen::put_orbit(two, "f", 1, 2, 3);
    DifferentialData unit_d;
    unit_d.n = 3;
    unit_d.images[{"e", 1}] = algebra_one();
    const auto ef = multiply(gen("e", two), gen("f", two), two);
    CHECK(apply_differential(unit_d, ef, two) == gen("f", two));
  }

  // even Leibniz expansion: d(u p) = d(u) p + u d(p)
  const auto up = multiply(gen("u", orbits), gen("p", orbits), orbits);
  CHECK(apply_differential(d, up, orbits) ==
        add(multiply(gen("x", orbits), gen("p", orbits), orbits),
            multiply(gen("u", orbits), d.images.at({"p", 1}), orbits)));

  testgen::Rng rng(717);
  for (int trial = 0; trial < 25; ++trial) {
    const auto a = random_monomial(rng, orbits, 3);
    if (a.is_zero()) continue;
    const long long ga = monomial_grading(a.terms.begin()->first, orbits);
    const auto b = random_element(rng, orbits);
    const auto lhs = apply_differential(d, multiply(a, b, orbits), orbits);
    const auto rhs =
        add(multiply(apply_differential(d, a, orbits), b, orbits),
            scale(multiply(a, apply_differential(d, b, orbits), orbits),
                  Rational{ga % 2 == 0 ? 1 : -1, 1}));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("differential validation") {
  const auto orbits = fixture_table();
  SUBCASE("image gradings must drop by one") {
    DifferentialData d;
    d.n = 3;
    d.images[{"u", 1}] = gen("p", orbits);
    CHECK(code_of([&] { validate_differential(d, orbits); }) ==
          Errc::grading_violation);
  }
  SUBCASE("generators must be good") {
    DifferentialData d;
    d.n = 3;
    d.images[{"w", 2}] = algebra_zero();
    CHECK(code_of([&] { validate_differential(d, orbits); }) ==
          Errc::bad_orbit_generator);
  }
  SUBCASE("ambient dimension must match the orbit data") {
    DifferentialData d;
    d.n = 2;
    d.images[{"u", 1}] = algebra_zero();
    CHECK(code_of([&] { validate_differential(d, orbits); }) ==
          Errc::mismatched_ambient);
  }
}

TEST_CASE("d squared verification") {
  const auto orbits = fixture_table();
  SUBCASE("the zero differential passes") {
    CHECK(verify_d_squared(DifferentialData{3, {}}, orbits).empty());
  }
  SUBCASE("a two-step chain passes") {
    DifferentialData d;
    d.n = 3;
    d.images[{"u", 1}] = gen("x", orbits);
    CHECK(verify_d_squared(d, orbits).empty());
  }
  SUBCASE("a three-step chain fails at the top") {
    DifferentialData d;
    d.n = 3;
    d.images[{"p", 1}] = gen("u", orbits);
    d.images[{"u", 1}] = gen("x", orbits);
    const auto report = verify_d_squared(d, orbits);
    REQUIRE(report.size() == 1);
    CHECK(report[0].first == OrbitKey{"p", 1});
    CHECK(report[0].second == gen("x", orbits));
  }
  SUBCASE("the six generator fixture squares to zero") {
    CHECK(verify_d_squared(contact_fixture(orbits), orbits).empty());
  }
  SUBCASE("one flipped sign is detected") {
    auto d = contact_fixture(orbits);
    d.images[{"p", 1}] = add(gen("u", orbits), gen("v", orbits));
    const auto report = verify_d_squared(d, orbits);
    REQUIRE(report.size() == 1);
    CHECK(report[0].first == OrbitKey{"p", 1});
    CHECK(report[0].second == scale(gen("x", orbits), Rational{2, 1}));
  }
}
