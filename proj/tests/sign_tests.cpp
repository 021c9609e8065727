#include "sft/signs.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gen.hpp"
#include "sft/errors.hpp"

using namespace sft;
using testgen::puncture;

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

// orbits g0..g4 with grading equal to the digit (n = 2, so mu = grading + 1)
OrbitTable graded_table() {
  OrbitTable orbits;
  for (int g = 0; g <= 4; ++g)
    testgen::put_orbit(orbits, "g" + std::to_string(g), 1, g + 1, 2);
  testgen::put_orbit(orbits, "w", 2, 3, 2, /*good=*/false);
  return orbits;
}

DecoratedSurface with_negatives(std::vector<Puncture> negs) {
  DecoratedSurface s;
  s.negatives = std::move(negs);
  return s;
}

// product of adjacent-swap signs along a bubble decomposition that reorders
// the negative list into perm
Sign negative_swap_chain(const DecoratedSurface& surface,
                         const std::vector<int>& perm,
                         const OrbitTable& orbits) {
  const int count = static_cast<int>(perm.size());
  std::vector<int> current(count);
  std::iota(current.begin(), current.end(), 1);
  DecoratedSurface stage = surface;
  Sign total{1};
  for (int i = 0; i < count; ++i) {
    int j = i;
    while (current[j] != perm[i]) ++j;
    for (; j > i; --j) {
      total = total * swap_adjacent_negative(stage, j, orbits);
      std::swap(current[j - 1], current[j]);
      std::swap(stage.negatives[j - 1], stage.negatives[j]);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("adjacent swaps read the grading parity product") {
  const auto orbits = graded_table();
  CHECK(swap_adjacent_negative(
            with_negatives({puncture("g2", 1), puncture("g4", 1)}), 1, orbits)
            .value == 1);
  CHECK(swap_adjacent_negative(
            with_negatives({puncture("g1", 1), puncture("g3", 1)}), 1, orbits)
            .value == -1);
  CHECK(swap_adjacent_negative(
            with_negatives({puncture("g1", 1), puncture("g2", 1)}), 1, orbits)
            .value == 1);

  DecoratedSurface s;
  s.positives = {puncture("g3", 1), puncture("g1", 1), puncture("g2", 1)};
  CHECK(swap_adjacent_positive(s, 1, orbits).value == -1);
  CHECK(swap_adjacent_positive(s, 2, orbits).value == 1);
  CHECK(code_of([&] { swap_adjacent_positive(s, 0, orbits); }) ==
        Errc::bad_parameter);
  CHECK(code_of([&] { swap_adjacent_positive(s, 3, orbits); }) ==
        Errc::bad_parameter);
  CHECK(code_of([&] { swap_adjacent_negative(s, 1, orbits); }) ==
        Errc::bad_parameter);
}

TEST_CASE("swapping back multiplies to the identity") {
  const auto orbits = graded_table();
  auto s = with_negatives(
      {puncture("g1", 1), puncture("g3", 1), puncture("g2", 1)});
  for (int l = 1; l <= 2; ++l) {
    const Sign there = swap_adjacent_negative(s, l, orbits);
    auto swapped = s;
    std::swap(swapped.negatives[l - 1], swapped.negatives[l]);
    const Sign back = swap_adjacent_negative(swapped, l, orbits);
    CHECK((there * back).value == 1);
  }
}

TEST_CASE("permutation signs count inverted grading pairs") {
  const auto orbits = graded_table();
  auto s = with_negatives(
      {puncture("g1", 1), puncture("g3", 1), puncture("g1", 1)});
  s.positives = {puncture("g2", 1), puncture("g4", 1)};

  CHECK(permutation_sign(s, {1, 2}, {1, 2, 3}, orbits).value == 1);
  // reversing three odd-graded punctures inverts three odd*odd pairs
  CHECK(permutation_sign(s, {1, 2}, {3, 2, 1}, orbits).value == -1);
  // even gradings never contribute
  CHECK(permutation_sign(s, {2, 1}, {1, 2, 3}, orbits).value == 1);

  CHECK(code_of([&] { permutation_sign(s, {1, 2}, {1, 2}, orbits); }) ==
        Errc::bad_parameter);
  CHECK(code_of([&] { permutation_sign(s, {1, 2}, {1, 2, 2}, orbits); }) ==
        Errc::bad_parameter);
  CHECK(code_of([&] { permutation_sign(s, {1, 2}, {0, 1, 2}, orbits); }) ==
        Errc::bad_parameter);
}

TEST_CASE("permutation signs are decomposition independent") {
  const auto orbits = graded_table();
  testgen::Rng rng(7707);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Puncture> negs;
    for (int i = 0; i < 4; ++i)
      negs.push_back(puncture("g" + std::to_string(rng.pick(5)), 1));
    const auto s = with_negatives(negs);
    std::vector<int> perm = {1, 2, 3, 4};
    do {
      const Sign direct = permutation_sign(s, {}, perm, orbits);
      CHECK(direct.value == negative_swap_chain(s, perm, orbits).value);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("union signs couple first negatives to second positives") {
  const auto orbits = graded_table();
  DecoratedSurface only_pos;
  only_pos.positives = {puncture("g3", 1)};
  DecoratedSurface one_neg = with_negatives({puncture("g1", 1)});
  DecoratedSurface pos1;
  pos1.positives = {puncture("g1", 1)};

  // no negative punctures in the first configuration: empty exponent
  CHECK(union_sign(Configuration{{only_pos}}, Configuration{{one_neg, pos1}},
                   orbits)
            .value == 1);
  // gradings {1} against {1}
  CHECK(union_sign(Configuration{{one_neg}}, Configuration{{pos1}}, orbits)
            .value == -1);
  // gradings {1,2} against {3}: epsilon = 3 * 3
  const auto two_neg =
      with_negatives({puncture("g1", 1), puncture("g2", 1)});
  CHECK(union_sign(Configuration{{two_neg}}, Configuration{{only_pos}}, orbits)
            .value == -1);
  // the sums range over every component of each configuration
  const auto split_first = Configuration{
      {with_negatives({puncture("g1", 1)}), with_negatives({puncture("g2", 1)})}};
  CHECK(union_sign(split_first, Configuration{{only_pos}}, orbits).value == -1);

  DecoratedSurface other;
  other.n = 3;
  CHECK(code_of([&] {
          union_sign(Configuration{{one_neg}}, Configuration{{other}}, orbits);
        }) == Errc::mismatched_ambient);
}

TEST_CASE("glue signs couple leftover negatives to extra positives") {
  const auto orbits = graded_table();
  auto glue_case = [&](std::vector<Puncture> leftover,
                       std::vector<Puncture> extras) {
    DecoratedSurface top;
    top.negatives = std::move(leftover);
    top.negatives.push_back(puncture("g0", 1));  // the neck
    DecoratedSurface bottom;
    bottom.positives = {puncture("g0", 1)};
    bottom.positives.insert(bottom.positives.end(), extras.begin(),
                            extras.end());
    return glue_sign(top, bottom, 1, orbits);
  };

  // complete gluing: no leftovers, no extras
  CHECK(glue_case({}, {}).value == 1);
  CHECK(glue_case({puncture("g1", 1)}, {puncture("g1", 1)}).value == -1);
  // epsilon = 2 * (1 + 3)
  CHECK(glue_case({puncture("g2", 1)},
                  {puncture("g1", 1), puncture("g3", 1)})
            .value == 1);

  DecoratedSurface top = with_negatives({puncture("g0", 1)});
  DecoratedSurface bottom;
  bottom.positives = {puncture("g1", 1)};
  CHECK(code_of([&] { glue_sign(top, bottom, 1, orbits); }) ==
        Errc::mismatched_orbits);
  CHECK(code_of([&] { glue_sign(top, bottom, 0, orbits); }) == Errc::bad_arity);
}

TEST_CASE("glue signs equal the block-exchange permutation sign") {
  const auto orbits = graded_table();
  testgen::Rng rng(3141);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = rng.range(0, 3);
    const int q = rng.range(0, 3);
    std::vector<Puncture> leftover, extras;
    for (int i = 0; i < p; ++i)
      leftover.push_back(puncture("g" + std::to_string(rng.pick(5)), 1));
    for (int i = 0; i < q; ++i)
      extras.push_back(puncture("g" + std::to_string(rng.pick(5)), 1));

    DecoratedSurface top;
    top.negatives = leftover;
    top.negatives.push_back(puncture("g0", 1));
    DecoratedSurface bottom;
    bottom.positives = {puncture("g0", 1)};
    bottom.positives.insert(bottom.positives.end(), extras.begin(),
                            extras.end());

    // moving the extras block in front of the leftover block inverts exactly
    // the leftover x extras pairs
    auto combined = with_negatives(leftover);
    combined.negatives.insert(combined.negatives.end(), extras.begin(),
                              extras.end());
    std::vector<int> block_exchange;
    for (int i = 0; i < q; ++i) block_exchange.push_back(p + 1 + i);
    for (int i = 0; i < p; ++i) block_exchange.push_back(1 + i);

    CHECK(glue_sign(top, bottom, 1, orbits).value ==
          permutation_sign(combined, {}, block_exchange, orbits).value);
  }
}

TEST_CASE("marker rotations alternate only on bad orbits") {
  const auto orbits = graded_table();
  DecoratedSurface s;
  s.positives = {puncture("g2", 1)};
  s.negatives = {puncture("w", 2, 1)};

  for (int j : {0, 1, 2, 7})
    CHECK(rotate_marker(s, true, 1, j, orbits).value == 1);
  CHECK(rotate_marker(s, false, 1, 1, orbits).value == -1);
  // j = m: even multiplicity returns the original marker and the original
  // orientation
  CHECK(rotate_marker(s, false, 1, 2, orbits).value == 1);

  for (int j1 = 0; j1 <= 3; ++j1)
    for (int j2 = 0; j2 <= 3; ++j2) {
      const Sign lhs =
          rotate_marker(s, false, 1, j1, orbits) *
          rotate_marker(s, false, 1, j2, orbits);
      CHECK(lhs.value == rotate_marker(s, false, 1, j1 + j2, orbits).value);
    }

  CHECK(code_of([&] { rotate_marker(s, true, 2, 1, orbits); }) ==
        Errc::bad_parameter);
  CHECK(code_of([&] { rotate_marker(s, false, 0, 1, orbits); }) ==
        Errc::bad_parameter);
}
