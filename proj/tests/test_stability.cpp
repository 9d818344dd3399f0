#include "catch_amalgamated.hpp"

#include "bismut_lab/stability.hpp"

#include <functional>

using namespace bismut_lab;

namespace {

bool brute_primitive_exists(int dim, std::int64_t m) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(dim), 0);
  std::int64_t cap = 0;
  while ((cap + 1) * (cap + 1) <= m) ++cap;
  std::function<bool(std::size_t)> rec = [&](std::size_t slot) -> bool {
    if (slot == v.size()) return lattice_square(v) == -m && is_primitive(v);
    for (std::int64_t x = -cap; x <= cap; ++x) {
      v[slot] = x;
      if (rec(slot + 1)) return true;
    }
    return false;
  };
  return rec(0);
}

}  // namespace

TEST_CASE("quintic surface invariants", "[stability][known_values]") {
  const HypersurfaceData h = hypersurface_invariants(5);
  CHECK(h.b2 == 53);
  REQUIRE(h.signature.has_value());
  CHECK(*h.signature == -35);
  CHECK(h.h11 == 45);
  CHECK(h.h20 == 4);
}

TEST_CASE("hypersurface invariants satisfy Noether and the Hodge index formula", "[stability][property]") {
  for (std::int64_t d = 1; d <= 15; ++d) {
    const HypersurfaceData h = hypersurface_invariants(d);
    const std::int64_t euler = h.b2 + 2;
    const std::int64_t chi = 1 + h.h20;
    const std::int64_t k2 = d * (d - 4) * (d - 4);
    CHECK(12 * chi == k2 + euler);
    CHECK(h.b2 == 2 * h.h20 + h.h11);
    const std::int64_t sig = 2 + 2 * h.h20 - h.h11;
    CHECK(3 * sig == (4 - d * d) * d);
    if (d % 2 != 0) CHECK(*h.signature == sig);
    else CHECK_FALSE(h.signature.has_value());
  }
  CHECK(hypersurface_invariants(4).b2 == 22);
  CHECK(hypersurface_invariants(1).b2 == 1);
  CHECK_THROWS_AS(hypersurface_invariants(0), ConfigError);
}

TEST_CASE("pairing verdicts for T2-bundles over curves", "[stability][known_values]") {
  CHECK(deg_pairing(curve_base_example(0).data) == Rational(2));
  CHECK(obstruction_verdict(curve_base_example(0).data, true) == Verdict::Inconclusive);
  CHECK(obstruction_verdict(curve_base_example(1).data, true) == Verdict::Inconclusive);
  const auto g2 = curve_base_example(2);
  CHECK(deg_pairing(g2.data) == Rational(-2));
  CHECK(obstruction_verdict(g2.data, g2.submersion) == Verdict::NonExistence);
  CHECK(obstruction_verdict(g2.data, false) == Verdict::Inconclusive);
  const auto hf = hopf_fibration_example();
  CHECK(obstruction_verdict(hf.data, hf.submersion) == Verdict::Inconclusive);
  CHECK(to_string(Verdict::NonExistence) == "NonExistence");
}

TEST_CASE("pairing is bilinear with exact rationals", "[stability][oracle]") {
  PairingData p{{{0, 1}, {1, 0}}, {1, -3}, {Rational(1, 3), Rational(5, 7)}};
  CHECK(deg_pairing(p) == Rational(5, 7) - Rational(1));
  CHECK(obstruction_verdict(p, true) == Verdict::NonExistence);
  p.a_coeffs = {Rational(1, 6), Rational(1, 2)};
  CHECK(deg_pairing(p) == Rational(0));
  CHECK(obstruction_verdict(p, true) == Verdict::Inconclusive);
}

TEST_CASE("pairing validation", "[stability][errors]") {
  PairingData p{{{1, 2}, {0, 1}}, {1, 1}, {Rational(1), Rational(1)}};
  CHECK_THROWS_AS(deg_pairing(p), DimensionMismatch);
  p.intersection = {{1, 0}, {0, 1}};
  p.c1_coeffs = {1};
  CHECK_THROWS_AS(deg_pairing(p), DimensionMismatch);
}

TEST_CASE("bundle condition on the quintic", "[stability][known_values]") {
  CHECK(pluriclosed_bundle_condition(5, -1));
  CHECK_FALSE(pluriclosed_bundle_condition(5, -4));
  CHECK(pluriclosed_bundle_condition(7, -9));
  CHECK_THROWS_AS(pluriclosed_bundle_condition(4, 0), ConfigError);
  CHECK_THROWS_AS(pluriclosed_bundle_condition(3, -1), ConfigError);
}

TEST_CASE("lattice search finds primitive classes of the required square", "[stability][known_values]") {
  const HypersurfaceData h = hypersurface_invariants(5);
  const int neg = static_cast<int>((h.b2 - *h.signature) / 2);
  CHECK(neg == 44);
  const auto v = lattice_search(neg, -1);
  CHECK(lattice_square(v) == -1);
  CHECK(is_primitive(v));
  const auto w = lattice_search(10, -9);
  CHECK(lattice_square(w) == -9);
  CHECK(is_primitive(w));
}

TEST_CASE("lattice search agrees with brute force", "[stability][oracle]") {
  for (int dim = 1; dim <= 4; ++dim)
    for (std::int64_t m = 1; m <= (dim <= 2 ? 60 : 30); ++m) {
      const bool exists = brute_primitive_exists(dim, m);
      if (exists) {
        const auto v = lattice_search(dim, -m);
        CHECK(lattice_square(v) == -m);
        CHECK(is_primitive(v));
      } else {
        CHECK_THROWS_AS(lattice_search(dim, -m), NotFound);
      }
    }
  CHECK_THROWS_AS(lattice_search(3, -8), NotFound);
  CHECK_THROWS_AS(lattice_search(1, -4), NotFound);
}

TEST_CASE("lattice search validation", "[stability][errors]") {
  CHECK_THROWS_AS(lattice_search(0, -1), ConfigError);
  CHECK_THROWS_AS(lattice_search(3, 0), ConfigError);
  CHECK_THROWS_AS(lattice_search(3, 4), ConfigError);
}

TEST_CASE("rational parsing", "[stability][basic]") {
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-2/6") == Rational(-1, 3));
  CHECK(format_rational(Rational(4, 6)) == "2/3");
  CHECK(format_rational(Rational(-5)) == "-5");
  CHECK_THROWS_AS(parse_rational("x/2"), ConfigError);
  CHECK_THROWS_AS(parse_rational(""), ConfigError);
}
