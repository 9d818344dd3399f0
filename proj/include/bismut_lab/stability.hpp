#pragma once

#include "bismut_lab/errors.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace bismut_lab {

using Rational = boost::rational<std::int64_t>;

/** Intersection form, pulled-back first Chern class and a positive class, in one basis of H^2. */
struct PairingData {
  std::vector<std::vector<std::int64_t>> intersection;
  std::vector<std::int64_t> c1_coeffs;
  std::vector<Rational> a_coeffs;
};

inline void validate_pairing(const PairingData& p) {
  const std::size_t n = p.intersection.size();
  if (p.c1_coeffs.size() != n || p.a_coeffs.size() != n) throw DimensionMismatch("pairing data sizes disagree");
  for (std::size_t i = 0; i < n; ++i) {
    if (p.intersection[i].size() != n) throw DimensionMismatch("intersection form must be square");
    for (std::size_t j = 0; j < n; ++j)
      if (p.intersection[i][j] != p.intersection[j][i]) throw DimensionMismatch("intersection form must be symmetric");
  }
}

/** c1^T Q a */
inline Rational deg_pairing(const PairingData& p) {
  validate_pairing(p);
  Rational s = 0;
  for (std::size_t i = 0; i < p.c1_coeffs.size(); ++i)
    for (std::size_t j = 0; j < p.a_coeffs.size(); ++j) s += Rational(p.c1_coeffs[i] * p.intersection[i][j]) * p.a_coeffs[j];
  return s;
}

enum class Verdict { NonExistence, Inconclusive };

inline std::string to_string(Verdict v) { return v == Verdict::NonExistence ? "NonExistence" : "Inconclusive"; }

/** One-directional: NonExistence only for a submersion with negative pairing. */
inline Verdict obstruction_verdict(const PairingData& p, bool submersion_at_a_point) {
  return (submersion_at_a_point && deg_pairing(p) < 0) ? Verdict::NonExistence : Verdict::Inconclusive;
}

/** Invariants of a smooth degree-d surface in CP^3. */
struct HypersurfaceData {
  std::int64_t d = 1;
  std::int64_t b2 = 0;
  std::optional<std::int64_t> signature;  ///< odd d only
  std::int64_t h20 = 0;
  std::int64_t h11 = 0;
};

inline HypersurfaceData hypersurface_invariants(std::int64_t d) {
  if (d < 1) throw ConfigError("degree must be at least 1");
  HypersurfaceData h;
  h.d = d;
  h.b2 = d * (d * (d - 4) + 6) - 2;
  if (d % 2 != 0) h.signature = -(d - 2) * d * (d + 2) / 3;
  h.h20 = (d - 1) * (d - 2) * (d - 3) / 6;
  h.h11 = h.b2 - 2 * h.h20;
  return h;
}

/** [alpha]^2 = -(d-4)^2, the square forced on the class of the twisting form. */
inline bool pluriclosed_bundle_condition(std::int64_t d, std::int64_t alpha_square) {
  if (d < 5 || d % 2 == 0) throw ConfigError("bundle condition needs odd d >= 5");
  return alpha_square == -(d - 4) * (d - 4);
}

namespace stability_detail {

inline bool search(std::int64_t remaining, std::int64_t cap, std::size_t slot, std::vector<std::int64_t>& v,
                   std::int64_t g) {
  if (remaining == 0) return g == 1;
  if (slot == v.size()) return false;
  const std::int64_t left = static_cast<std::int64_t>(v.size() - slot);
  for (std::int64_t x = cap; x >= 1; --x) {
    const std::int64_t sq = x * x;
    if (sq > remaining) continue;
    if (sq * left < remaining) break;
    v[slot] = x;
    if (search(remaining - sq, x, slot + 1, v, std::gcd(g, x))) return true;
  }
  v[slot] = 0;
  return false;
}

}  // namespace stability_detail

/**
 * Primitive v in the lattice (Z^dim_neg, -Id) with v.v = target_square.
 * Entries are non-increasing and non-negative.
 */
inline std::vector<std::int64_t> lattice_search(int dim_neg, std::int64_t target_square) {
  if (dim_neg < 1) throw ConfigError("lattice dimension must be positive");
  if (target_square >= 0) throw ConfigError("target square must be negative");
  const std::int64_t m = -target_square;
  std::int64_t cap = 0;
  while ((cap + 1) * (cap + 1) <= m) ++cap;
  std::vector<std::int64_t> v(static_cast<std::size_t>(dim_neg), 0);
  if (!stability_detail::search(m, cap, 0, v, 0))
    throw NotFound("no primitive vector of square " + std::to_string(target_square) + " in rank " +
                   std::to_string(dim_neg));
  return v;
}

inline std::int64_t lattice_square(const std::vector<std::int64_t>& v) {
  std::int64_t s = 0;
  for (auto x : v) s -= x * x;
  return s;
}

inline bool is_primitive(const std::vector<std::int64_t>& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x);
  return g == 1;
}

/** Named pairing examples. */
struct ObstructionExample {
  std::string name;
  PairingData data;
  bool submersion = true;
};

/** T^2-bundle over a curve of genus g mapped to its base. */
inline ObstructionExample curve_base_example(int genus) {
  return {"T2-bundle over genus-" + std::to_string(genus) + " curve",
          {{{1}}, {2 - 2 * static_cast<std::int64_t>(genus)}, {Rational(1)}},
          true};
}

/** Hopf surface mapped to CP^1 by its elliptic fibration. */
inline ObstructionExample hopf_fibration_example() {
  return {"Hopf surface over CP^1", {{{1}}, {2}, {Rational(1)}}, true};
}

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ConfigError("cannot parse rational '" + s + "'");
  }
}

inline std::string format_rational(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace bismut_lab
