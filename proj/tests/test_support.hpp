#pragma once

#include "bismut_lab/bismut_lab.hpp"

#include <random>

namespace test_support {

using namespace bismut_lab;

/**
 * Random jet of a Kaehler metric: dg symmetric in (k,i), d2g symmetric in
 * (i,k) and (j,l), ddg totally symmetric in its holomorphic slots (i,k,l).
 */
template <class Rng>
MetricJet kahler_jet(int n, Rng& rng) {
  MetricJet j = random_jet(n, rng, 0.1);
  j.g += Mat::Identity(n, n);
  MetricJet k = j;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        k.dg(a, b, c) = 0.5 * (j.dg(a, b, c) + j.dg(b, a, c));
        for (int d = 0; d < n; ++d) {
          k.d2g(a, b, c, d) = 0.25 * (j.d2g(a, b, c, d) + j.d2g(c, b, a, d) + j.d2g(a, d, c, b) + j.d2g(c, d, a, b));
          k.ddg(a, b, c, d) = (j.ddg(a, b, c, d) + j.ddg(a, b, d, c) + j.ddg(c, b, a, d) + j.ddg(c, b, d, a) +
                               j.ddg(d, b, a, c) + j.ddg(d, b, c, a)) / 6.0;
        }
      }
  return k;
}

/** Fubini-Study metric on C^n: delta/(1+|z|^2) - zbar_i z_j/(1+|z|^2)^2. */
inline Mat fubini_study(const Vec& z) {
  const double s = 1.0 + z.squaredNorm();
  return Mat::Identity(z.size(), z.size()) / s - z.conjugate() * z.transpose() / (s * s);
}

/** Boothby metric a = 1, b = 0 at z. */
inline Mat boothby(const Vec& z) { return hopf_metric(z, 1.0, 0.0); }

inline Vec point2(cd a, cd b) {
  Vec z(2);
  z << a, b;
  return z;
}

}  // namespace test_support
