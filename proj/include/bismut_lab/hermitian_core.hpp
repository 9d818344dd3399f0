#pragma once

#include "bismut_lab/metric_jet.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace bismut_lab {

/** Inverse metric; entry (j,l) is g^{jbar l}. */
inline Mat inverse_metric(const Mat& g) {
  validate_metric(g);
  return g.inverse();
}

/** Chern connection: gamma(i,k,l) = Gamma_{ik}^l, with nabla_i d_k = Gamma_{ik}^l d_l. */
inline Tensor3 chern_connection(const MetricJet& jet) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  Tensor3 gam(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        cd s = 0.0;
        for (int j = 0; j < n; ++j) s += gi(j, l) * jet.dg(i, k, j);
        gam(i, k, l) = s;
      }
  return gam;
}

/** Chern torsion: T(i,j,k) = T_{ij kbar} = d_i g_{j kbar} - d_j g_{i kbar}. */
inline Tensor3 chern_torsion(const MetricJet& jet) {
  const int n = jet.n;
  Tensor3 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) t(i, j, k) = jet.dg(i, j, k) - jet.dg(j, i, k);
  return t;
}

/**
 * Chern curvature: omega(i,j,k,l) = Omega^C_{i jbar k lbar}
 *   = -d_i d_{jbar} g_{k lbar} + g^{qbar p} d_i g_{k qbar} d_{jbar} g_{p lbar}.
 * The first pair are 2-form indices.
 */
inline Tensor4 chern_curvature(const MetricJet& jet) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  Tensor4 om(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd s = -jet.d2g(k, l, i, j);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) s += gi(q, p) * jet.dg(i, k, q) * jet.dbar_g(j, p, l);
          om(i, j, k, l) = s;
        }
  return om;
}

/** Chern-Ricci form coefficients: g^{lbar k} Omega^C_{i jbar k lbar}. */
inline Mat chern_ricci(const MetricJet& jet) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  const Tensor4 om = chern_curvature(jet);
  Mat r = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) r(i, j) += gi(l, k) * om(i, j, k, l);
  return r;
}

/**
 * dbar of the torsion: out(i,j,k,l) = (dbar T)_{ij kbar lbar}
 *   = g_{j lbar, i kbar} - g_{i lbar, j kbar} - g_{j kbar, i lbar} + g_{i kbar, j lbar}.
 */
inline Tensor4 dbar_torsion(const MetricJet& jet) {
  const int n = jet.n;
  Tensor4 x(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          x(i, j, k, l) = jet.d2g(j, l, i, k) - jet.d2g(i, l, j, k) - jet.d2g(j, k, i, l) + jet.d2g(i, k, j, l);
  return x;
}

/**
 * Expresses a rank-4 tensor in the unitary frame of g. Flags mark
 * anti-holomorphic slots.
 */
inline Tensor4 to_unitary_frame(const Tensor4& t, const Mat& g, std::array<bool, 4> bar) {
  const int n = t.dim();
  const Mat U = unitary_frame(g);
  std::array<Mat, 4> f;
  for (int s = 0; s < 4; ++s) f[s] = bar[s] ? Mat(U.conjugate()) : U;
  Tensor4 cur = t;
  for (int s = 0; s < 4; ++s) {
    Tensor4 next(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d) {
            std::array<int, 4> idx{a, b, c, d};
            cd acc = 0.0;
            for (int m = 0; m < n; ++m) {
              std::array<int, 4> src = idx;
              src[s] = m;
              acc += f[s](m, idx[s]) * cur(src[0], src[1], src[2], src[3]);
            }
            next(a, b, c, d) = acc;
          }
    cur = next;
  }
  return cur;
}

inline double frobenius(const Tensor4& t) {
  double s = 0.0;
  for (const auto& v : t.data()) s += std::norm(v);
  return std::sqrt(s);
}

/** Norm of a (1,1) coefficient matrix m(i,j) in the unitary frame of g. */
inline double norm11(const Mat& m, const Mat& g) {
  const Mat U = unitary_frame(g);
  return (U.transpose() * m * U.conjugate()).norm();
}

/** Norm of a (2,0) coefficient matrix m(i,j) in the unitary frame of g. */
inline double norm20(const Mat& m, const Mat& g) {
  const Mat U = unitary_frame(g);
  return (U.transpose() * m * U).norm();
}

/** |dbar T| measured in a unitary frame; zero exactly when the jet is pluriclosed. */
inline double pluriclosed_defect(const MetricJet& jet) {
  validate_jet(jet);
  return frobenius(to_unitary_frame(dbar_torsion(jet), jet.g, {false, false, true, true}));
}

/** Scale used to decide whether a defect is negligible. */
inline double second_derivative_scale(const MetricJet& jet) {
  return frobenius(to_unitary_frame(jet.d2g, jet.g, {false, true, false, true}));
}

/**
 * Minimal Frobenius correction of d2g making the jet pluriclosed.
 * dbar T is the part of d_c d_{dbar} g_{a bbar} antisymmetric in (a,c) and in
 * (b,d); that component is an orthogonal projection and is removed.
 */
inline MetricJet project_pluriclosed(MetricJet jet) {
  const int n = jet.n;
  Tensor4 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const cd alt = 0.25 * (jet.d2g(a, b, c, d) - jet.d2g(c, b, a, d) - jet.d2g(a, d, c, b) +
                                 jet.d2g(c, d, a, b));
          out(a, b, c, d) = jet.d2g(a, b, c, d) - alt;
        }
  jet.d2g = out;
  return jet;
}

template <class Rng>
MetricJet random_pluriclosed_jet(int n, Rng& rng) {
  return project_pluriclosed(random_jet(n, rng));
}

namespace detail {

/** q(a,b,c,d) = T_{a p dbar} g^{qbar p} Tbar_{bbar qbar c}. */
inline Tensor4 torsion_square(const Tensor3& t, const Mat& gi) {
  const int n = t.dim();
  Tensor4 q(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          cd s = 0.0;
          for (int p = 0; p < n; ++p)
            for (int r = 0; r < n; ++r) s += t(a, p, d) * gi(r, p) * std::conj(t(b, r, c));
          q(a, b, c, d) = s;
        }
  return q;
}

}  // namespace detail

/**
 * Bismut curvature (1,1) part, general Hermitian route:
 * Omega^B_{a bbar c dbar} = (dbar T)_{c a dbar bbar} + Omega^C_{c dbar a bbar}
 *                          - T_{a p dbar} g^{qbar p} Tbar_{bbar qbar c}.
 * Form indices first.
 */
inline Tensor4 bismut11_general(const MetricJet& jet) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  const Tensor4 oc = chern_curvature(jet);
  const Tensor4 dbt = dbar_torsion(jet);
  const Tensor4 q = detail::torsion_square(chern_torsion(jet), gi);
  Tensor4 om(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) om(a, b, c, d) = dbt(c, a, d, b) + oc(c, d, a, b) - q(a, b, c, d);
  return om;
}

/** Bismut (1,1) curvature valid for pluriclosed jets: Omega^C_{c dbar a bbar} - T g^{-1} Tbar. */
inline Tensor4 bismut11_pluriclosed(const MetricJet& jet) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  const Tensor4 oc = chern_curvature(jet);
  const Tensor4 q = detail::torsion_square(chern_torsion(jet), gi);
  Tensor4 om(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) om(a, b, c, d) = oc(c, d, a, b) - q(a, b, c, d);
  return om;
}

/** Bismut (2,0) curvature: om(i,j,k,l) = Omega^B_{ij k lbar} = nabla^C_k T_{ij lbar}. */
inline Tensor4 bismut20(const MetricJet& jet) {
  const int n = jet.n;
  const Tensor3 gam = chern_connection(jet);
  const Tensor3 t = chern_torsion(jet);
  Tensor4 om(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd s = jet.ddg(j, l, k, i) - jet.ddg(i, l, k, j);
          for (int p = 0; p < n; ++p) s -= gam(k, i, p) * t(p, j, l) + gam(k, j, p) * t(i, p, l);
          om(i, j, k, l) = s;
        }
  return om;
}

struct BismutCurvature {
  Tensor4 omega11;  ///< Omega^B_{i jbar k lbar}
  Tensor4 omega20;  ///< Omega^B_{ij k lbar}
  double route_residual = std::numeric_limits<double>::quiet_NaN();  ///< general vs pluriclosed route
  double defect = 0.0;                                               ///< |dbar T|
};

/**
 * Bismut curvature. With require_pluriclosed the jet must satisfy
 * |dbar T| <= tol * (1 + |d2g|); the pluriclosed route is then evaluated too
 * and its relative distance to the general route is recorded.
 */
inline BismutCurvature bismut_curvature(const MetricJet& jet, bool require_pluriclosed = true,
                                        double tol = 1e-8) {
  validate_jet(jet);
  BismutCurvature out;
  out.defect = pluriclosed_defect(jet);
  if (require_pluriclosed && out.defect > tol * (1.0 + second_derivative_scale(jet)))
    throw NotPluriclosed("|dbar T| = " + std::to_string(out.defect));
  out.omega11 = bismut11_general(jet);
  out.omega20 = bismut20(jet);
  if (require_pluriclosed) out.route_residual = relative_residual(bismut11_pluriclosed(jet), out.omega11);
  return out;
}

/**
 * Bismut-Ricci traces rho11(i,j) = g^{lbar k} Omega^B_{i jbar k lbar} and
 * rho20(i,j) = g^{lbar k} Omega^B_{ij k lbar}. As forms,
 * rho_B^{1,1} = sqrt(-1) rho11_{i jbar} dz^i ^ dzbar^j and
 * rho_B^{2,0} = sqrt(-1) (1/2) rho20_{ij} dz^i ^ dz^j.
 */
struct BismutRicci {
  Mat rho11;
  Mat rho20;
};

inline BismutRicci bismut_ricci(const BismutCurvature& curv, const Mat& gi) {
  const int n = curv.omega11.dim();
  BismutRicci r{Mat::Zero(n, n), Mat::Zero(n, n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          r.rho11(i, j) += gi(l, k) * curv.omega11(i, j, k, l);
          r.rho20(i, j) += gi(l, k) * curv.omega20(i, j, k, l);
        }
  return r;
}

inline BismutRicci bismut_ricci(const MetricJet& jet, bool require_pluriclosed = true) {
  return bismut_ricci(bismut_curvature(jet, require_pluriclosed), inverse_metric(jet.g));
}

}  // namespace bismut_lab
