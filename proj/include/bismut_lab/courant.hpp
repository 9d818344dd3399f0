#pragma once

#include "bismut_lab/hermitian_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bismut_lab {

/**
 * \brief Local holomorphic (2,0)-form beta with beta = (1/2) beta_{ij} dz^i ^ dz^j.
 *
 * beta(i,j) antisymmetric; dbeta(k,i,j) = d_k beta_{ij}; d2beta(k,l,i,j) = d_k d_l beta_{ij}.
 * Anti-holomorphic derivatives vanish.
 */
struct TorsionPotential {
  int n = 0;
  Mat beta;
  Tensor3 dbeta;
  std::optional<Tensor4> d2beta;

  TorsionPotential() = default;
  explicit TorsionPotential(int dim) : n(dim), beta(Mat::Zero(dim, dim)), dbeta(dim) {}
};

template <class Rng>
TorsionPotential random_potential(int n, Rng& rng, bool with_second = true) {
  TorsionPotential tp(n);
  const Mat b = random_complex_matrix(n, n, rng);
  tp.beta = b - b.transpose();
  Tensor3 db(n);
  fill_normal(db, rng);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tp.dbeta(k, i, j) = db(k, i, j) - db(k, j, i);
  if (with_second) {
    Tensor4 d2(n), raw(n);
    fill_normal(raw, rng);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            d2(k, l, i, j) = 0.25 * (raw(k, l, i, j) + raw(l, k, i, j) - raw(k, l, j, i) - raw(l, k, j, i));
    tp.d2beta = d2;
  }
  return tp;
}

/** Generalized metric on T^{1,0} + (T^{1,0})^* in the basis (Z^1..Z^n, W^1..W^n); G(A,B) = G(e_A, conj e_B). */
struct GeneralizedMetric {
  int n = 0;
  Mat G;
  static std::string basis_tag(int n) {
    std::string s;
    for (int k = 1; k <= n; ++k) s += (k > 1 ? "," : "") + std::string("Z") + std::to_string(k);
    for (int k = 1; k <= n; ++k) s += ",W" + std::to_string(k);
    return s;
  }
};

/** Matrix of G for metric g and B-field beta. */
inline Mat generalized_metric_matrix(const Mat& g, const Mat& beta) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.inverse();
  const Mat git = gi.transpose();
  Mat M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = g + beta * git * beta.adjoint();
  M.topRightCorner(n, n) = I_unit * beta * git;
  M.bottomLeftCorner(n, n) = -I_unit * git * beta.adjoint();
  M.bottomRightCorner(n, n) = git;
  return M;
}

inline GeneralizedMetric build_G(const Mat& g, const Mat& beta) {
  validate_metric(g);
  if (beta.rows() != g.rows() || beta.cols() != g.cols()) throw DimensionMismatch("beta and g differ in size");
  if (max_abs(beta + beta.transpose()) > 1e-12 * std::max(1.0, max_abs(beta)))
    throw DimensionMismatch("beta must be antisymmetric");
  return {static_cast<int>(g.rows()), generalized_metric_matrix(g, beta)};
}

/** Coordinate matrix of e^{i beta}: X + xi -> X + xi + i i_X beta. */
inline Mat bfield_matrix(const Mat& beta) {
  const int n = static_cast<int>(beta.rows());
  Mat E = Mat::Identity(2 * n, 2 * n);
  E.bottomLeftCorner(n, n) = I_unit * beta.transpose();
  return E;
}

/** Pullback of a generalized metric by e^{i beta}; bfield_transform(bfield_transform(G, b), -b) = G. */
inline Mat bfield_transform(const Mat& G, const Mat& beta) {
  const Mat E = bfield_matrix(beta);
  return E.transpose() * G * E.conjugate();
}

/** psi_g on coordinates in the basis (d_1..d_n, dbar_1..dbar_n): X -> X^{1,0} - g(X^{0,1}). */
inline Mat psi_matrix(const Mat& g) {
  const int n = static_cast<int>(g.rows());
  Mat P = Mat::Zero(2 * n, 2 * n);
  P.topLeftCorner(n, n) = Mat::Identity(n, n);
  P.bottomRightCorner(n, n) = -g;
  return P;
}

inline Vec psi_map(const Mat& g, const Vec& x) { return psi_matrix(g) * x; }

inline Vec psi_inverse(const Mat& g, const Vec& v) {
  const int n = static_cast<int>(g.rows());
  Vec x(2 * n);
  x.head(n) = v.head(n);
  x.tail(n) = -g.inverse() * v.tail(n);
  return x;
}

/** Symmetric pairing <X + xi, Y + eta> = (xi(Y) + eta(X)) / 2. */
inline cd courant_pairing(const Vec& u, const Vec& v) {
  const int n = static_cast<int>(u.size() / 2);
  return 0.5 * (u.tail(n).transpose() * v.head(n) + v.tail(n).transpose() * u.head(n))(0, 0);
}

/** First-order data at a point: enough for connections. */
struct FirstOrder {
  Mat g;
  Tensor3 dg;
  Mat beta;
  Tensor3 dbeta;
};

inline FirstOrder first_order(const MetricJet& jet, const TorsionPotential& tp) {
  if (tp.n != jet.n) throw DimensionMismatch("potential and jet differ in dimension");
  return {jet.g, jet.dg, tp.beta, tp.dbeta};
}

/** d_i of the matrix of G. */
inline Mat gen_metric_derivative(const FirstOrder& f, int i) {
  const int n = static_cast<int>(f.g.rows());
  Mat dgi(n, n), dbi(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      dgi(a, b) = f.dg(i, a, b);
      dbi(a, b) = f.dbeta(i, a, b);
    }
  const Mat gi = f.g.inverse();
  const Mat dinv_t = (-gi * dgi * gi).transpose();
  const Mat git = gi.transpose();
  Mat dM(2 * n, 2 * n);
  dM.topLeftCorner(n, n) = dgi + dbi * git * f.beta.adjoint() + f.beta * dinv_t * f.beta.adjoint();
  dM.topRightCorner(n, n) = I_unit * (dbi * git + f.beta * dinv_t);
  dM.bottomLeftCorner(n, n) = -I_unit * dinv_t * f.beta.adjoint();
  dM.bottomRightCorner(n, n) = dinv_t;
  return dM;
}

/** (0,1)-part of the connection: nabla_{jbar} Z^k = -T_{kl jbar} W^l, nabla_{jbar} W^k = 0. */
inline std::vector<Mat> gen_antiholomorphic_part(const Tensor3& t) {
  const int n = t.dim();
  std::vector<Mat> out(n, Mat::Zero(2 * n, 2 * n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) out[j](n + l, k) = -t(k, l, j);
  return out;
}

/**
 * \brief Chern connection of G on the twisted bundle.
 *
 * Matrices act on coordinate columns: nabla_X e_A = sum_B omega_X(B,A) e_B.
 */
struct GenConnection {
  std::vector<Mat> holo;      ///< X = d_i
  std::vector<Mat> antiholo;  ///< X = dbar_j
};

/** Connection obtained from G-compatibility alone, given the (0,1)-part. */
inline GenConnection gen_connection_compat(const FirstOrder& f) {
  const int n = static_cast<int>(f.g.rows());
  Tensor3 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) t(i, j, k) = f.dg(i, j, k) - f.dg(j, i, k);
  GenConnection c;
  c.antiholo = gen_antiholomorphic_part(t);
  const Mat M = generalized_metric_matrix(f.g, f.beta);
  const Mat Minv = M.inverse();
  for (int i = 0; i < n; ++i) {
    const Mat row = (gen_metric_derivative(f, i) - M * c.antiholo[i].conjugate()) * Minv;
    c.holo.push_back(row.transpose());
  }
  return c;
}

/** Chern connection of G from the closed-form block expressions. */
inline GenConnection gen_chern_connection(const MetricJet& jet, const TorsionPotential& tp) {
  validate_jet(jet);
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  const Tensor3 gam = chern_connection(jet);
  const Tensor3 t = chern_torsion(jet);
  const Mat& b = tp.beta;
  auto tb = [&](int q, int c, int i) { return std::conj(t(q, c, i)); };
  GenConnection out;
  out.antiholo = gen_antiholomorphic_part(t);
  for (int i = 0; i < n; ++i) {
    Mat row = Mat::Zero(2 * n, 2 * n);  // row(A,B) = Gamma_{iA}^B
    for (int a = 0; a < n; ++a)
      for (int bb = 0; bb < n; ++bb) {
        cd zz = 0.0, zw = 0.0, wz = 0.0, ww = 0.0;
        cd nab = tp.dbeta(i, a, bb);
        for (int p = 0; p < n; ++p) nab -= gam(i, a, p) * b(p, bb) + gam(i, bb, p) * b(a, p);
        zw = I_unit * nab;
        for (int c = 0; c < n; ++c) {
          zz += gi(c, bb) * jet.dg(i, a, c);
          ww -= gi(c, a) * jet.dg(i, bb, c);
          for (int q = 0; q < n; ++q) {
            wz -= gi(c, bb) * gi(q, a) * tb(q, c, i);
            for (int p = 0; p < n; ++p) zz -= I_unit * gi(c, bb) * gi(q, p) * b(a, p) * tb(q, c, i);
            for (int m = 0; m < n; ++m) ww -= I_unit * gi(q, a) * gi(c, m) * b(bb, m) * tb(q, c, i);
          }
        }
        for (int q = 0; q < n; ++q)
          for (int p = 0; p < n; ++p)
            for (int c = 0; c < n; ++c)
              for (int m = 0; m < n; ++m) zw += gi(q, p) * gi(c, m) * b(a, p) * b(bb, m) * tb(q, c, i);
        row(a, bb) = zz;
        row(a, n + bb) = zw;
        row(n + a, bb) = wz;
        row(n + a, n + bb) = ww;
      }
    out.holo.push_back(row.transpose());
  }
  return out;
}

/** Max relative violation of d_i G = omega_i^T G + G conj(omega_{ibar}). */
inline double gen_compatibility_residual(const FirstOrder& f, const GenConnection& c) {
  const int n = static_cast<int>(f.g.rows());
  const Mat M = generalized_metric_matrix(f.g, f.beta);
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    const Mat lhs = gen_metric_derivative(f, i);
    const Mat rhs = c.holo[i].transpose() * M + M * c.antiholo[i].conjugate();
    r = std::max(r, relative_residual(rhs, lhs));
  }
  return r;
}

/** Curvature endomorphisms Omega_{i jbar}, stored at index i*n + j. */
using CurvatureBlocks = std::vector<Mat>;

/** Curvature of G at beta = 0 written through the Bismut curvature of g. */
inline CurvatureBlocks gen_curvature_untwisted(const MetricJet& jet, const BismutCurvature& bc) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  const Tensor4& o11 = bc.omega11;
  const Tensor4& o20 = bc.omega20;
  CurvatureBlocks out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Mat F = Mat::Zero(2 * n, 2 * n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          cd zz = 0.0, zw = 0.0, ww = 0.0;
          for (int m = 0; m < n; ++m) zz += o11(k, m, i, j) * gi(m, l);
          for (int c = 0; c < n; ++c)
            for (int q = 0; q < n; ++q) zw += gi(c, l) * gi(q, k) * std::conj(o20(q, c, j, i));
          for (int q = 0; q < n; ++q) ww -= gi(q, k) * o11(l, q, i, j);
          F(l, k) = zz;
          F(n + l, k) = -o20(k, l, i, j);
          F(l, n + k) = zw;
          F(n + l, n + k) = ww;
        }
      out.push_back(F);
    }
  return out;
}

/** Chern curvature of G for the B-field beta: e^{-i beta} Omega' e^{i beta}. */
inline CurvatureBlocks gen_curvature(const MetricJet& jet, const TorsionPotential& tp,
                                     bool require_pluriclosed = true) {
  const BismutCurvature bc = bismut_curvature(jet, require_pluriclosed);
  CurvatureBlocks out = gen_curvature_untwisted(jet, bc);
  const Mat E = bfield_matrix(tp.beta);
  const Mat Einv = bfield_matrix(-tp.beta);
  for (auto& F : out) F = Einv * F * E;
  return out;
}

/** S = sqrt(-1) tr_omega Omega^G = g^{jbar i} Omega^G_{i jbar}. */
inline Mat second_ricci_trace(const MetricJet& jet, const CurvatureBlocks& om) {
  const int n = jet.n;
  const Mat gi = inverse_metric(jet.g);
  Mat S = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S += gi(j, i) * om[i * n + j];
  return S;
}

/** S from the Bismut-Ricci form by the block formula, conjugated by the B-field. */
inline Mat second_ricci(const Mat& g, const BismutRicci& rho, const Mat& beta) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.inverse();
  Mat S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = gi.transpose() * rho.rho11.transpose();
  S.bottomLeftCorner(n, n) = -rho.rho20.transpose();
  S.topRightCorner(n, n) = gi.transpose() * rho.rho20.conjugate().transpose() * gi;
  S.bottomRightCorner(n, n) = -rho.rho11 * gi;
  return bfield_matrix(-beta) * S * bfield_matrix(beta);
}

inline Mat second_ricci(const MetricJet& jet, const TorsionPotential& tp, bool require_pluriclosed = true) {
  return second_ricci(jet.g, bismut_ricci(jet, require_pluriclosed), tp.beta);
}

/** Velocity of (g, beta) under the flow. */
struct MetricVelocity {
  Mat gdot;
  Mat betadot;
};

/** Classical form: d_t omega = -rho^{1,1}, d_t beta = -rho^{2,0}. */
inline MetricVelocity classical_velocity(const BismutRicci& rho) {
  return {-rho.rho11, -I_unit * rho.rho20};
}

/** Reads (gdot, betadot) off G^{-1} d_t G = -S. */
inline MetricVelocity generalized_velocity(const Mat& g, const Mat& beta, const Mat& S) {
  const int n = static_cast<int>(g.rows());
  const Mat M = generalized_metric_matrix(g, beta);
  const Mat Mdot = -S.transpose() * M;
  const Mat ww = Mdot.bottomRightCorner(n, n);
  const Mat zw = Mdot.topRightCorner(n, n);
  MetricVelocity v;
  v.gdot = -g * ww.transpose() * g;
  v.betadot = -I_unit * (zw - I_unit * beta * ww) * g.transpose();
  return v;
}

/** Directional derivative of the matrix of G along (gdot, betadot). */
inline Mat generalized_metric_variation(const Mat& g, const Mat& beta, const MetricVelocity& v) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.inverse();
  const Mat git = gi.transpose();
  const Mat dgit = (-gi * v.gdot * gi).transpose();
  Mat dM(2 * n, 2 * n);
  dM.topLeftCorner(n, n) = v.gdot + v.betadot * git * beta.adjoint() + beta * dgit * beta.adjoint() +
                           beta * git * v.betadot.adjoint();
  dM.topRightCorner(n, n) = I_unit * (v.betadot * git + beta * dgit);
  dM.bottomLeftCorner(n, n) = -I_unit * (dgit * beta.adjoint() + git * v.betadot.adjoint());
  dM.bottomRightCorner(n, n) = dgit;
  return dM;
}

/** tr_G Gref = Gref_{A Bbar} G^{Bbar A}. */
inline double trace_G(const Mat& G, const Mat& Gref) { return (Gref * G.inverse()).trace().real(); }

/** |beta|^2_{g,g0} = g0^{l mbar} g^{j kbar} beta_{jl} conj(beta_{km}). */
inline double beta_norm2(const Mat& g, const Mat& g0, const Mat& beta) {
  const Mat gi = g.inverse();
  const Mat g0i = g0.inverse();
  const int n = static_cast<int>(g.rows());
  cd s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m) s += g0i(m, l) * gi(k, j) * beta(j, l) * std::conj(beta(k, m));
  return s.real();
}

/** tr_g g0 + tr_{g0} g + |beta|^2: the classical side of the trace identity. */
inline double classical_trace(const Mat& g, const Mat& g0, const Mat& beta) {
  return (g0 * g.inverse()).trace().real() + (g * g0.inverse()).trace().real() + beta_norm2(g, g0, beta);
}

/**
 * |Upsilon|^2 for the difference of two (1,0)-connection parts on the same
 * bundle, measured with g on the form slot and G on the endomorphism.
 */
inline double upsilon_norm2(const Mat& g, const Mat& G, const std::vector<Mat>& a, const std::vector<Mat>& b) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.inverse();
  const Mat Gc = G.conjugate();
  const Mat Gci = Gc.inverse();
  cd s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Mat ui = a[i] - b[i];
      const Mat uj = a[j] - b[j];
      s += gi(j, i) * (ui * Gci * uj.adjoint() * Gc).trace();
    }
  return s.real();
}

/** Bounds on classical data implied by a two-sided bound between generalized metrics. */
struct ClassicalBounds {
  double lambda = 1.0;     ///< smallest L with G/L <= Gref <= L G
  double g_eig_min = 1.0;  ///< spectrum of g relative to gref
  double g_eig_max = 1.0;
  double beta_norm2 = 0.0;  ///< |beta - beta_ref|^2_{g, gref}
  double beta_bound = 0.0;  ///< 2n (lambda - 1)
  bool consistent = true;
};

inline Eigen::VectorXd relative_spectrum(const Mat& A, const Mat& B) {
  Eigen::LLT<Mat> llt(B);
  if (llt.info() != Eigen::Success) throw SingularMetric("reference form is not positive");
  const Mat L = llt.matrixL();
  const Mat Li = L.inverse();
  const Mat C = Li * A * Li.adjoint();
  return metric_eigenvalues(0.5 * (C + C.adjoint()));
}

inline ClassicalBounds gen_to_classical_bounds(const Mat& g, const Mat& beta, const Mat& gref, const Mat& beta_ref) {
  const int n = static_cast<int>(g.rows());
  const Mat G = generalized_metric_matrix(g, beta);
  const Mat Gref = generalized_metric_matrix(gref, beta_ref);
  const Eigen::VectorXd ev = relative_spectrum(G, Gref);
  ClassicalBounds b;
  b.lambda = std::max(ev.maxCoeff(), 1.0 / ev.minCoeff());
  const Eigen::VectorXd gev = relative_spectrum(g, gref);
  b.g_eig_min = gev.minCoeff();
  b.g_eig_max = gev.maxCoeff();
  b.beta_norm2 = beta_norm2(g, gref, beta - beta_ref);
  b.beta_bound = 2.0 * n * (b.lambda - 1.0);
  const double slack = 1e-10 * b.lambda;
  b.consistent = b.g_eig_min >= 1.0 / b.lambda - slack && b.g_eig_max <= b.lambda + slack &&
                 b.beta_norm2 <= b.beta_bound + slack;
  return b;
}

/**
 * Full Bismut curvature tensor R^B(e_a, e_b, e_c, e_d) = g(R(e_a,e_b) e_c, e_d)
 * over the complex basis (d_1..d_n, dbar_1..dbar_n).
 */
inline std::vector<cd> full_bismut_tensor(const BismutCurvature& bc) {
  const int n = bc.omega11.dim();
  const int N = 2 * n;
  std::vector<cd> R(static_cast<std::size_t>(N) * N * N * N, 0.0);
  auto at = [&](int a, int b, int c, int d) -> cd& { return R[((a * N + b) * N + c) * N + d]; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const cd o11 = bc.omega11(i, j, k, l);
          const cd o20 = bc.omega20(i, j, k, l);
          at(i, n + j, k, n + l) = o11;
          at(i, n + j, n + l, k) = -o11;
          at(n + j, i, k, n + l) = -o11;
          at(n + j, i, n + l, k) = o11;
          at(i, j, k, n + l) = o20;
          at(i, j, n + l, k) = -o20;
          at(n + i, n + j, n + k, l) = std::conj(o20);
          at(n + i, n + j, l, n + k) = -std::conj(o20);
        }
  return R;
}

/**
 * Lowers a family of endomorphisms R(e_a,e_b) (coordinate matrices in the
 * basis d, dbar) with the complex bilinear metric.
 */
inline std::vector<cd> lower_endomorphisms(const std::vector<Mat>& endo, const Mat& g) {
  const int n = static_cast<int>(g.rows());
  const int N = 2 * n;
  Mat h = Mat::Zero(N, N);
  h.topRightCorner(n, n) = g;
  h.bottomLeftCorner(n, n) = g.transpose();
  std::vector<cd> R(static_cast<std::size_t>(N) * N * N * N, 0.0);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const Mat low = endo[a * N + b].transpose() * h;  // low(c,d) = h(R e_c, e_d)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) R[((a * N + b) * N + c) * N + d] = low(c, d);
    }
  return R;
}

/** R^- as the psi-conjugate of the curvature of G at beta = 0; all 2n x 2n slot pairs. */
inline std::vector<Mat> minus_curvature_from_G(const MetricJet& jet, const BismutCurvature& bc) {
  const int n = jet.n;
  const int N = 2 * n;
  const CurvatureBlocks F = gen_curvature_untwisted(jet, bc);
  const Mat P = psi_matrix(jet.g);
  const Mat Pi = P.inverse();
  std::vector<Mat> endo(static_cast<std::size_t>(N) * N, Mat::Zero(N, N));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Mat r = Pi * F[i * n + j] * P;
      endo[i * N + (n + j)] = r;
      endo[(n + j) * N + i] = -r;
    }
  return endo;
}

/** Max relative residual of R^B(X,Y,Z,W) = R^-(Z,W,X,Y). */
inline double curvature_flip_check(const MetricJet& jet) {
  const BismutCurvature bc = bismut_curvature(jet, true);
  const int N = 2 * jet.n;
  const auto RB = full_bismut_tensor(bc);
  const auto RM = lower_endomorphisms(minus_curvature_from_G(jet, bc), jet.g);
  double diff = 0.0, scale = 1.0;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          const cd lhs = RB[((a * N + b) * N + c) * N + d];
          const cd rhs = RM[((c * N + d) * N + a) * N + b];
          diff = std::max(diff, std::abs(lhs - rhs));
          scale = std::max(scale, std::abs(lhs));
        }
  return diff / scale;
}

}  // namespace bismut_lab
