#pragma once

#include "bismut_lab/courant.hpp"

#include <array>
#include <functional>
#include <vector>

namespace bismut_lab::oracle {

/** Eighth-order central first-derivative weights for offsets 1..4. */
inline constexpr std::array<double, 4> kStencil{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};

using MatField = std::function<Mat(const Vec&)>;
/** Connection matrices (column convention) for directions d_1..d_n, dbar_1..dbar_n. */
using ConnectionField = std::function<std::vector<Mat>(const Vec&)>;

/** Unit step along real coordinate r: r = 2k is x_k, r = 2k+1 is y_k. */
inline Vec real_direction(int n, int r) {
  Vec e = Vec::Zero(n);
  e(r / 2) = (r % 2 == 0) ? cd(1.0, 0.0) : I_unit;
  return e;
}

/** Central derivative of a matrix-valued field along a complex displacement e. */
inline Mat directional(const MatField& f, const Vec& z, const Vec& e, double h) {
  Mat d;
  for (int m = 1; m <= 4; ++m) {
    const Mat term = kStencil[m - 1] * (f(z + (m * h) * e) - f(z - (m * h) * e));
    d = (m == 1) ? term : Mat(d + term);
  }
  return d / h;
}

/** Second-order jet of a metric field by eighth-order finite differences. */
inline MetricJet fd_jet(const MatField& field, const Vec& z, double h = 1e-2) {
  const int n = static_cast<int>(z.size());
  const int R = 2 * n;
  MetricJet jet(n);
  jet.g = field(z);
  std::vector<Mat> d1(R);
  for (int r = 0; r < R; ++r) d1[r] = directional(field, z, real_direction(n, r), h);
  std::vector<Mat> d2(static_cast<std::size_t>(R) * R);
  for (int r = 0; r < R; ++r)
    for (int s = r; s < R; ++s) {
      const Vec er = real_direction(n, r);
      const MatField inner = [&](const Vec& w) { return directional(field, w, er, h); };
      d2[r * R + s] = directional(inner, z, real_direction(n, s), h);
      d2[s * R + r] = d2[r * R + s];
    }
  auto H = [&](int r, int s) -> const Mat& { return d2[r * R + s]; };
  for (int k = 0; k < n; ++k) {
    const Mat dk = 0.5 * (d1[2 * k] - I_unit * d1[2 * k + 1]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) jet.dg(k, i, j) = dk(i, j);
    for (int l = 0; l < n; ++l) {
      const int xk = 2 * k, yk = 2 * k + 1, xl = 2 * l, yl = 2 * l + 1;
      const Mat mixed = 0.25 * (H(xk, xl) + I_unit * H(xk, yl) - I_unit * H(yk, xl) + H(yk, yl));
      const Mat holo = 0.25 * (H(xk, xl) - I_unit * H(xk, yl) - I_unit * H(yk, xl) - H(yk, yl));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          jet.d2g(i, j, k, l) = mixed(i, j);
          jet.ddg(i, j, k, l) = holo(i, j);
        }
    }
  }
  return jet;
}

/** Quadratic Hermitian metric field whose jet at the origin is the given jet. */
class PolynomialField {
 public:
  explicit PolynomialField(MetricJet jet) : j_(std::move(jet)) {}

  int dim() const { return j_.n; }

  Mat value(const Vec& z) const {
    const int n = j_.n;
    Mat g = j_.g;
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        cd s = 0.0;
        for (int k = 0; k < n; ++k) {
          s += j_.dg(k, i, jj) * z(k) + j_.dbar_g(k, i, jj) * std::conj(z(k));
          for (int l = 0; l < n; ++l) {
            s += j_.d2g(i, jj, k, l) * z(k) * std::conj(z(l));
            s += 0.5 * j_.ddg(i, jj, k, l) * z(k) * z(l);
            s += 0.5 * std::conj(j_.ddg(jj, i, k, l)) * std::conj(z(k) * z(l));
          }
        }
        g(i, jj) += s;
      }
    return g;
  }

  /** d_k g at z */
  Mat d(const Vec& z, int k) const {
    const int n = j_.n;
    Mat out(n, n);
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        cd s = j_.dg(k, i, jj);
        for (int l = 0; l < n; ++l) s += j_.d2g(i, jj, k, l) * std::conj(z(l)) + j_.ddg(i, jj, k, l) * z(l);
        out(i, jj) = s;
      }
    return out;
  }

  /** d_{kbar} g at z */
  Mat dbar(const Vec& z, int k) const { return d(z, k).adjoint(); }

  /** First derivatives d_k g_{i jbar} at z, indexed (k,i,j). */
  Tensor3 first(const Vec& z) const {
    const int n = j_.n;
    Tensor3 t(n);
    for (int k = 0; k < n; ++k) {
      const Mat m = d(z, k);
      for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) t(k, i, jj) = m(i, jj);
    }
    return t;
  }

 private:
  MetricJet j_;
};

/** Quadratic holomorphic (2,0)-form with the given jet at the origin. */
class PolynomialPotential {
 public:
  explicit PolynomialPotential(TorsionPotential tp) : t_(std::move(tp)) {}

  Mat value(const Vec& z) const {
    const int n = t_.n;
    Mat b = t_.beta;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          b(i, j) += t_.dbeta(k, i, j) * z(k);
          if (t_.d2beta)
            for (int l = 0; l < n; ++l) b(i, j) += 0.5 * (*t_.d2beta)(k, l, i, j) * z(k) * z(l);
        }
    return b;
  }

  Tensor3 first(const Vec& z) const {
    const int n = t_.n;
    Tensor3 out = t_.dbeta;
    if (t_.d2beta)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(k, i, j) += (*t_.d2beta)(k, l, i, j) * z(l);
    return out;
  }

 private:
  TorsionPotential t_;
};

/** Chern connection on T^{1,0}: nabla_i d_k = Gamma_{ik}^l d_l, no (0,1)-part. */
inline ConnectionField chern_field(const PolynomialField& f) {
  return [f](const Vec& z) {
    const int n = f.dim();
    const Mat gi = f.value(z).inverse();
    std::vector<Mat> om(2 * n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) om[i] = (f.d(z, i) * gi).transpose();
    return om;
  };
}

namespace detail {

inline Tensor3 torsion_at(const Tensor3& dg) {
  const int n = dg.dim();
  Tensor3 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) t(i, j, k) = dg(i, j, k) - dg(j, i, k);
  return t;
}

/** Row-convention pieces of the Bismut connection at a point. */
struct BismutPieces {
  std::vector<Mat> a;   ///< a[i](j,l): nabla_i d_j = a[i](j,l) d_l
  std::vector<Mat> bb;  ///< bb[i](j,l): nabla_{ibar} d_j = bb[i](j,l) d_l
};

inline BismutPieces bismut_pieces(const Mat& g, const Tensor3& dg) {
  const int n = static_cast<int>(g.rows());
  const Mat gi = g.inverse();
  const Tensor3 t = torsion_at(dg);
  BismutPieces p;
  for (int i = 0; i < n; ++i) {
    Mat a = Mat::Zero(n, n), b = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          a(j, l) += gi(k, l) * dg(j, i, k);
          b(j, l) += std::conj(t(i, k, j)) * gi(k, l);
        }
    p.a.push_back(a);
    p.bb.push_back(b);
  }
  return p;
}

}  // namespace detail

/** Bismut connection restricted to T^{1,0}. */
inline ConnectionField bismut_field(const PolynomialField& f) {
  return [f](const Vec& z) {
    const int n = f.dim();
    const auto p = detail::bismut_pieces(f.value(z), f.first(z));
    std::vector<Mat> om(2 * n);
    for (int i = 0; i < n; ++i) {
      om[i] = p.a[i].transpose();
      om[n + i] = p.bb[i].transpose();
    }
    return om;
  };
}

/** Bismut connection on the complexified tangent bundle, basis (d, dbar). */
inline std::vector<Mat> bismut_full_at(const Mat& g, const Tensor3& dg) {
  const int n = static_cast<int>(g.rows());
  const auto p = detail::bismut_pieces(g, dg);
  std::vector<Mat> om(2 * n, Mat::Zero(2 * n, 2 * n));
  for (int i = 0; i < n; ++i) {
    Mat rd = Mat::Zero(2 * n, 2 * n), rb = Mat::Zero(2 * n, 2 * n);
    rd.topLeftCorner(n, n) = p.a[i];
    rd.bottomRightCorner(n, n) = p.bb[i].conjugate();
    rb.topLeftCorner(n, n) = p.bb[i];
    rb.bottomRightCorner(n, n) = p.a[i].conjugate();
    om[i] = rd.transpose();
    om[n + i] = rb.transpose();
  }
  return om;
}

/** Levi-Civita connection of the Riemannian metric Re g in the basis (d, dbar). */
inline std::vector<Mat> levi_civita_at(const Mat& g, const Tensor3& dg) {
  const int n = static_cast<int>(g.rows());
  const int N = 2 * n;
  Mat h = Mat::Zero(N, N);
  h.topRightCorner(n, n) = g;
  h.bottomLeftCorner(n, n) = g.transpose();
  const Mat hi = h.inverse();
  std::vector<Mat> dh(N, Mat::Zero(N, N));
  for (int k = 0; k < n; ++k) {
    Mat dk(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dk(i, j) = dg(k, i, j);
    const Mat dbk = dk.adjoint();
    dh[k].topRightCorner(n, n) = dk;
    dh[k].bottomLeftCorner(n, n) = dk.transpose();
    dh[n + k].topRightCorner(n, n) = dbk;
    dh[n + k].bottomLeftCorner(n, n) = dbk.transpose();
  }
  std::vector<Mat> om(N, Mat::Zero(N, N));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c) {
        cd s = 0.0;
        for (int d = 0; d < N; ++d) s += hi(c, d) * (dh[a](b, d) + dh[b](a, d) - dh[d](a, b));
        om[a](c, b) = 0.5 * s;
      }
  return om;
}

/** The connection 2 nabla^{LC} - nabla^B. */
inline ConnectionField minus_field(const PolynomialField& f) {
  return [f](const Vec& z) {
    const Mat g = f.value(z);
    const Tensor3 dg = f.first(z);
    auto lc = levi_civita_at(g, dg);
    const auto b = bismut_full_at(g, dg);
    for (std::size_t a = 0; a < lc.size(); ++a) lc[a] = 2.0 * lc[a] - b[a];
    return lc;
  };
}

inline ConnectionField bismut_full_field(const PolynomialField& f) {
  return [f](const Vec& z) { return bismut_full_at(f.value(z), f.first(z)); };
}

/** Chern connection of G obtained from compatibility at each point. */
inline ConnectionField generalized_field(const PolynomialField& f, const PolynomialPotential& p) {
  return [f, p](const Vec& z) {
    const FirstOrder fo{f.value(z), f.first(z), p.value(z), p.first(z)};
    const GenConnection c = gen_connection_compat(fo);
    std::vector<Mat> om = c.holo;
    om.insert(om.end(), c.antiholo.begin(), c.antiholo.end());
    return om;
  };
}

/**
 * Curvature endomorphisms R(e_a, e_b) = e_a(omega_b) - e_b(omega_a) + [omega_a, omega_b]
 * for all pairs of directions a, b in (d_1..d_n, dbar_1..dbar_n), index a*2n + b.
 */
inline std::vector<Mat> fd_curvature(const ConnectionField& conn, const Vec& z, double h = 1e-3) {
  const int n = static_cast<int>(z.size());
  const int N = 2 * n;
  const std::vector<Mat> base = conn(z);
  std::vector<std::vector<Mat>> dr(N);  // dr[r][b] = D_r omega_b
  for (int r = 0; r < N; ++r) {
    const Vec e = real_direction(n, r);
    for (int m = 1; m <= 4; ++m) {
      const auto plus = conn(z + (m * h) * e);
      const auto minus = conn(z - (m * h) * e);
      if (m == 1) dr[r].assign(N, Mat::Zero(base[0].rows(), base[0].cols()));
      for (int b = 0; b < N; ++b) dr[r][b] += (kStencil[m - 1] / h) * (plus[b] - minus[b]);
    }
  }
  auto deriv = [&](int a, int b) -> Mat {
    const int k = a % n;
    const cd s = (a < n) ? -I_unit : I_unit;
    return 0.5 * (dr[2 * k][b] + s * dr[2 * k + 1][b]);
  };
  std::vector<Mat> R(static_cast<std::size_t>(N) * N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      R[a * N + b] = deriv(a, b) - deriv(b, a) + base[a] * base[b] - base[b] * base[a];
  return R;
}

/** Lowers (i, jbar) blocks of T^{1,0} curvature: out(i,j,k,l) = sum_m R(m,k) g(m,l). */
inline Tensor4 lower11(const std::vector<Mat>& R, const Mat& g) {
  const int n = static_cast<int>(g.rows());
  Tensor4 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Mat low = R[i * 2 * n + n + j].transpose() * g;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out(i, j, k, l) = low(k, l);
    }
  return out;
}

/** Lowers (i, j) blocks of T^{1,0} curvature. */
inline Tensor4 lower20(const std::vector<Mat>& R, const Mat& g) {
  const int n = static_cast<int>(g.rows());
  Tensor4 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Mat low = R[i * 2 * n + j].transpose() * g;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out(i, j, k, l) = low(k, l);
    }
  return out;
}

}  // namespace bismut_lab::oracle
