#pragma once

#include "bismut_lab/errors.hpp"
#include "bismut_lab/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace bismut_lab {

/** Dense real rank-3 array with uniform extent d, row-major. */
class RealTensor3 {
 public:
  RealTensor3() = default;
  explicit RealTensor3(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d, 0.0) {}
  int dim() const { return d_; }
  double& operator()(int i, int j, int k) { return v_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
  double operator()(int i, int j, int k) const { return v_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  int d_ = 0;
  std::vector<double> v_;
};

/**
 * \brief Left-invariant data on a compact Lie group.
 *
 * c(i,j,k) = c^k_{ij} with [e_i, e_j] = c^k_{ij} e_k; metric(i,j) = <e_i, e_j>;
 * J acts on coordinate columns.
 */
struct LieGroupData {
  std::string name;
  int dim = 0;
  RealTensor3 c;
  RMat metric;
  RMat J;
  int rank = 0;  ///< leading basis vectors spanning a maximal torus, when known
};

namespace lie_detail {

/** Anti-Hermitian basis elements of a block-diagonal matrix realization. */
struct MatrixBasis {
  int size = 0;
  std::vector<Mat> elems;
  std::vector<bool> diagonal;
};

inline void append_block(MatrixBasis& mb, const std::vector<Mat>& block, int offset, int total) {
  for (const auto& m : block) {
    Mat e = Mat::Zero(total, total);
    e.block(offset, offset, m.rows(), m.cols()) = m;
    mb.elems.push_back(e);
    bool diag = true;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (i != j && std::abs(m(i, j)) > 0.0) diag = false;
    mb.diagonal.push_back(diag);
  }
}

inline std::vector<Mat> su2_block() {
  Mat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -I_unit, I_unit, 0;
  s3 << 1, 0, 0, -1;
  return {0.5 * I_unit * s3, 0.5 * I_unit * s1, 0.5 * I_unit * s2};
}

inline std::vector<Mat> u1_block() {
  Mat m(1, 1);
  m(0, 0) = I_unit / std::sqrt(2.0);
  return {m};
}

inline std::vector<Mat> su3_block() {
  std::vector<Mat> l(8, Mat::Zero(3, 3));
  l[0](0, 1) = l[0](1, 0) = 1;
  l[1](0, 1) = -I_unit;
  l[1](1, 0) = I_unit;
  l[2](0, 0) = 1;
  l[2](1, 1) = -1;
  l[3](0, 2) = l[3](2, 0) = 1;
  l[4](0, 2) = -I_unit;
  l[4](2, 0) = I_unit;
  l[5](1, 2) = l[5](2, 1) = 1;
  l[6](1, 2) = -I_unit;
  l[6](2, 1) = I_unit;
  l[7](0, 0) = l[7](1, 1) = 1.0 / std::sqrt(3.0);
  l[7](2, 2) = -2.0 / std::sqrt(3.0);
  const std::vector<int> order{2, 7, 0, 1, 3, 4, 5, 6};
  std::vector<Mat> out;
  for (int k : order) out.push_back(0.5 * I_unit * l[k]);
  return out;
}

/** Orthonormal coefficients of a matrix in the basis, <X,Y> = -2 tr(XY). */
inline Eigen::VectorXd coordinates(const MatrixBasis& mb, const Mat& X) {
  Eigen::VectorXd v(mb.elems.size());
  for (std::size_t k = 0; k < mb.elems.size(); ++k) v(k) = (-2.0 * (X * mb.elems[k]).trace()).real();
  return v;
}

}  // namespace lie_detail

/** Structure constants computed from a matrix realization. */
inline RealTensor3 structure_constants(const lie_detail::MatrixBasis& mb) {
  const int d = static_cast<int>(mb.elems.size());
  RealTensor3 c(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Mat br = mb.elems[i] * mb.elems[j] - mb.elems[j] * mb.elems[i];
      const Eigen::VectorXd v = lie_detail::coordinates(mb, br);
      for (int k = 0; k < d; ++k) c(i, j, k) = v(k);
    }
  return c;
}

/** ad_X as a matrix acting on coordinate columns. */
inline RMat ad_matrix(const RealTensor3& c, const Eigen::VectorXd& x) {
  const int d = c.dim();
  RMat A = RMat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) A(k, j) += x(i) * c(i, j, k);
  return A;
}

inline Eigen::VectorXd bracket(const RealTensor3& c, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return ad_matrix(c, u) * v;
}

/** Real J with +i eigenspace spanned by the columns of S (dim/2 independent complex vectors). */
inline RMat complex_structure_from(const Mat& S) {
  const int d = static_cast<int>(S.rows());
  const int h = static_cast<int>(S.cols());
  if (2 * h != d) throw InvalidLieData("subspace must have half the real dimension");
  Mat B(d, d);
  B.leftCols(h) = S;
  B.rightCols(h) = S.conjugate();
  Mat D = Mat::Zero(d, d);
  for (int k = 0; k < h; ++k) {
    D(k, k) = I_unit;
    D(h + k, h + k) = -I_unit;
  }
  Eigen::FullPivLU<Mat> lu(B);
  if (!lu.isInvertible()) throw InvalidLieData("subspace meets its conjugate");
  const Mat J = B * D * lu.inverse();
  return J.real();
}

/**
 * Samelson complex structure: positive root spaces of a regular torus element
 * plus isotropic pairs t_1 + i t_2 of an orthonormal torus basis. The first
 * `rank` basis vectors must span a maximal torus.
 */
inline RMat samelson_structure(const RealTensor3& c, int rank) {
  const int d = c.dim();
  if (rank % 2 != 0) throw InvalidLieData("torus of odd dimension admits no isotropic splitting");
  Eigen::VectorXd hvec = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < rank; ++k) hvec(k) = 1.0 + std::sqrt(2.0 + k) * (k + 1);
  const RMat A = ad_matrix(c, hvec);
  Eigen::ComplexEigenSolver<Mat> es(A.cast<cd>());
  std::vector<Vec> cols;
  for (int k = 0; k < d; ++k)
    if (es.eigenvalues()(k).imag() > 1e-8) cols.push_back(es.eigenvectors().col(k));
  if (static_cast<int>(cols.size()) * 2 + rank != d) throw InvalidLieData("torus element is not regular");
  Mat S(d, d / 2);
  int col = 0;
  for (const auto& v : cols) S.col(col++) = v;
  for (int k = 0; k < rank; k += 2) {
    Vec v = Vec::Zero(d);
    v(k) = 1.0;
    v(k + 1) = I_unit;
    S.col(col++) = v;
  }
  return complex_structure_from(S);
}

/** Named compact algebras: "u1^<2m>", "su2+u1", "su2+su2", "su3". */
inline LieGroupData lie_algebra(const std::string& name) {
  using namespace lie_detail;
  MatrixBasis mb;
  LieGroupData data;
  data.name = name;
  std::vector<std::vector<Mat>> blocks;
  if (name.rfind("u1^", 0) == 0) {
    const int m = std::stoi(name.substr(3));
    if (m < 2 || m % 2 != 0) throw InvalidLieData("abelian algebra needs even positive dimension");
    for (int k = 0; k < m; ++k) blocks.push_back(u1_block());
  } else if (name == "su2+u1") {
    blocks = {su2_block(), u1_block()};
  } else if (name == "su2+su2") {
    blocks = {su2_block(), su2_block()};
  } else if (name == "su3") {
    blocks = {su3_block()};
  } else {
    throw InvalidLieData("unknown algebra '" + name + "'");
  }
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.front().rows());
  int off = 0;
  for (const auto& b : blocks) {
    append_block(mb, b, off, total);
    off += static_cast<int>(b.front().rows());
  }
  // torus directions first
  std::vector<int> perm;
  for (std::size_t k = 0; k < mb.elems.size(); ++k)
    if (mb.diagonal[k]) perm.push_back(static_cast<int>(k));
  data.rank = static_cast<int>(perm.size());
  for (std::size_t k = 0; k < mb.elems.size(); ++k)
    if (!mb.diagonal[k]) perm.push_back(static_cast<int>(k));
  MatrixBasis sorted;
  sorted.size = total;
  for (int k : perm) {
    sorted.elems.push_back(mb.elems[k]);
    sorted.diagonal.push_back(mb.diagonal[k]);
  }
  data.dim = static_cast<int>(sorted.elems.size());
  data.c = structure_constants(sorted);
  data.metric = RMat::Identity(data.dim, data.dim);
  data.J = samelson_structure(data.c, data.rank);
  return data;
}

/**
 * Non-integrable orthogonal almost complex structure on su2+su2 pairing a root
 * direction of the first factor with the torus direction of the second.
 */
inline LieGroupData mixed_structure_counterexample() {
  LieGroupData d = lie_algebra("su2+su2");
  // basis: t1, t2, X1, X2, Y1, Y2
  const int pairs[3][2] = {{2, 1}, {3, 4}, {0, 5}};
  Mat S = Mat::Zero(6, 3);
  for (int c = 0; c < 3; ++c) {
    S(pairs[c][0], c) = 1.0;
    S(pairs[c][1], c) = I_unit;
  }
  d.J = complex_structure_from(S);
  d.name = "su2+su2/mixed";
  return d;
}

struct LieResiduals {
  double jacobi = 0.0;
  double ad_invariance = 0.0;
  double antisymmetry = 0.0;
  double j_square = 0.0;
  double j_orthogonal = 0.0;
};

inline LieResiduals lie_residuals(const LieGroupData& L) {
  const int d = L.dim;
  const RealTensor3& c = L.c;
  LieResiduals r;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        r.antisymmetry = std::max(r.antisymmetry, std::abs(c(i, j, k) + c(j, i, k)));
        for (int l = 0; l < d; ++l) {
          double jac = 0.0;
          for (int m = 0; m < d; ++m) jac += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) + c(k, i, m) * c(m, j, l);
          r.jacobi = std::max(r.jacobi, std::abs(jac));
        }
        double inv = 0.0;
        for (int m = 0; m < d; ++m) inv += c(i, j, m) * L.metric(m, k) + c(i, k, m) * L.metric(j, m);
        r.ad_invariance = std::max(r.ad_invariance, std::abs(inv));
      }
  r.j_square = (L.J * L.J + RMat::Identity(d, d)).cwiseAbs().maxCoeff();
  r.j_orthogonal = (L.J.transpose() * L.metric * L.J - L.metric).cwiseAbs().maxCoeff();
  return r;
}

inline constexpr double kLieTolerance = 1e-12;

inline void validate_lie(const LieGroupData& L) {
  if (L.c.dim() != L.dim || L.metric.rows() != L.dim || L.J.rows() != L.dim)
    throw InvalidLieData("component sizes disagree");
  const LieResiduals r = lie_residuals(L);
  const double scale = std::max(1.0, L.c.max_abs());
  if (r.antisymmetry > kLieTolerance * scale) throw InvalidLieData("structure constants not antisymmetric");
  if (r.jacobi > kLieTolerance * scale * scale) throw InvalidLieData("Jacobi identity fails");
  if (r.ad_invariance > kLieTolerance * scale) throw InvalidLieData("metric is not ad-invariant");
  if (r.j_square > kLieTolerance) throw InvalidLieData("J^2 != -1");
  if (r.j_orthogonal > kLieTolerance) throw InvalidLieData("J is not orthogonal");
}

/** Cartan form H(e_i,e_j,e_k) = <[e_i,e_j], e_k>. */
inline RealTensor3 cartan_form(const LieGroupData& L) {
  const int d = L.dim;
  RealTensor3 H(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int m = 0; m < d; ++m) s += L.c(i, j, m) * L.metric(m, k);
        H(i, j, k) = s;
      }
  return H;
}

/** Chevalley-Eilenberg differential of a left-invariant 2-form. */
inline RealTensor3 ce_d2(const LieGroupData& L, const RMat& w) {
  const int d = L.dim;
  RealTensor3 out(d);
  auto wb = [&](int i, int j, int k) {  // w([e_i,e_j], e_k)
    double s = 0.0;
    for (int m = 0; m < d; ++m) s += L.c(i, j, m) * w(m, k);
    return s;
  };
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) out(i, j, k) = -wb(i, j, k) + wb(i, k, j) - wb(j, k, i);
  return out;
}

/** Max component of the Chevalley-Eilenberg differential of a left-invariant 3-form. */
inline double ce_d3_norm(const LieGroupData& L, const RealTensor3& H) {
  const int d = L.dim;
  auto hb = [&](int i, int j, int k, int l) {  // H([e_i,e_j], e_k, e_l)
    double s = 0.0;
    for (int m = 0; m < d; ++m) s += L.c(i, j, m) * H(m, k, l);
    return s;
  };
  double mx = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          const double v = -hb(a, b, c, e) + hb(a, c, b, e) - hb(a, e, b, c) - hb(b, c, a, e) + hb(b, e, a, c) -
                           hb(c, e, a, b);
          mx = std::max(mx, std::abs(v));
        }
  return mx;
}

/** Kahler form w(X,Y) = g(JX, Y). */
inline RMat kahler_form(const LieGroupData& L) { return L.J.transpose() * L.metric; }

/** Torsion 3-form d^c w(X,Y,Z) = -dw(JX,JY,JZ). */
inline RealTensor3 bismut_torsion(const LieGroupData& L) {
  const int d = L.dim;
  const RealTensor3 dw = ce_d2(L, kahler_form(L));
  RealTensor3 H(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            for (int e = 0; e < d; ++e) s += L.J(a, i) * L.J(b, j) * L.J(e, k) * dw(a, b, e);
        H(i, j, k) = -s;
      }
  return H;
}

/** Christoffel symbols gam(i,j,l): nabla_{e_i} e_j = gam(i,j,l) e_l, for LC + sign/2 H. */
inline RealTensor3 lie_connection(const LieGroupData& L, const RealTensor3& H, double sign) {
  const int d = L.dim;
  const RealTensor3 C = cartan_form(L);
  const RMat gi = L.metric.inverse();
  RealTensor3 low(d), gam(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) low(i, j, k) = 0.5 * (C(i, j, k) - C(j, k, i) + C(k, i, j)) + 0.5 * sign * H(i, j, k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += gi(l, k) * low(i, j, k);
        gam(i, j, l) = s;
      }
  return gam;
}

/** Max |R(e_i,e_j) e_k| over the basis for a left-invariant connection. */
inline double lie_curvature_norm(const LieGroupData& L, const RealTensor3& gam) {
  const int d = L.dim;
  double mx = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double s = 0.0;
          for (int m = 0; m < d; ++m)
            s += gam(j, k, m) * gam(i, m, l) - gam(i, k, m) * gam(j, m, l) - L.c(i, j, m) * gam(m, k, l);
          mx = std::max(mx, std::abs(s));
        }
  return mx;
}

struct LieFlatness {
  double r_minus = 0.0;
  double r_plus = 0.0;
  double torsion_vs_cartan = 0.0;  ///< min over signs of |d^c w -+ H_Cartan|
};

/** Curvature of nabla^{+-} = LC +- H/2 with H = d^c w. */
inline LieFlatness lie_flatness(const LieGroupData& L) {
  validate_lie(L);
  const RealTensor3 H = bismut_torsion(L);
  const RealTensor3 C = cartan_form(L);
  LieFlatness f;
  f.r_minus = lie_curvature_norm(L, lie_connection(L, H, -1.0));
  f.r_plus = lie_curvature_norm(L, lie_connection(L, H, 1.0));
  double dp = 0.0, dm = 0.0;
  const int d = L.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        dp = std::max(dp, std::abs(H(i, j, k) - C(i, j, k)));
        dm = std::max(dm, std::abs(H(i, j, k) + C(i, j, k)));
      }
  f.torsion_vs_cartan = std::min(dp, dm);
  return f;
}

/** Max |R^-| on the basis. */
inline double lie_bismut_flat_check(const LieGroupData& L) { return lie_flatness(L).r_minus; }

/** N(e_i, e_j) coordinates, indexed (i, j, k). */
inline RealTensor3 nijenhuis(const LieGroupData& L) {
  const int d = L.dim;
  RealTensor3 N(d);
  const RMat& J = L.J;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Eigen::VectorXd x = Eigen::VectorXd::Unit(d, i), y = Eigen::VectorXd::Unit(d, j);
      const Eigen::VectorXd jx = J * x, jy = J * y;
      const Eigen::VectorXd v =
          bracket(L.c, jx, jy) - bracket(L.c, x, y) - J * bracket(L.c, jx, y) - J * bracket(L.c, x, jy);
      for (int k = 0; k < d; ++k) N(i, j, k) = v(k);
    }
  return N;
}

struct CETorsionResiduals {
  double dH = 0.0;
  double r_minus = 0.0;
  double cartan_antisymmetry = 0.0;
};

/** Closedness of the Cartan form and flatness of nabla^- for su2+su2. */
inline CETorsionResiduals ce_torsion_check(const LieGroupData& L) {
  if (L.dim != 6) throw InvalidLieData("Calabi-Eckmann model is six-dimensional");
  validate_lie(L);
  CETorsionResiduals r;
  const RealTensor3 C = cartan_form(L);
  r.dH = ce_d3_norm(L, C);
  r.r_minus = lie_bismut_flat_check(L);
  for (int i = 0; i < L.dim; ++i)
    for (int j = 0; j < L.dim; ++j)
      for (int k = 0; k < L.dim; ++k)
        r.cartan_antisymmetry = std::max({r.cartan_antisymmetry, std::abs(C(i, j, k) + C(j, i, k)),
                                          std::abs(C(i, j, k) + C(i, k, j))});
  return r;
}

}  // namespace bismut_lab
