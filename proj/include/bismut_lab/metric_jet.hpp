#pragma once

#include "bismut_lab/errors.hpp"
#include "bismut_lab/tensor.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <string>

namespace bismut_lab {

/**
 * \brief Second-order jet of a Hermitian metric at a point of a chart.
 *
 * Index conventions (all indices in [0, n)):
 *  - g(i,j)        = g_{i jbar}
 *  - dg(k,i,j)     = d_k g_{i jbar}
 *  - d2g(i,j,k,l)  = d_k d_{lbar} g_{i jbar}
 *  - ddg(i,j,k,l)  = d_k d_l g_{i jbar}
 *
 * Anti-holomorphic first derivatives follow from reality:
 * d_{kbar} g_{i jbar} = conj(dg(k,j,i)).
 */
struct MetricJet {
  int n = 0;
  Mat g;
  Tensor3 dg;
  Tensor4 d2g;
  Tensor4 ddg;

  MetricJet() = default;
  explicit MetricJet(int dim)
      : n(dim), g(Mat::Zero(dim, dim)), dg(dim), d2g(dim), ddg(dim) {}

  /** d_{kbar} g_{i jbar} */
  cd dbar_g(int k, int i, int j) const { return std::conj(dg(k, j, i)); }
};

inline constexpr double kMaxCondition = 1e12;

/** Eigenvalues of the Hermitian part of g, ascending. */
inline Eigen::VectorXd metric_eigenvalues(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/** Throws SingularMetric unless g is Hermitian positive definite with condition <= 1e12. */
inline void validate_metric(const Mat& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw SingularMetric("metric must be a nonempty square matrix");
  const double herm = max_abs(g - g.adjoint());
  if (herm > 1e-10 * std::max(1.0, max_abs(g))) throw SingularMetric("metric is not Hermitian");
  const Eigen::VectorXd ev = metric_eigenvalues(g);
  if (!(ev(0) > 0.0)) throw SingularMetric("metric is not positive definite");
  if (ev(ev.size() - 1) / ev(0) > kMaxCondition) throw SingularMetric("metric condition number exceeds 1e12");
}

inline void validate_jet(const MetricJet& jet) {
  if (jet.n < 1 || jet.g.rows() != jet.n || jet.dg.dim() != jet.n || jet.d2g.dim() != jet.n ||
      jet.ddg.dim() != jet.n)
    throw DimensionMismatch("jet components disagree on the dimension");
  validate_metric(jet.g);
}

/**
 * Imposes the reality and symmetry conditions of a jet of a Hermitian metric:
 * g Hermitian, conj(d2g(i,j,k,l)) = d2g(j,i,l,k), ddg symmetric in (k,l).
 */
inline void enforce_reality(MetricJet& jet) {
  const int n = jet.n;
  jet.g = 0.5 * (jet.g + jet.g.adjoint()).eval();
  Tensor4 d2(n), dd(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          d2(i, j, k, l) = 0.5 * (jet.d2g(i, j, k, l) + std::conj(jet.d2g(j, i, l, k)));
          dd(i, j, k, l) = 0.5 * (jet.ddg(i, j, k, l) + jet.ddg(i, j, l, k));
        }
  jet.d2g = d2;
  jet.ddg = dd;
}

/**
 * Matrix U with U^T g conj(U) = Id: column a holds the components of an
 * orthonormal (1,0)-frame vector e_a = sum_i U(i,a) d_i.
 */
inline Mat unitary_frame(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw SingularMetric("Cholesky factorisation failed");
  const Mat L = llt.matrixL();
  return L.inverse().transpose();
}

/** Sample complex matrix with independent standard normal real and imaginary parts. */
template <class Rng>
Mat random_complex_matrix(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = cd(re, im);
    }
  return m;
}

template <std::size_t R, class Rng>
void fill_normal(Tensor<R>& t, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto& v : t.data()) {
    const double re = nd(rng);
    const double im = nd(rng);
    v = cd(re, im);
  }
}

/**
 * Random jet: g = A A^* + eps Id, derivatives with unit normal entries,
 * then symmetrised. Not yet pluriclosed.
 */
template <class Rng>
MetricJet random_jet(int n, Rng& rng, double eps = 0.1) {
  MetricJet jet(n);
  const Mat A = random_complex_matrix(n, n, rng);
  jet.g = A * A.adjoint() + eps * Mat::Identity(n, n);
  fill_normal(jet.dg, rng);
  fill_normal(jet.d2g, rng);
  fill_normal(jet.ddg, rng);
  enforce_reality(jet);
  return jet;
}

}  // namespace bismut_lab
