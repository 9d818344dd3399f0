#pragma once

#include "bismut_lab/hermitian_core.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace bismut_lab {

/** Real periodic grid on [0, L) with Fourier differentiation. */
class FourierGrid {
 public:
  FourierGrid() = default;
  FourierGrid(int N, double L) : N_(N), L_(L) {
    if (N < 4 || (N & (N - 1)) != 0) throw ConfigError("grid size must be a power of two >= 4");
    if (!(L > 0.0)) throw ConfigError("period must be positive");
    D1_ = RMat::Zero(N, N);
    const double kappa = 2.0 * std::numbers::pi / L;
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        double s = 0.0;
        for (int m = 1; m < N / 2; ++m) s -= 2.0 * m * kappa * std::sin(m * kappa * (j - l) * L / N);
        D1_(j, l) = s / N;
      }
    D2_ = D1_ * D1_;
  }

  int size() const { return N_; }
  double period() const { return L_; }
  double node(int j) const { return j * L_ / N_; }
  /** First derivative matrix; the Nyquist mode is annihilated. */
  const RMat& d1() const { return D1_; }
  /** D1 squared. */
  const RMat& d2() const { return D2_; }

  /** D1 f and D2 f applied to the mean-free part, so constants differentiate to exactly zero. */
  Eigen::VectorXd diff1(const Eigen::VectorXd& f) const { return D1_ * (f.array() - f.mean()).matrix(); }
  Eigen::VectorXd diff2(const Eigen::VectorXd& f) const { return D2_ * (f.array() - f.mean()).matrix(); }

  /** Trigonometric interpolant of grid values and its first two derivatives at s. */
  std::array<double, 3> evaluate(const Eigen::VectorXd& f, double s) const {
    const double kappa = 2.0 * std::numbers::pi / L_;
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (int m = 0; m <= N_ / 2; ++m) {
      double c = 0.0, d = 0.0;
      for (int j = 0; j < N_; ++j) {
        c += f(j) * std::cos(m * kappa * node(j));
        d += f(j) * std::sin(m * kappa * node(j));
      }
      const double w = (m == 0 || m == N_ / 2) ? 1.0 / N_ : 2.0 / N_;
      c *= w;
      d *= w;
      const double th = m * kappa * s;
      const double cs = std::cos(th), sn = std::sin(th);
      out[0] += c * cs + d * sn;
      if (m == N_ / 2) continue;
      const double k = m * kappa;
      out[1] += k * (-c * sn + d * cs);
      out[2] += -k * k * (c * cs + d * sn);
    }
    return out;
  }

 private:
  int N_ = 0;
  double L_ = 0.0;
  RMat D1_, D2_;
};

/** Profile values at one s: a, a', a'', b, b', b''. */
struct ProfileValues {
  double a = 1.0, a1 = 0.0, a2 = 0.0, b = 0.0, b1 = 0.0, b2 = 0.0;
};

/**
 * Jet of omega = a(s) omega_Hopf + b(s) i eta ^ etabar with s = log|z|^2,
 * eta = d log|z|^2 (complex dimension 2). In coordinates
 * g_{i jbar} = a delta_ij / |z|^2 + b zbar_i z_j / |z|^4.
 */
inline MetricJet hopf_jet_from_values(const Vec& z, const ProfileValues& p) {
  if (z.size() != 2) throw DimensionMismatch("Hopf jets live in complex dimension 2");
  const double r2 = z.squaredNorm();
  if (!(r2 > 0.0)) throw DimensionMismatch("Hopf chart excludes the origin");
  if (!(p.a > 0.0) || !(p.a + p.b > 0.0)) throw NonPositiveMetric("profile fails a > 0, a + b > 0");
  const double e = 1.0 / r2, e2 = e * e;
  const double al = p.a * e, al1 = (p.a1 - p.a) * e, al2 = (p.a2 - 2 * p.a1 + p.a) * e;
  const double ga = p.b * e2, ga1 = (p.b1 - 2 * p.b) * e2, ga2 = (p.b2 - 4 * p.b1 + 4 * p.b) * e2;
  const Vec zb = z.conjugate();
  auto del = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  auto sk = [&](int k) { return zb(k) * e; };
  auto sbl = [&](int l) { return z(l) * e; };
  auto dbs = [&](int k, int l) { return del(k, l) * e - zb(k) * z(l) * e2; };
  auto dds = [&](int m, int k) { return -zb(k) * zb(m) * e2; };
  MetricJet jet(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) jet.g(i, j) = al * del(i, j) + ga * zb(i) * z(j);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const cd zz = zb(i) * z(j);
        jet.dg(k, i, j) = al1 * sk(k) * del(i, j) + ga1 * sk(k) * zz + ga * zb(i) * del(j, k);
        for (int l = 0; l < 2; ++l) {
          jet.d2g(i, j, k, l) = al2 * sbl(l) * sk(k) * del(i, j) + al1 * dbs(k, l) * del(i, j) +
                                ga2 * sbl(l) * sk(k) * zz + ga1 * dbs(k, l) * zz +
                                ga1 * sk(k) * del(i, l) * z(j) + ga1 * sbl(l) * zb(i) * del(j, k) +
                                ga * del(i, l) * del(j, k);
          jet.ddg(i, j, k, l) = al2 * sk(l) * sk(k) * del(i, j) + al1 * dds(l, k) * del(i, j) +
                                ga2 * sk(l) * sk(k) * zz + ga1 * dds(l, k) * zz +
                                ga1 * sk(k) * zb(i) * del(j, l) + ga1 * sk(l) * zb(i) * del(j, k);
        }
      }
  return jet;
}

/** Closed-form metric of the profile family at z (for oracle use). */
inline Mat hopf_metric(const Vec& z, double a, double b) {
  const double r2 = z.squaredNorm();
  return a * Mat::Identity(2, 2) / r2 + b * (z.conjugate() * z.transpose()) / (r2 * r2);
}

/**
 * \brief U(2)-invariant Hermitian forms on the standard Hopf surface
 * C^2 \ 0 / (z ~ alpha z), described by two periodic profiles in s = log|z|^2.
 */
struct HopfRadialState {
  double alpha_modulus = std::exp(-std::numbers::pi);
  FourierGrid grid;
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  HopfRadialState() = default;
  HopfRadialState(double alpha, int N) : alpha_modulus(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha_modulus must lie in (0,1)");
    grid = FourierGrid(N, -2.0 * std::log(alpha));
    a = Eigen::VectorXd::Ones(N);
    b = Eigen::VectorXd::Zero(N);
  }

  int size() const { return grid.size(); }
  double period() const { return grid.period(); }

  /** Point (e^{s_j/2}, 0) on the ray through grid node j. */
  Vec node_point(int j) const {
    Vec z = Vec::Zero(2);
    z(0) = std::exp(0.5 * grid.node(j));
    return z;
  }

  ProfileValues node_values(int j) const {
    const Eigen::VectorXd a1 = grid.diff1(a), a2 = grid.diff2(a);
    const Eigen::VectorXd b1 = grid.diff1(b), b2 = grid.diff2(b);
    return {a(j), a1(j), a2(j), b(j), b1(j), b2(j)};
  }

  /** Profile values and derivatives at every node. */
  std::vector<ProfileValues> all_node_values() const {
    const Eigen::VectorXd a1 = grid.diff1(a), a2 = grid.diff2(a);
    const Eigen::VectorXd b1 = grid.diff1(b), b2 = grid.diff2(b);
    std::vector<ProfileValues> v(size());
    for (int j = 0; j < size(); ++j) v[j] = {a(j), a1(j), a2(j), b(j), b1(j), b2(j)};
    return v;
  }

  ProfileValues values_at(double s) const {
    const double L = period();
    double sr = std::fmod(s, L);
    if (sr < 0) sr += L;
    const auto av = grid.evaluate(a, sr);
    const auto bv = grid.evaluate(b, sr);
    return {av[0], av[1], av[2], bv[0], bv[1], bv[2]};
  }

  /** Aeppli constant: mean of a + b. */
  double aeppli_constant() const { return (a + b).mean(); }
};

/** Boothby state a = 1, b = 0. */
inline HopfRadialState boothby_state(double alpha = std::exp(-std::numbers::pi), int N = 64) {
  return HopfRadialState(alpha, N);
}

/** Jet of the profile family at any nonzero z. */
inline MetricJet hopf_jet(const HopfRadialState& st, const Vec& z) {
  if (z.size() != 2) throw DimensionMismatch("Hopf jets live in complex dimension 2");
  return hopf_jet_from_values(z, st.values_at(std::log(z.squaredNorm())));
}

/** Jet at grid node j using the grid differentiation matrices. */
inline MetricJet hopf_node_jet(const HopfRadialState& st, int j) {
  return hopf_jet_from_values(st.node_point(j), st.node_values(j));
}

/** Pointwise |dbar T| at each grid node. */
inline Eigen::VectorXd hopf_pluriclosed_constraint(const HopfRadialState& st) {
  const auto vals = st.all_node_values();
  Eigen::VectorXd r(st.size());
  for (int j = 0; j < st.size(); ++j) r(j) = pluriclosed_defect(hopf_jet_from_values(st.node_point(j), vals[j]));
  return r;
}

/**
 * Least-squares adjustment of b onto the pluriclosed family b = a' + c - a,
 * c constant. Returns the max-abs change of b.
 */
inline double hopf_project(HopfRadialState& st) {
  const double c = st.aeppli_constant();
  const Eigen::VectorXd nb = st.grid.diff1(st.a) + Eigen::VectorXd::Constant(st.size(), c) - st.a;
  const double change = (nb - st.b).cwiseAbs().maxCoeff();
  st.b = nb;
  return change;
}

/** Positivity of the Hermitian form at every node. */
inline bool hopf_positive(const HopfRadialState& st) {
  return st.a.minCoeff() > 0.0 && (st.a + st.b).minCoeff() > 0.0;
}

/** a = base + amplitude cos(2 pi m s / L), b projected; throws NonPositiveMetric when not positive. */
inline HopfRadialState perturbed_hopf(double amplitude, int mode = 1, double alpha = std::exp(-std::numbers::pi),
                                      int N = 64) {
  HopfRadialState st(alpha, N);
  for (int j = 0; j < N; ++j)
    st.a(j) = 1.0 + amplitude * std::cos(2.0 * std::numbers::pi * mode * st.grid.node(j) / st.period());
  st.b = Eigen::VectorXd::Zero(N);
  const double shift = 1.0 - st.aeppli_constant();
  st.b.array() += shift;
  hopf_project(st);
  if (!hopf_positive(st)) throw NonPositiveMetric("perturbed profile is not positive");
  return st;
}

}  // namespace bismut_lab
