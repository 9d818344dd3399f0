#pragma once

#include "bismut_lab/hermitian_core.hpp"

#include <cmath>

namespace bismut_lab {

/**
 * \brief Invariant metric pi^* (a omega_Sigma) + tr_h mu ^ J mu on a principal
 * T^2-bundle over a Riemann surface of constant curvature R_sigma, with
 * curvature F_mu = (F1, F2) omega_Sigma.
 */
struct KKState {
  double R_sigma = -2.0;
  double a = 1.0;
  RMat h = RMat::Identity(2, 2);
  std::array<double, 2> F{0.0, 0.0};

  void validate() const {
    if (!(a > 0.0)) throw NonPositiveMetric("base scale a must be positive");
    if (h.rows() != 2 || h.cols() != 2) throw DimensionMismatch("fiber metric must be 2x2");
    if (std::abs(h(0, 1) - h(1, 0)) > 1e-14 * std::max(1.0, h.cwiseAbs().maxCoeff()))
      throw ConfigError("fiber metric must be symmetric");
    if (!(h(0, 0) > 0.0) || !(h.determinant() > 0.0)) throw NonPositiveMetric("fiber metric must be positive");
  }

  /** J-averaged fiber coefficient k = (h11 + h22) / 2. */
  double fiber_scale() const { return 0.5 * (h(0, 0) + h(1, 1)); }
  /** |F|^2 measured with omega_Sigma and h. */
  double curvature_norm2() const { return 2.0 * fiber_scale() * (F[0] * F[0] + F[1] * F[1]); }
  /** Area of a T^2 fiber. */
  double fiber_area() const { return fiber_scale(); }
  /** tr_omega pi^* omega_Sigma */
  double base_trace() const { return 1.0 / a; }
};

/** Coefficient of pi^*omega_Sigma (x) pi^*omega_Sigma in Omega^B, and the Bismut-Ricci form. */
struct KKCurvature {
  double coefficient = 0.0;  ///< (R_sigma / a - |F|^2 / a^2) / 2
  double adot = 0.0;         ///< base scale velocity under the flow
  Mat rho11;                 ///< in the frame (base, fiber)
  Mat rho20;
};

inline KKCurvature kk_curvature(const KKState& st) {
  st.validate();
  KKCurvature c;
  c.coefficient = 0.5 * (st.R_sigma / st.a - st.curvature_norm2() / (st.a * st.a));
  c.adot = -0.5 * (st.R_sigma - st.curvature_norm2() / st.a);
  c.rho11 = Mat::Zero(2, 2);
  c.rho11(0, 0) = c.coefficient * st.a;
  c.rho20 = Mat::Zero(2, 2);
  return c;
}

/** Exact base scale for adot = p + q / a, a(0) = a0. */
inline double kk_exact_scale(double R_sigma, double F2, double a0, double t) {
  const double p = -0.5 * R_sigma;
  const double q = 0.5 * F2;
  if (std::abs(p) < 1e-300) return std::sqrt(a0 * a0 + 2.0 * q * t);
  if (std::abs(q) < 1e-300) return a0 + p * t;
  // t(a) = (a - a0)/p - (q/p^2) log((p a + q)/(p a0 + q)), monotone in a
  auto tau = [&](double x) { return (x - a0) / p - q / (p * p) * std::log((p * x + q) / (p * a0 + q)); };
  auto dtau = [&](double x) { return x / (p * x + q); };
  double x = a0 + p * t;
  for (int it = 0; it < 100; ++it) {
    const double step = (tau(x) - t) / dtau(x);
    x -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

/** Kahler potential data of the base at a chart point: phi_w, phi_ww, phi_www, sigma = phi_{w wbar} and its derivatives. */
struct BasePotential {
  cd phi_w, phi_ww, phi_www;
  double sigma;
  cd sigma_w, sigma_ww;
  double sigma_wwbar;
};

/**
 * Base chart: upper half plane for R < 0, the plane for R = 0, affine chart
 * of the sphere for R > 0; curvature R_sigma in each case.
 */
inline BasePotential base_potential(double R_sigma, cd w) {
  BasePotential p{};
  if (R_sigma < 0.0) {
    const double lam = 2.0 / std::abs(R_sigma);
    const double y = w.imag();
    if (!(y > 0.0)) throw DimensionMismatch("hyperbolic chart needs Im w > 0");
    p.phi_w = I_unit * lam / y;
    p.phi_ww = -lam / (2 * y * y);
    p.phi_www = -I_unit * lam / (2 * y * y * y);
    p.sigma = lam / (2 * y * y);
    p.sigma_w = I_unit * lam / (2 * y * y * y);
    p.sigma_ww = -3 * lam / (4 * y * y * y * y);
    p.sigma_wwbar = 3 * lam / (4 * y * y * y * y);
  } else if (R_sigma == 0.0) {
    p.phi_w = 0.5 * std::conj(w);
    p.phi_ww = 0.0;
    p.phi_www = 0.0;
    p.sigma = 0.5;
    p.sigma_w = 0.0;
    p.sigma_ww = 0.0;
    p.sigma_wwbar = 0.0;
  } else {
    const double lam = 2.0 / R_sigma;
    const double q = 1.0 + std::norm(w);
    const cd wb = std::conj(w);
    p.phi_w = 2 * lam * wb / q;
    p.phi_ww = -2 * lam * wb * wb / (q * q);
    p.phi_www = 4 * lam * wb * wb * wb / (q * q * q);
    p.sigma = 2 * lam / (q * q);
    p.sigma_w = -4 * lam * wb / (q * q * q);
    p.sigma_ww = 12 * lam * wb * wb / (q * q * q * q);
    p.sigma_wwbar = -4 * lam * (1.0 - 2.0 * std::norm(w)) / (q * q * q * q);
  }
  return p;
}

/** Default chart point for the base. */
inline cd kk_default_point(double R_sigma) { return R_sigma < 0.0 ? cd(0.0, 1.0) : cd(0.0, 0.0); }

/** Closed-form chart metric at (w, zeta) for oracle comparisons. */
inline Mat kk_chart_metric(const KKState& st, cd w) {
  const BasePotential p = base_potential(st.R_sigma, w);
  const cd c(st.F[0], st.F[1]);
  const double k2 = 0.5 * st.fiber_scale();
  const cd u = -I_unit * c * p.phi_w;
  Mat g(2, 2);
  g(0, 0) = st.a * p.sigma + k2 * std::norm(u);
  g(0, 1) = k2 * u;
  g(1, 0) = k2 * std::conj(u);
  g(1, 1) = k2;
  return g;
}

/**
 * Jet of the ansatz in holomorphic coordinates (w, zeta) with
 * theta = d zeta - i c phi_w dw, c = F1 + i F2:
 * g = a sigma dw dwbar + (k/2) theta thetabar.
 */
inline MetricJet kk_chart_jet(const KKState& st, cd w) {
  st.validate();
  const BasePotential p = base_potential(st.R_sigma, w);
  const cd c(st.F[0], st.F[1]);
  const cd cb = std::conj(c);
  const double k2 = 0.5 * st.fiber_scale();
  const cd u = -I_unit * c * p.phi_w;
  const cd ub = std::conj(u);
  const cd u_w = -I_unit * c * p.phi_ww;
  const cd u_wb = -I_unit * c * p.sigma;
  const cd u_wwb = -I_unit * c * p.sigma_w;
  const cd u_ww = -I_unit * c * p.phi_www;
  const cd ub_w = I_unit * cb * p.sigma;
  const cd ub_wb = std::conj(u_w);
  const cd ub_wwb = I_unit * cb * std::conj(p.sigma_w);
  const cd ub_ww = I_unit * cb * p.sigma_w;
  MetricJet jet(2);
  jet.g = kk_chart_metric(st, w);
  const cd n_w = u_w * ub + u * ub_w;
  const cd n_wwb = u_wwb * ub + u_w * ub_wb + u_wb * ub_w + u * ub_wwb;
  const cd n_ww = u_ww * ub + 2.0 * u_w * ub_w + u * ub_ww;
  jet.dg(0, 0, 0) = st.a * p.sigma_w + k2 * n_w;
  jet.dg(0, 0, 1) = k2 * u_w;
  jet.dg(0, 1, 0) = k2 * ub_w;
  jet.d2g(0, 0, 0, 0) = st.a * p.sigma_wwbar + k2 * n_wwb;
  jet.d2g(0, 1, 0, 0) = k2 * u_wwb;
  jet.d2g(1, 0, 0, 0) = k2 * ub_wwb;
  jet.ddg(0, 0, 0, 0) = st.a * p.sigma_ww + k2 * n_ww;
  jet.ddg(0, 1, 0, 0) = k2 * u_ww;
  jet.ddg(1, 0, 0, 0) = k2 * ub_ww;
  return jet;
}

}  // namespace bismut_lab
