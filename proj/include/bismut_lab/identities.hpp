#pragma once

#include "bismut_lab/oracle.hpp"

#include <map>
#include <random>
#include <string>
#include <vector>

namespace bismut_lab {

struct IdentitySuiteConfig {
  std::uint64_t seed = 42;
  int count = 100;  ///< jets per dimension
  std::vector<int> dims{2, 3};
  double tolerance = 1e-8;
  double fd_step = 1e-3;
  bool inject_sign_flip = false;  ///< negative control: corrupts the (2,0) curvature
};

struct IdentityResult {
  double max_residual = 0.0;
  int evaluated = 0;
  int skipped = 0;
};

struct IdentityReport {
  std::map<std::string, IdentityResult> results;
  double tolerance = 1e-8;
  bool pass() const {
    for (const auto& [k, r] : results)
      if (!(r.max_residual < tolerance)) return false;
    return true;
  }
};

inline const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{
      "bismut11_routes",       // pluriclosed formula vs general formula
      "bismut11_fd",           // (1,1) curvature vs finite differences
      "bismut20_fd",           // (2,0) curvature vs finite differences
      "gen_connection",        // block formulas vs compatibility solve
      "gen_curvature_fd",      // conjugation formula vs finite differences, beta != 0
      "bismut_identity_psi",   // psi-conjugate of R^- vs curvature of G, beta = 0
      "curvature_flip",        // R^B(X,Y,Z,W) = R^-(Z,W,X,Y)
      "second_ricci_trace",    // block formula vs trace of curvature of G
      "trace_identity",        // tr_G G0 vs tr_g g0 + tr_g0 g + |beta|^2
      "flow_equivalence",      // classical vs generalized velocity
  };
  return names;
}

/** Random pluriclosed jet with a moderately conditioned metric. */
template <class Rng>
MetricJet sample_pluriclosed_jet(int n, Rng& rng) {
  MetricJet j = random_jet(n, rng, 0.1);
  j.g += Mat::Identity(n, n);
  return project_pluriclosed(j);
}

namespace identity_detail {

inline void record(IdentityReport& rep, const std::string& name, double r) {
  auto& e = rep.results[name];
  e.max_residual = std::max(e.max_residual, std::isnan(r) ? std::numeric_limits<double>::infinity() : r);
  ++e.evaluated;
}

}  // namespace identity_detail

inline IdentityReport run_identity_suite(const IdentitySuiteConfig& cfg) {
  using identity_detail::record;
  IdentityReport rep;
  rep.tolerance = cfg.tolerance;
  for (const auto& name : identity_names()) rep.results[name] = {};
  std::mt19937_64 rng(cfg.seed);
  for (int n : cfg.dims) {
    if (n < 2 || n > 4) throw ConfigError("identity suite supports 2 <= n <= 4");
    for (int it = 0; it < cfg.count; ++it) {
      const MetricJet jet = sample_pluriclosed_jet(n, rng);
      TorsionPotential tp = random_potential(n, rng);
      tp.beta *= 0.5;
      BismutCurvature bc = bismut_curvature(jet, true);
      if (cfg.inject_sign_flip) bc.omega20 *= -1.0;
      const Vec z0 = Vec::Zero(n);
      const oracle::PolynomialField field(jet);

      record(rep, "bismut11_routes", bc.route_residual);

      const auto RB = oracle::fd_curvature(oracle::bismut_field(field), z0, cfg.fd_step);
      record(rep, "bismut11_fd", relative_residual(bc.omega11, oracle::lower11(RB, jet.g)));
      record(rep, "bismut20_fd", relative_residual(bc.omega20, oracle::lower20(RB, jet.g)));

      const FirstOrder fo = first_order(jet, tp);
      const GenConnection closed = gen_chern_connection(jet, tp);
      const GenConnection solved = gen_connection_compat(fo);
      double rc = 0.0;
      for (int i = 0; i < n; ++i) rc = std::max(rc, relative_residual(closed.holo[i], solved.holo[i]));
      record(rep, "gen_connection", rc);

      CurvatureBlocks om = gen_curvature_untwisted(jet, bc);
      {
        const Mat E = bfield_matrix(tp.beta), Ei = bfield_matrix(-tp.beta);
        CurvatureBlocks twisted = om;
        for (auto& F : twisted) F = Ei * F * E;
        if (tp.d2beta) {
          const oracle::PolynomialPotential pot(tp);
          const auto RG = oracle::fd_curvature(oracle::generalized_field(field, pot), z0, cfg.fd_step);
          double r = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r = std::max(r, relative_residual(twisted[i * n + j], RG[i * 2 * n + n + j]));
          record(rep, "gen_curvature_fd", r);
        } else {
          ++rep.results["gen_curvature_fd"].skipped;
        }
        const Mat S_block = second_ricci(jet.g, bismut_ricci(bc, inverse_metric(jet.g)), tp.beta);
        record(rep, "second_ricci_trace", relative_residual(S_block, second_ricci_trace(jet, twisted)));
      }

      {
        const auto RM = oracle::fd_curvature(oracle::minus_field(field), z0, cfg.fd_step);
        const Mat P = psi_matrix(jet.g);
        const Mat Pi = P.inverse();
        double r = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) r = std::max(r, relative_residual(P * RM[i * 2 * n + n + j] * Pi, om[i * n + j]));
        record(rep, "bismut_identity_psi", r);
      }

      {
        const auto full = full_bismut_tensor(bc);
        const auto minus = lower_endomorphisms(minus_curvature_from_G(jet, bc), jet.g);
        const int N = 2 * n;
        double diff = 0.0, scale = 1.0;
        for (int a = 0; a < N; ++a)
          for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
              for (int d = 0; d < N; ++d) {
                const cd l = full[((a * N + b) * N + c) * N + d];
                diff = std::max(diff, std::abs(l - minus[((c * N + d) * N + a) * N + b]));
                scale = std::max(scale, std::abs(l));
              }
        record(rep, "curvature_flip", diff / scale);
      }

      {
        const Mat A = random_complex_matrix(n, n, rng);
        const Mat g0 = A * A.adjoint() + Mat::Identity(n, n);
        const double lhs = trace_G(generalized_metric_matrix(jet.g, tp.beta), generalized_metric_matrix(g0, Mat::Zero(n, n)));
        const double rhs = classical_trace(jet.g, g0, tp.beta);
        record(rep, "trace_identity", std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }

      {
        const BismutRicci rho = bismut_ricci(bc, inverse_metric(jet.g));
        const MetricVelocity vc = classical_velocity(rho);
        const MetricVelocity vg = generalized_velocity(jet.g, tp.beta, second_ricci(jet.g, rho, tp.beta));
        record(rep, "flow_equivalence",
               std::max(relative_residual(vg.gdot, vc.gdot), relative_residual(vg.betadot, vc.betadot)));
      }
    }
  }
  return rep;
}

}  // namespace bismut_lab
