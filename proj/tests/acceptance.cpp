#include "bismut_lab/bismut_lab.hpp"

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

using namespace bismut_lab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %d [%s] %s: %s\n", id, ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec annulus_point(std::mt19937_64& rng, double L) {
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.0, L);
  Vec z(2);
  z << cd(N(rng), N(rng)), cd(N(rng), N(rng));
  return z.normalized() * std::exp(0.5 * U(rng));
}

void identity_suite() {
  const auto t0 = Clock::now();
  IdentitySuiteConfig cfg;
  cfg.seed = 2024;
  cfg.count = 500;
  cfg.dims = {2, 3};
  const IdentityReport rep = run_identity_suite(cfg);
  const double secs = seconds_since(t0);
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, r] : rep.results)
    if (r.max_residual >= worst) {
      worst = r.max_residual;
      worst_name = name;
    }
  report(1, "identity suite, 1000 jets", rep.pass() && secs < 60.0,
         "worst " + worst_name + fmt(" %.2e", worst) + fmt(", %.1f s", secs));
}

void hopf_flatness() {
  const HopfRadialState st = boothby_state();
  std::mt19937_64 rng(16);
  double om = 0.0, S = 0.0;
  for (int k = 0; k < 16; ++k) {
    const MetricJet j = hopf_jet(st, annulus_point(rng, st.period()));
    const BismutCurvature bc = bismut_curvature(j);
    om = std::max({om, bc.omega11.max_abs(), bc.omega20.max_abs()});
    S = std::max(S, second_ricci(j, TorsionPotential(2)).cwiseAbs().maxCoeff());
  }
  report(2, "Boothby flatness, 16 points", om < 1e-10 && S < 1e-10,
         fmt("|Omega^B| %.2e", om) + fmt(", |S| %.2e", S));
}

void hopf_convergence() {
  const auto t0 = Clock::now();
  const FlowState s = make_flow_state(perturbed_hopf(0.2, 1, std::exp(-std::numbers::pi), 64));
  IntegratorConfig cfg;
  cfg.method = Method::RK4;
  cfg.dt = 1e-3;
  cfg.t_end = 20.0;
  cfg.target = 1e-6;
  cfg.monitor_stride = 1;
  const FlowReference ref = default_reference(s);
  const RunResult r = run(s, cfg, ref);
  const double secs = seconds_since(t0);
  if (r.termination == "error") {
    report(3, "Hopf flow convergence", false, "run failed: " + r.error);
    return;
  }
  DecayOptions opt;
  opt.slack = 1e-8;
  opt.burn_in = 0.1;
  const DecayVerdicts v = monitor_decay(r.series, opt);
  const auto& h = r.final_state.hopf();
  const double c = s.hopf().aeppli_constant();
  const double spread = std::max(h.a.maxCoeff() - h.a.minCoeff(), h.b.maxCoeff() - h.b.minCoeff()) / c;
  const bool converged = r.termination == "converged";
  const bool ok = *v.trace_monotone && *v.upsilon_monotone && *v.upsilon_bound && converged && spread < 1e-5 &&
                  secs < 300.0;
  std::string d = std::string("(a) ") + (*v.trace_monotone ? "ok" : "fail") + fmt(" %.1e", v.worst_trace_increase);
  d += std::string(", (b) ") + (*v.upsilon_monotone ? "ok" : "fail") + fmt(" %.1e", v.worst_upsilon_increase);
  d += std::string(", (c) ") + (*v.upsilon_bound ? "ok" : "fail") + fmt(" ratio %.3f", v.worst_bound_ratio);
  d += std::string(", (d) ") + (converged ? fmt("rho < 1e-6 at t = %.3f", r.final_state.t) : "not converged") +
       fmt(", spread %.1e", spread) + fmt(", %.1f s", secs);
  report(3, "Hopf flow convergence", ok, d);
}

void kaluza_klein() {
  const auto t0 = Clock::now();
  KKState st;
  st.R_sigma = -2.0;
  st.a = 1.0;
  st.F = {0.5, 0.0};
  const FlowState s = make_flow_state(st);
  IntegratorConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 50.0;
  cfg.monitor_stride = 10;
  const RunResult r = run(s, cfg, default_reference(s));
  bool ok = r.termination == "t_end";
  double drift = 0.0;
  for (const auto& rec : r.series) drift = std::max(drift, std::abs(rec.fiber_area - st.fiber_area()));
  DecayOptions opt;
  opt.bismut_flat_reference = false;
  opt.R_sigma = st.R_sigma;
  const DecayVerdicts v = monitor_decay(r.series, opt);
  auto a_at = [&](double t) {
    for (const auto& rec : r.series)
      if (std::abs(rec.t - t) < 1e-9) return 1.0 / rec.base_trace;
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double T = cfg.t_end;
  const double s1 = (a_at(0.75 * T) - a_at(0.5 * T)) / (0.25 * T);
  const double s2 = (a_at(T) - a_at(0.75 * T)) / (0.25 * T);
  const double slope_change = std::abs(s2 - s1) / std::abs(s2);
  ok = ok && drift < 1e-10 && *v.base_trace_bound && slope_change < 0.01;

  KKState flat;
  flat.R_sigma = 0.0;
  flat.a = 1.0;
  flat.F = {1.0, 0.0};
  const FlowState f = make_flow_state(flat);
  IntegratorConfig fc;
  fc.dt = 1e-2;
  fc.t_end = 10.0;
  fc.monitor_stride = 10;
  const RunResult rf = run(f, fc, default_reference(f));
  const double ode_err = std::abs(rf.final_state.kk().a - kk_exact_scale(0.0, flat.curvature_norm2(), 1.0, 10.0));
  const double fiber_change = (rf.final_state.kk().h - flat.h).cwiseAbs().maxCoeff();
  const double secs = seconds_since(t0);
  ok = ok && rf.termination == "t_end" && ode_err < 1e-8 && fiber_change == 0.0 && secs < 60.0;
  report(4, "Kaluza-Klein estimates", ok,
         fmt("area drift %.1e", drift) + fmt(", base product max %.9f", v.worst_base_product) +
             fmt(", slope change %.2e", slope_change) + fmt(", flat-base ODE error %.1e", ode_err) +
             fmt(", fiber change %.1e", fiber_change) + fmt(", %.2f s", secs));
}

void stability_arithmetic() {
  const auto t0 = Clock::now();
  const HypersurfaceData h = hypersurface_invariants(5);
  bool ok = h.b2 == 53 && h.signature && *h.signature == -35 && h.h11 == 45;
  const auto g2 = curve_base_example(2);
  const auto g1 = curve_base_example(1);
  ok = ok && obstruction_verdict(g2.data, g2.submersion) == Verdict::NonExistence;
  ok = ok && obstruction_verdict(g1.data, g1.submersion) == Verdict::Inconclusive;
  const auto v = lattice_search(static_cast<int>((h.b2 - *h.signature) / 2), -1);
  ok = ok && lattice_square(v) == -1 && is_primitive(v) && pluriclosed_bundle_condition(5, lattice_square(v));
  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  report(5, "stability arithmetic", ok,
         "(b2, sig, h11) = (" + std::to_string(h.b2) + ", " + std::to_string(h.signature.value_or(0)) + ", " +
             std::to_string(h.h11) + "), genus 2 " + to_string(obstruction_verdict(g2.data, true)) + ", torus " +
             to_string(obstruction_verdict(g1.data, true)) + fmt(", %.3f s", secs));
}

void flow_equivalence() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> amp(0.02, 0.3);
  std::uniform_int_distribution<int> mode(1, 4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  int states = 0;
  int redrawn = 0;
  while (states < 80) {
    HopfRadialState h;
    try {
      h = perturbed_hopf(amp(rng), mode(rng), std::exp(-std::numbers::pi), 32);
    } catch (const NonPositiveMetric&) {
      ++redrawn;
      continue;
    }
    ++states;
    const FlowState s = make_flow_state(h);
    const Derivative c = rhs_classical(s);
    const Derivative g = rhs_generalized(s);
    for (std::size_t k = 0; k < c.v.size(); ++k) worst = std::max(worst, std::abs(c.v[k] - g.v[k]));
  }
  for (int k = 0; k < 20; ++k, ++states) {
    KKState st;
    st.R_sigma = 2.0 * U(rng);
    st.a = 1.0 + 0.5 * (U(rng) + 1.0);
    st.F = {U(rng), U(rng)};
    st.h << 1.0 + 0.3 * (U(rng) + 1.0), 0.2 * U(rng), 0.0, 1.0 + 0.3 * (U(rng) + 1.0);
    st.h(1, 0) = st.h(0, 1);
    const FlowState s = make_flow_state(st);
    const Derivative c = rhs_classical(s);
    const Derivative g = rhs_generalized(s);
    for (std::size_t i = 0; i < c.v.size(); ++i) worst = std::max(worst, std::abs(c.v[i] - g.v[i]));
  }
  report(6, "flow formulation equivalence", worst < 1e-9,
         std::to_string(states) + " states (" + std::to_string(redrawn) + " non-positive draws redrawn)" + fmt(", max discrepancy %.2e", worst));
}

void lie_suite() {
  double flat = 0.0, nij = 0.0;
  for (const char* name : {"u1^4", "su2+u1", "su2+su2", "su3"}) {
    const LieGroupData L = lie_algebra(name);
    flat = std::max(flat, lie_bismut_flat_check(L));
    nij = std::max(nij, nijenhuis(L).max_abs());
  }
  const CETorsionResiduals ce = ce_torsion_check(lie_algebra("su2+su2"));
  report(7, "Lie group suite", flat < 1e-12 && nij < 1e-12 && ce.dH < 1e-12,
         fmt("flatness %.1e", flat) + fmt(", Nijenhuis %.1e", nij) + fmt(", Calabi-Eckmann dH %.1e", ce.dH));
}

template <class F>
void guarded(int id, const std::string& name, F f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "identity suite, 1000 jets", identity_suite);
  guarded(2, "Boothby flatness, 16 points", hopf_flatness);
  guarded(3, "Hopf flow convergence", hopf_convergence);
  guarded(4, "Kaluza-Klein estimates", kaluza_klein);
  guarded(5, "stability arithmetic", stability_arithmetic);
  guarded(6, "flow formulation equivalence", flow_equivalence);
  guarded(7, "Lie group suite", lie_suite);
  std::printf("%s: %d of 7 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
