#pragma once

#include "bismut_lab/courant.hpp"
#include "bismut_lab/hopf.hpp"
#include "bismut_lab/kk.hpp"

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace bismut_lab {

/** Worker count: BISMUT_LAB_THREADS if set, else hardware concurrency. */
inline int thread_count() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("BISMUT_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return cap;
}

/** Runs f(j) for j in [0, n); each index is written by exactly one worker. */
template <class F>
void parallel_for(int n, F&& f) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int j = 0; j < n; ++j) f(j);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int j = w; j < n; j += workers) f(j);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

struct FlowState {
  double t = 0.0;
  std::variant<HopfRadialState, KKState> background;
  /** Torsion-potential profile; stays zero for the invariant backgrounds. */
  Eigen::VectorXd beta_profiles;

  bool is_hopf() const { return std::holds_alternative<HopfRadialState>(background); }
  const HopfRadialState& hopf() const { return std::get<HopfRadialState>(background); }
  const KKState& kk() const { return std::get<KKState>(background); }
};

inline FlowState make_flow_state(HopfRadialState st) {
  FlowState s;
  s.beta_profiles = Eigen::VectorXd::Zero(st.size());
  s.background = std::move(st);
  return s;
}

inline FlowState make_flow_state(KKState st) {
  st.validate();
  FlowState s;
  s.beta_profiles = Eigen::VectorXd::Zero(1);
  s.background = std::move(st);
  return s;
}

/** Packed flow variables: [a; b] on the Hopf grid, [a] for KK. */
inline std::vector<double> pack(const FlowState& s) {
  if (s.is_hopf()) {
    const auto& h = s.hopf();
    std::vector<double> v(2 * h.size());
    for (int j = 0; j < h.size(); ++j) {
      v[j] = h.a(j);
      v[h.size() + j] = h.b(j);
    }
    return v;
  }
  return {s.kk().a};
}

inline FlowState unpack(const FlowState& like, const std::vector<double>& v, double t) {
  FlowState s = like;
  s.t = t;
  if (s.is_hopf()) {
    auto& h = std::get<HopfRadialState>(s.background);
    for (int j = 0; j < h.size(); ++j) {
      h.a(j) = v[j];
      h.b(j) = v[h.size() + j];
    }
  } else {
    std::get<KKState>(s.background).a = v[0];
  }
  return s;
}

struct Derivative {
  std::vector<double> v;      ///< packed velocity
  double fit_residual = 0.0;  ///< part of -rho_B^{1,1} outside the ansatz tangent space
  double rho_sup = 0.0;       ///< sup |rho_B| in unitary frames
  double fiber_rate = 0.0;    ///< KK only: d/dt of the fiber coefficient
};

inline constexpr double kAnsatzLeak = 1e-4;

namespace flow_detail {

inline double rho_norm(const BismutRicci& r, const Mat& g) {
  return std::hypot(norm11(r.rho11, g), norm20(r.rho20, g));
}

/** Metric velocity at a jet by either route. */
inline MetricVelocity velocity(const MetricJet& jet, bool generalized, double& rho) {
  const BismutCurvature bc = bismut_curvature(jet, true);
  const BismutRicci r = bismut_ricci(bc, inverse_metric(jet.g));
  rho = rho_norm(r, jet.g);
  if (!generalized) return classical_velocity(r);
  CurvatureBlocks om = gen_curvature_untwisted(jet, bc);
  const Mat S = second_ricci_trace(jet, om);
  return generalized_velocity(jet.g, Mat::Zero(jet.n, jet.n), S);
}

inline void check_leak(const Derivative& d) {
  if (d.fit_residual > kAnsatzLeak * d.rho_sup + 1e-12)
    throw AnsatzLeak("fit residual " + std::to_string(d.fit_residual) + " against |rho| " + std::to_string(d.rho_sup));
}

inline Derivative hopf_rhs(const HopfRadialState& st, bool generalized) {
  const int N = st.size();
  if (!hopf_positive(st)) throw NonPositiveMetric("Hopf profiles lost positivity");
  const auto vals = st.all_node_values();
  Derivative d;
  d.v.assign(2 * N, 0.0);
  std::vector<double> fit(N, 0.0), rho(N, 0.0);
  parallel_for(N, [&](int j) {
    const Vec z = st.node_point(j);
    const double r2 = z.squaredNorm();
    const MetricJet jet = hopf_jet_from_values(z, vals[j]);
    const MetricVelocity v = velocity(jet, generalized, rho[j]);
    const double adot = r2 * v.gdot(1, 1).real();
    const double sdot = r2 * v.gdot(0, 0).real();
    d.v[j] = adot;
    d.v[N + j] = sdot - adot;
    fit[j] = r2 * std::max({std::abs(v.gdot(0, 1)), std::abs(v.gdot(1, 1).imag()), std::abs(v.gdot(0, 0).imag()),
                            max_abs(v.betadot)});
  });
  for (int j = 0; j < N; ++j) {
    d.fit_residual = std::max(d.fit_residual, fit[j]);
    d.rho_sup = std::max(d.rho_sup, rho[j]);
  }
  return d;
}

inline Derivative kk_rhs(const KKState& st, bool generalized) {
  const cd w = kk_default_point(st.R_sigma);
  const MetricJet jet = kk_chart_jet(st, w);
  const BasePotential p = base_potential(st.R_sigma, w);
  const cd u = -I_unit * cd(st.F[0], st.F[1]) * p.phi_w;
  Derivative d;
  const MetricVelocity v = velocity(jet, generalized, d.rho_sup);
  const double k2dot = v.gdot(1, 1).real();
  d.fiber_rate = 2.0 * k2dot;
  d.v = {(v.gdot(0, 0).real() - k2dot * std::norm(u)) / p.sigma};
  d.fit_residual = std::max({std::abs(v.gdot(0, 1) - k2dot * u), std::abs(v.gdot(1, 1).imag()),
                             std::abs(v.gdot(0, 0).imag()), std::abs(k2dot), max_abs(v.betadot)});
  return d;
}

}  // namespace flow_detail

/** Velocity from d_t omega = -rho^{1,1}, d_t beta = -rho^{2,0}. */
inline Derivative rhs_classical(const FlowState& s) {
  Derivative d = s.is_hopf() ? flow_detail::hopf_rhs(s.hopf(), false) : flow_detail::kk_rhs(s.kk(), false);
  flow_detail::check_leak(d);
  return d;
}

/** Velocity from G^{-1} d_t G = -S, with S the trace of the curvature of G. */
inline Derivative rhs_generalized(const FlowState& s) {
  Derivative d = s.is_hopf() ? flow_detail::hopf_rhs(s.hopf(), true) : flow_detail::kk_rhs(s.kk(), true);
  flow_detail::check_leak(d);
  return d;
}

enum class Method { RK4, RK45 };

struct IntegratorConfig {
  Method method = Method::RK4;
  double dt = 1e-3;
  double tolerance = 1e-8;  ///< RK45 local error target
  double t_end = 10.0;
  int monitor_stride = 1;
  double target = 1e-6;  ///< convergence threshold on sup |rho_B|
  bool generalized = false;
  double dt_min = 1e-12;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (monitor_stride < 1) throw ConfigError("monitor_stride must be >= 1");
  }
};

struct StepResult {
  FlowState state;
  double dt_used = 0.0;
  double dt_next = 0.0;
  double projection_change = 0.0;
  double error_estimate = 0.0;
};

namespace flow_detail {

inline FlowState finalize(FlowState s, double& change) {
  change = 0.0;
  if (s.is_hopf()) {
    auto& h = std::get<HopfRadialState>(s.background);
    change = hopf_project(h);
    if (change > kAnsatzLeak) throw AnsatzLeak("projection moved b by " + std::to_string(change));
    if (!hopf_positive(h)) throw NonPositiveMetric("Hopf profiles lost positivity at t = " + std::to_string(s.t));
  } else {
    std::get<KKState>(s.background).validate();
  }
  return s;
}

}  // namespace flow_detail

/**
 * One step. RK4 uses dt; RK45 estimates the local error and throws
 * StepRejected when it exceeds the tolerance (retry with dt / 2).
 */
inline StepResult step(const FlowState& s, const IntegratorConfig& cfg, double dt) {
  using State = std::vector<double>;
  auto sys = [&](const State& x, State& dxdt, double t) {
    const FlowState cur = unpack(s, x, t);
    dxdt = cfg.generalized ? rhs_generalized(cur).v : rhs_classical(cur).v;
  };
  State x = pack(s);
  StepResult r;
  r.dt_used = dt;
  if (cfg.method == Method::RK4) {
    boost::numeric::odeint::runge_kutta4<State> rk;
    rk.do_step(sys, x, s.t, dt);
    r.dt_next = dt;
  } else {
    boost::numeric::odeint::runge_kutta_dopri5<State> rk;
    State out(x.size()), err(x.size());
    rk.do_step(sys, x, s.t, out, dt, err);
    double e = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
      e = std::max(e, std::abs(err[k]) / (cfg.tolerance * (1.0 + std::abs(x[k]))));
    r.error_estimate = e;
    if (e > 1.0) throw StepRejected("local error " + std::to_string(e) + " times tolerance; retry with dt = " +
                                    std::to_string(0.5 * dt));
    x = out;
    r.dt_next = dt * std::clamp(0.9 * std::pow(std::max(e, 1e-10), -0.2), 0.2, 5.0);
  }
  r.state = flow_detail::finalize(unpack(s, x, s.t + dt), r.projection_change);
  return r;
}

inline StepResult step(const FlowState& s, const IntegratorConfig& cfg) { return step(s, cfg, cfg.dt); }

struct MonitorRecord {
  double t = 0.0;
  double rho_sup = 0.0;
  double trGGF_sup = 0.0;
  double upsilon_sup = 0.0;
  double fiber_area = 0.0;
  double base_trace = 0.0;
  double fit_residual = 0.0;
};

/** Reference geometry for the Schwarz monitors. */
struct FlowReference {
  FlowState state;
};

/**
 * Reference for a Hopf state: the Bismut-flat multiple c * omega_Hopf in the
 * same Aeppli class (c = 1 gives the Boothby metric).
 */
inline FlowReference hopf_reference(const HopfRadialState& st) {
  HopfRadialState ref = st;
  const double c = st.aeppli_constant();
  ref.a.setConstant(c);
  ref.b.setZero();
  return {make_flow_state(ref)};
}

inline FlowReference default_reference(const FlowState& s) {
  if (s.is_hopf()) return hopf_reference(s.hopf());
  return {s};
}

/** sup tr_G G_F and sup |Upsilon(G, G_F)|^2 over the sample points. */
inline std::pair<double, double> monitor_schwarz(const FlowState& s, const FlowReference& ref) {
  std::vector<MetricJet> jets, refs;
  if (s.is_hopf()) {
    const auto& h = s.hopf();
    const auto& hr = ref.state.hopf();
    if (hr.size() != h.size()) throw DimensionMismatch("reference grid differs");
    const auto v = h.all_node_values();
    const auto vr = hr.all_node_values();
    for (int j = 0; j < h.size(); ++j) {
      jets.push_back(hopf_jet_from_values(h.node_point(j), v[j]));
      refs.push_back(hopf_jet_from_values(hr.node_point(j), vr[j]));
    }
  } else {
    const cd w = kk_default_point(s.kk().R_sigma);
    jets.push_back(kk_chart_jet(s.kk(), w));
    refs.push_back(kk_chart_jet(ref.state.kk(), w));
  }
  const int m = static_cast<int>(jets.size());
  std::vector<double> tr(m), ups(m);
  parallel_for(m, [&](int j) {
    const TorsionPotential zero(jets[j].n);
    const Mat M = generalized_metric_matrix(jets[j].g, zero.beta);
    const Mat MF = generalized_metric_matrix(refs[j].g, zero.beta);
    tr[j] = trace_G(M, MF);
    const GenConnection a = gen_chern_connection(jets[j], zero);
    const GenConnection b = gen_chern_connection(refs[j], zero);
    ups[j] = upsilon_norm2(jets[j].g, M, a.holo, b.holo);
  });
  return {*std::max_element(tr.begin(), tr.end()), *std::max_element(ups.begin(), ups.end())};
}

inline MonitorRecord monitor(const FlowState& s, const FlowReference& ref) {
  MonitorRecord r;
  r.t = s.t;
  const Derivative d = s.is_hopf() ? flow_detail::hopf_rhs(s.hopf(), false) : flow_detail::kk_rhs(s.kk(), false);
  r.rho_sup = d.rho_sup;
  r.fit_residual = d.fit_residual;
  std::tie(r.trGGF_sup, r.upsilon_sup) = monitor_schwarz(s, ref);
  if (!s.is_hopf()) {
    const MetricJet jet = kk_chart_jet(s.kk(), kk_default_point(s.kk().R_sigma));
    r.fiber_area = 2.0 * jet.g(1, 1).real();
    const Mat gi = inverse_metric(jet.g);
    r.base_trace = base_potential(s.kk().R_sigma, kk_default_point(s.kk().R_sigma)).sigma * gi(0, 0).real();
  }
  return r;
}

struct RunResult {
  std::vector<MonitorRecord> series;
  FlowState final_state;
  std::string termination;  ///< converged | t_end | error
  std::string error;
  int steps = 0;
  int rejected = 0;
};

/** Integrates until sup |rho_B| < target or t_end. */
inline RunResult run(const FlowState& initial, const IntegratorConfig& cfg, const FlowReference& ref) {
  cfg.validate();
  RunResult out;
  FlowState s = initial;
  double dt = cfg.dt;
  try {
    MonitorRecord rec = monitor(s, ref);
    out.series.push_back(rec);
    while (true) {
      if (rec.rho_sup < cfg.target) {
        out.termination = "converged";
        break;
      }
      if (s.t >= cfg.t_end - 1e-12 * cfg.t_end) {
        out.termination = "t_end";
        break;
      }
      const double h = std::min(dt, cfg.t_end - s.t);
      StepResult r;
      try {
        r = step(s, cfg, h);
      } catch (const StepRejected&) {
        ++out.rejected;
        dt = 0.5 * h;
        if (dt < cfg.dt_min) throw;
        continue;
      }
      s = r.state;
      if (cfg.method == Method::RK45) dt = r.dt_next;
      ++out.steps;
      const bool last = s.t >= cfg.t_end - 1e-12 * cfg.t_end;
      if (out.steps % cfg.monitor_stride == 0 || last) {
        rec = monitor(s, ref);
        out.series.push_back(rec);
      } else {
        const Derivative d = cfg.generalized ? rhs_generalized(s) : rhs_classical(s);
        rec.rho_sup = d.rho_sup;
      }
    }
  } catch (const Error& e) {
    out.termination = "error";
    out.error = e.what();
  }
  out.final_state = s;
  return out;
}

/** Verdicts on the monitor series; nullopt when not applicable. */
struct DecayVerdicts {
  std::optional<bool> trace_monotone;    ///< sup tr_G G_F non-increasing
  std::optional<bool> upsilon_monotone;  ///< sup |Upsilon|^2 non-increasing
  std::optional<bool> upsilon_bound;     ///< sup |Upsilon|^2 <= A sup tr(0) / t after burn-in
  std::optional<bool> base_trace_bound;  ///< base_trace (C + |R| t / 2) <= 1 + tol
  double fitted_A = 0.0;
  double fitted_C = 0.0;
  double worst_trace_increase = 0.0;
  double worst_upsilon_increase = 0.0;
  double worst_bound_ratio = 0.0;
  double worst_base_product = 0.0;
};

struct DecayOptions {
  double slack = 1e-8;
  double burn_in = 0.1;
  double tol = 1e-6;
  bool bismut_flat_reference = true;
  std::optional<double> R_sigma;  ///< enables the base-trace verdict
};

inline DecayVerdicts monitor_decay(const std::vector<MonitorRecord>& series, const DecayOptions& opt) {
  if (series.size() < 10) throw InsufficientData("decay verdicts need at least 10 records");
  DecayVerdicts v;
  if (opt.bismut_flat_reference) {
    for (std::size_t k = 1; k < series.size(); ++k) {
      v.worst_trace_increase = std::max(v.worst_trace_increase, series[k].trGGF_sup - series[k - 1].trGGF_sup);
      v.worst_upsilon_increase = std::max(v.worst_upsilon_increase, series[k].upsilon_sup - series[k - 1].upsilon_sup);
    }
    v.trace_monotone = v.worst_trace_increase <= opt.slack;
    v.upsilon_monotone = v.worst_upsilon_increase <= opt.slack;
    const double tr0 = series.front().trGGF_sup;
    double A = 0.0;
    for (const auto& r : series)
      if (r.t >= opt.burn_in && r.t <= 2.0 * opt.burn_in) A = std::max(A, r.t * r.upsilon_sup / tr0);
    v.fitted_A = A;
    bool ok = true;
    for (const auto& r : series) {
      if (r.t < opt.burn_in) continue;
      const double bound = A * tr0 / r.t;
      if (bound > 0.0) v.worst_bound_ratio = std::max(v.worst_bound_ratio, r.upsilon_sup / bound);
      if (r.upsilon_sup > bound * (1.0 + opt.tol) + opt.slack) ok = false;
    }
    v.upsilon_bound = ok;
  }
  if (opt.R_sigma) {
    const double C = 1.0 / series.front().base_trace;
    v.fitted_C = C;
    bool ok = true;
    for (const auto& r : series) {
      const double prod = r.base_trace * (C + 0.5 * std::abs(*opt.R_sigma) * r.t);
      v.worst_base_product = std::max(v.worst_base_product, prod);
      if (prod > 1.0 + opt.tol) ok = false;
    }
    v.base_trace_bound = ok;
  }
  return v;
}

/** Monitor series as CSV with 17 significant digits. */
inline void write_csv(std::ostream& os, const std::vector<MonitorRecord>& series) {
  os << "t,rho_sup,trGGF_sup,upsilon_sup,fiber_area,base_trace,fit_residual\n";
  char buf[64];
  auto put = [&](double x, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf << (last ? '\n' : ',');
  };
  for (const auto& r : series) {
    put(r.t, false);
    put(r.rho_sup, false);
    put(r.trGGF_sup, false);
    put(r.upsilon_sup, false);
    put(r.fiber_area, false);
    put(r.base_trace, false);
    put(r.fit_residual, true);
  }
}

}  // namespace bismut_lab
