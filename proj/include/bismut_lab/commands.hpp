#pragma once

#include "bismut_lab/backgrounds.hpp"
#include "bismut_lab/flow.hpp"
#include "bismut_lab/identities.hpp"
#include "bismut_lab/io.hpp"
#include "bismut_lab/stability.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>

namespace bismut_lab {

enum ExitCode : int { kExitPass = 0, kExitTolerance = 1, kExitConfig = 2 };

struct CommandOptions {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

namespace cmd_detail {

inline std::filesystem::path output_path(const CommandOptions& o, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(o.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + o.out_dir + "'");
  return std::filesystem::path(o.out_dir) / file;
}

inline void write_json(const CommandOptions& o, const std::string& file, const json& j) {
  const auto p = output_path(o, file);
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("write failed for '" + p.string() + "'");
}

inline json opt_bool(const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); }

inline std::vector<int> ints(const Config& cfg, const std::string& key, std::vector<int> fallback) {
  if (!cfg.has(key)) return fallback;
  std::vector<int> out;
  for (double x : cfg.numbers(key)) {
    if (x != std::floor(x)) throw ConfigError("key '" + key + "' expects integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

inline double bismut_sup(const BismutCurvature& bc) { return std::max(bc.omega11.max_abs(), bc.omega20.max_abs()); }

}  // namespace cmd_detail

/** Identity suite over seeded random pluriclosed jets; writes report.json. */
inline int cmd_identities(const Config& cfg, const CommandOptions& o) {
  IdentitySuiteConfig sc;
  sc.seed = o.seed.value_or(cfg.get<std::uint64_t>("identities.seed", 42));
  sc.count = cfg.get<int>("identities.count", 100);
  sc.dims = cmd_detail::ints(cfg, "identities.dims", {2, 3});
  sc.tolerance = o.tol.value_or(cfg.get<double>("identities.tolerance", 1e-8));
  sc.fd_step = cfg.get<double>("identities.fd_step", 1e-3);
  sc.inject_sign_flip = cfg.get<bool>("identities.inject_sign_flip", false);
  if (sc.count < 0) throw ConfigError("identities.count must be non-negative");
  const IdentityReport rep = run_identity_suite(sc);
  json j;
  j["command"] = "identities";
  j["seed"] = sc.seed;
  j["count"] = sc.count;
  j["dims"] = sc.dims;
  j["tolerance"] = sc.tolerance;
  json ids = json::object();
  for (const auto& name : identity_names()) {
    const auto& r = rep.results.at(name);
    ids[name] = {{"max_residual", r.max_residual},
                 {"evaluated", r.evaluated},
                 {"skipped", r.skipped},
                 {"pass", r.max_residual < sc.tolerance}};
  }
  j["identities"] = ids;
  j["pass"] = rep.pass();
  cmd_detail::write_json(o, "report.json", j);
  return rep.pass() ? kExitPass : kExitTolerance;
}

/** Random jets at the origin: finite-difference reconstruction and curvature against the closed forms. */
inline int cmd_oracle(const Config& cfg, const CommandOptions& o) {
  const std::uint64_t seed = o.seed.value_or(cfg.get<std::uint64_t>("oracle.seed", 7));
  const int count = cfg.get<int>("oracle.count", 10);
  const auto dims = cmd_detail::ints(cfg, "oracle.dims", {2, 3});
  const double h = cfg.get<double>("oracle.h", 1e-2);
  const double h_curv = cfg.get<double>("oracle.curvature_h", 1e-3);
  const double tol = o.tol.value_or(cfg.get<double>("oracle.tolerance", 1e-8));
  std::mt19937_64 rng(seed);
  double jet_res = 0.0, b11 = 0.0, b20 = 0.0, chern = 0.0;
  int evaluated = 0;
  auto check = [&](const MetricJet& jet) {
    const oracle::PolynomialField field(jet);
    const Vec z0 = Vec::Zero(jet.n);
    const MetricJet fd = oracle::fd_jet([&](const Vec& z) { return field.value(z); }, z0, h);
    jet_res = std::max({jet_res, relative_residual(fd.dg, jet.dg), relative_residual(fd.d2g, jet.d2g),
                        relative_residual(fd.ddg, jet.ddg)});
    const auto RC = oracle::fd_curvature(oracle::chern_field(field), z0, h_curv);
    chern = std::max(chern, relative_residual(chern_curvature(jet), oracle::lower11(RC, jet.g)));
    const BismutCurvature bc = bismut_curvature(jet, true);
    const auto RB = oracle::fd_curvature(oracle::bismut_field(field), z0, h_curv);
    b11 = std::max(b11, relative_residual(bc.omega11, oracle::lower11(RB, jet.g)));
    b20 = std::max(b20, relative_residual(bc.omega20, oracle::lower20(RB, jet.g)));
    ++evaluated;
  };
  if (cfg.has("oracle.jet_file")) {
    const std::string path = cfg.require<std::string>("oracle.jet_file");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open jet file '" + path + "'");
    json jj;
    try {
      jj = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(e.what());
    }
    check(project_pluriclosed(jet_from_json(jj)));
  }
  for (int n : dims)
    for (int k = 0; k < count; ++k) check(sample_pluriclosed_jet(n, rng));
  json j;
  j["command"] = "oracle";
  j["seed"] = seed;
  j["evaluated"] = evaluated;
  j["tolerance"] = tol;
  j["residuals"] = {{"fd_jet", jet_res}, {"chern_fd", chern}, {"bismut11_fd", b11}, {"bismut20_fd", b20}};
  const bool pass = jet_res < tol && chern < tol && b11 < tol && b20 < tol;
  j["pass"] = pass;
  cmd_detail::write_json(o, "report.json", j);
  return pass ? kExitPass : kExitTolerance;
}

/** Curvature and structure checks for one background; writes report.json. */
inline int cmd_background(const Config& cfg, const CommandOptions& o) {
  const std::string kind = cfg.require<std::string>("background.kind");
  const double tol = o.tol.value_or(cfg.get<double>("background.tolerance", 1e-10));
  json j;
  j["command"] = "background";
  j["kind"] = kind;
  j["tolerance"] = tol;
  bool pass = true;
  if (kind == "hopf") {
    const HopfRadialState st = hopf_from_config(cfg);
    const int samples = cfg.get<int>("background.samples", 16);
    std::mt19937_64 rng(o.seed.value_or(cfg.get<std::uint64_t>("background.seed", 1)));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> N01;
    double om = 0.0, S = 0.0, defect = 0.0;
    json pts = json::array();
    for (int k = 0; k < samples; ++k) {
      Vec dir(2);
      for (int i = 0; i < 2; ++i) dir(i) = cd(N01(rng), N01(rng));
      const double s = st.period() * U(rng);
      const Vec z = dir.normalized() * std::exp(0.5 * s);
      const MetricJet jet = hopf_jet(st, z);
      const BismutCurvature bc = bismut_curvature(jet, false);
      const TorsionPotential zero(2);
      const double o_k = cmd_detail::bismut_sup(bc);
      const double S_k = max_abs(second_ricci(jet, zero, false));
      om = std::max(om, o_k);
      S = std::max(S, S_k);
      defect = std::max(defect, bc.defect);
      pts.push_back({{"s", s}, {"bismut_curvature_sup", o_k}, {"second_ricci_sup", S_k}, {"defect", bc.defect}});
    }
    j["samples"] = pts;
    j["bismut_curvature_sup"] = om;
    j["second_ricci_sup"] = S;
    j["pluriclosed_defect_sup"] = defect;
    j["constraint_sup"] = hopf_pluriclosed_constraint(st).cwiseAbs().maxCoeff();
    j["aeppli_constant"] = st.aeppli_constant();
    j["node_jet"] = jet_to_json(hopf_node_jet(st, 0));
    j["node_generalized_metric"] = generalized_metric_to_json(build_G(hopf_node_jet(st, 0).g, Mat::Zero(2, 2)));
    pass = defect < tol * std::max(1.0, om);
    if (cfg.get<bool>("background.expect_flat", false)) pass = pass && om < tol && S < tol;
  } else if (kind == "kk") {
    const KKState st = kk_from_config(cfg);
    const KKCurvature c = kk_curvature(st);
    const MetricJet jet = kk_chart_jet(st, kk_default_point(st.R_sigma));
    const BismutCurvature bc = bismut_curvature(jet, true);
    j["curvature_coefficient"] = c.coefficient;
    j["adot"] = c.adot;
    j["fiber_area"] = st.fiber_area();
    j["base_trace"] = st.base_trace();
    j["pluriclosed_defect"] = bc.defect;
    j["chart_jet"] = jet_to_json(jet);
    pass = bc.defect < tol;
  } else if (kind == "lie") {
    const LieGroupData L = lie_from_config(cfg);
    const LieFlatness f = lie_flatness(L);
    const double nij = nijenhuis(L).max_abs();
    j["algebra"] = L.name;
    j["dim"] = L.dim;
    j["r_minus"] = f.r_minus;
    j["r_plus"] = f.r_plus;
    j["torsion_vs_cartan"] = f.torsion_vs_cartan;
    j["nijenhuis"] = nij;
    pass = f.r_minus < tol && f.r_plus < tol && f.torsion_vs_cartan < tol && nij < tol;
    if (L.dim == 6) {
      const CETorsionResiduals ce = ce_torsion_check(L);
      j["calabi_eckmann"] = {{"dH", ce.dH}, {"r_minus", ce.r_minus}, {"cartan_antisymmetry", ce.cartan_antisymmetry}};
      pass = pass && ce.dH < tol;
    }
  } else {
    throw ConfigError("background.kind must be hopf, kk or lie");
  }
  j["pass"] = pass;
  cmd_detail::write_json(o, "report.json", j);
  return pass ? kExitPass : kExitTolerance;
}

inline IntegratorConfig integrator_from_config(const Config& cfg) {
  IntegratorConfig ic;
  const std::string m = cfg.get<std::string>("flow.method", "rk4");
  if (m == "rk4")
    ic.method = Method::RK4;
  else if (m == "rk45")
    ic.method = Method::RK45;
  else
    throw ConfigError("flow.method must be rk4 or rk45");
  ic.dt = cfg.get<double>("flow.dt", ic.dt);
  ic.tolerance = cfg.get<double>("flow.tolerance", ic.tolerance);
  ic.t_end = cfg.get<double>("flow.t_end", ic.t_end);
  ic.monitor_stride = cfg.get<int>("flow.monitor_stride", ic.monitor_stride);
  ic.target = cfg.get<double>("flow.target", ic.target);
  ic.generalized = cfg.get<bool>("flow.generalized", false);
  ic.validate();
  return ic;
}

/** Runs the flow; writes series.csv and summary.json. */
inline int cmd_flow(const Config& cfg, const CommandOptions& o) {
  const std::string bg = cfg.require<std::string>("flow.background");
  FlowState init;
  if (bg == "hopf")
    init = make_flow_state(hopf_from_config(cfg));
  else if (bg == "kk")
    init = make_flow_state(kk_from_config(cfg));
  else
    throw ConfigError("flow.background must be hopf or kk");
  IntegratorConfig ic = integrator_from_config(cfg);
  if (o.tol) ic.tolerance = *o.tol;
  const FlowReference ref = default_reference(init);
  const RunResult res = run(init, ic, ref);

  {
    const auto p = cmd_detail::output_path(o, "series.csv");
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    write_csv(out, res.series);
  }

  json j;
  j["command"] = "flow";
  j["background"] = bg;
  j["termination"] = res.termination;
  if (!res.error.empty()) j["error"] = res.error;
  j["t_final"] = res.final_state.t;
  j["steps"] = res.steps;
  j["rejected"] = res.rejected;
  const MonitorRecord& last = res.series.back();
  j["final_monitors"] = {{"t", last.t},
                         {"rho_sup", last.rho_sup},
                         {"trGGF_sup", last.trGGF_sup},
                         {"upsilon_sup", last.upsilon_sup},
                         {"fiber_area", last.fiber_area},
                         {"base_trace", last.base_trace},
                         {"fit_residual", last.fit_residual}};
  if (res.final_state.is_hopf()) {
    const auto& h = res.final_state.hopf();
    j["final_profile"] = {{"a_min", h.a.minCoeff()},
                          {"a_max", h.a.maxCoeff()},
                          {"b_min", h.b.minCoeff()},
                          {"b_max", h.b.maxCoeff()},
                          {"aeppli_constant", h.aeppli_constant()}};
  } else {
    j["final_profile"] = {{"a", res.final_state.kk().a}};
  }

  bool pass = res.termination != "error";
  DecayOptions dopt;
  dopt.slack = cfg.get<double>("verdicts.slack", dopt.slack);
  dopt.burn_in = cfg.get<double>("verdicts.burn_in", dopt.burn_in);
  dopt.tol = cfg.get<double>("verdicts.tol", dopt.tol);
  dopt.bismut_flat_reference = init.is_hopf();
  if (!init.is_hopf()) dopt.R_sigma = init.kk().R_sigma;
  json verdicts;
  try {
    const DecayVerdicts v = monitor_decay(res.series, dopt);
    verdicts = {{"trace_monotone", cmd_detail::opt_bool(v.trace_monotone)},
                {"upsilon_monotone", cmd_detail::opt_bool(v.upsilon_monotone)},
                {"upsilon_bound", cmd_detail::opt_bool(v.upsilon_bound)},
                {"base_trace_bound", cmd_detail::opt_bool(v.base_trace_bound)},
                {"fitted_A", v.fitted_A},
                {"fitted_C", v.fitted_C},
                {"worst_trace_increase", v.worst_trace_increase},
                {"worst_upsilon_increase", v.worst_upsilon_increase},
                {"worst_bound_ratio", v.worst_bound_ratio},
                {"worst_base_product", v.worst_base_product}};
    for (const auto& b : {v.trace_monotone, v.upsilon_monotone, v.upsilon_bound, v.base_trace_bound})
      if (b && !*b) pass = false;
  } catch (const InsufficientData& e) {
    verdicts = {{"skipped", e.what()}};
  }
  j["verdicts"] = verdicts;
  j["pass"] = pass;
  cmd_detail::write_json(o, "summary.json", j);
  return pass ? kExitPass : kExitTolerance;
}

namespace cmd_detail {

inline PairingData pairing_from_section(const Config& cfg, const std::string& sec) {
  PairingData p;
  const auto c1 = cfg.numbers(sec + ".c1");
  const std::size_t n = c1.size();
  const auto q = cfg.numbers(sec + ".intersection");
  if (q.size() != n * n) throw ConfigError(sec + ".intersection must have " + std::to_string(n * n) + " entries");
  p.intersection.assign(n, std::vector<std::int64_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) p.intersection[i][k] = static_cast<std::int64_t>(q[i * n + k]);
  for (double x : c1) p.c1_coeffs.push_back(static_cast<std::int64_t>(x));
  std::string a = cfg.require<std::string>(sec + ".a");
  for (auto& c : a)
    if (c == ',') c = ' ';
  std::istringstream in(a);
  std::string tok;
  while (in >> tok) p.a_coeffs.push_back(parse_rational(tok));
  validate_pairing(p);
  return p;
}

inline json verdict_row(const ObstructionExample& ex) {
  return {{"name", ex.name},
          {"deg_pairing", format_rational(deg_pairing(ex.data))},
          {"submersion", ex.submersion},
          {"verdict", to_string(obstruction_verdict(ex.data, ex.submersion))}};
}

}  // namespace cmd_detail

/** Hypersurface invariants, pairing verdicts and lattice searches; writes report.json. */
inline int cmd_obstruct(const Config& cfg, const CommandOptions& o) {
  json j;
  j["command"] = "obstruct";
  json hyp = json::array();
  for (int d : cmd_detail::ints(cfg, "obstruct.degrees", {5})) {
    const HypersurfaceData h = hypersurface_invariants(d);
    json row{{"d", d}, {"b2", h.b2}, {"h20", h.h20}, {"h11", h.h11}};
    row["signature"] = h.signature ? json(*h.signature) : json(nullptr);
    if (h.signature && d >= 5) {
      const std::int64_t alpha2 = -(d - 4) * (d - 4);
      const int dim_neg = cfg.get<int>("obstruct.lattice_dim", static_cast<int>((h.b2 - *h.signature) / 2));
      row["alpha_square"] = alpha2;
      row["bundle_condition"] = pluriclosed_bundle_condition(d, alpha2);
      row["lattice_dim"] = dim_neg;
      try {
        const auto v = lattice_search(dim_neg, alpha2);
        std::vector<std::int64_t> support;
        for (auto x : v)
          if (x != 0) support.push_back(x);
        row["lattice_vector"] = support;
        row["lattice_primitive"] = is_primitive(v);
      } catch (const NotFound& e) {
        row["lattice_vector"] = nullptr;
        row["lattice_error"] = e.what();
      }
    }
    hyp.push_back(row);
  }
  j["hypersurfaces"] = hyp;

  json verdicts = json::array();
  for (int g : cmd_detail::ints(cfg, "obstruct.genus", {0, 1, 2}))
    verdicts.push_back(cmd_detail::verdict_row(curve_base_example(g)));
  if (cfg.get<bool>("obstruct.hopf_fibration", true)) verdicts.push_back(cmd_detail::verdict_row(hopf_fibration_example()));
  for (const auto& sec : cfg.sections()) {
    if (sec.rfind("pairing:", 0) != 0) continue;
    ObstructionExample ex{sec.substr(8), cmd_detail::pairing_from_section(cfg, sec),
                          cfg.get<bool>(sec + ".submersion", true)};
    verdicts.push_back(cmd_detail::verdict_row(ex));
  }
  j["verdicts"] = verdicts;
  j["pass"] = true;
  cmd_detail::write_json(o, "report.json", j);
  return kExitPass;
}

/** Dispatch by command name; library errors in the input map to the config exit code. */
inline int run_command(const std::string& command, const Config& cfg, const CommandOptions& o) {
  if (command == "identities") return cmd_identities(cfg, o);
  if (command == "flow") return cmd_flow(cfg, o);
  if (command == "background") return cmd_background(cfg, o);
  if (command == "obstruct") return cmd_obstruct(cfg, o);
  if (command == "oracle") return cmd_oracle(cfg, o);
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace bismut_lab
