#pragma once

#include "bismut_lab/hopf.hpp"
#include "bismut_lab/io.hpp"
#include "bismut_lab/kk.hpp"
#include "bismut_lab/lie.hpp"

#include <fstream>
#include <numbers>
#include <string>

namespace bismut_lab {

/** Reads one profile row per line: "a" or "a,b". */
inline void load_profiles(HopfRadialState& st, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file '" + path + "'");
  std::vector<double> a, b;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& c : line)
      if (c == ',') c = ' ';
    std::istringstream row(line);
    double x = 0.0, y = 0.0;
    if (!(row >> x)) throw ConfigError("malformed profile row '" + line + "'");
    if (!(row >> y)) y = 0.0;
    a.push_back(x);
    b.push_back(y);
  }
  if (static_cast<int>(a.size()) != st.size()) throw ConfigError("profile file length differs from N");
  st.a = Eigen::Map<Eigen::VectorXd>(a.data(), st.size());
  st.b = Eigen::Map<Eigen::VectorXd>(b.data(), st.size());
}

/**
 * [hopf] alpha_modulus, N, profile_file; without a profile file the state is
 * a = 1 + amplitude cos(2 pi mode s / L) with b projected.
 */
inline HopfRadialState hopf_from_config(const Config& cfg) {
  const double alpha = cfg.get<double>("hopf.alpha_modulus", std::exp(-std::numbers::pi));
  const int N = cfg.get<int>("hopf.N", 64);
  HopfRadialState st;
  if (cfg.has("hopf.profile_file")) {
    st = HopfRadialState(alpha, N);
    load_profiles(st, cfg.require<std::string>("hopf.profile_file"));
    hopf_project(st);
  } else {
    st = perturbed_hopf(cfg.get<double>("hopf.amplitude", 0.0), cfg.get<int>("hopf.mode", 1), alpha, N);
  }
  if (!hopf_positive(st)) throw NonPositiveMetric("configured Hopf profiles are not positive");
  return st;
}

/** [kk] R_sigma, a0, h = h11 h12 h22, F = F1 F2. */
inline KKState kk_from_config(const Config& cfg) {
  KKState st;
  st.R_sigma = cfg.get<double>("kk.R_sigma", -2.0);
  st.a = cfg.get<double>("kk.a0", 1.0);
  if (cfg.has("kk.h")) {
    const auto h = cfg.numbers("kk.h");
    if (h.size() != 3) throw ConfigError("kk.h expects three entries");
    st.h << h[0], h[1], h[1], h[2];
  }
  if (cfg.has("kk.F")) {
    const auto F = cfg.numbers("kk.F");
    if (F.size() != 2) throw ConfigError("kk.F expects two entries");
    st.F = {F[0], F[1]};
  }
  st.validate();
  return st;
}

/** [lie] algebra */
inline LieGroupData lie_from_config(const Config& cfg) { return lie_algebra(cfg.get<std::string>("lie.algebra", "su2+u1")); }

}  // namespace bismut_lab
