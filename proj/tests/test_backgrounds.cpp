#include "catch_amalgamated.hpp"
#include "test_support.hpp"

using namespace bismut_lab;
using namespace test_support;

namespace {

Vec annulus_point(std::mt19937_64& rng, double L) {
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.0, L);
  return point2(cd(N(rng), N(rng)), cd(N(rng), N(rng))).normalized() * std::exp(0.5 * U(rng));
}

}  // namespace

TEST_CASE("Boothby profile at (1,0)", "[backgrounds][known_values]") {
  const HopfRadialState st = boothby_state();
  const MetricJet j = hopf_jet(st, point2(1.0, 0.0));
  CHECK(max_abs(j.g - Mat::Identity(2, 2)) < 1e-14);
  CHECK(pluriclosed_defect(j) < 1e-12);
  CHECK(std::abs(st.period() - 2.0 * std::numbers::pi) < 1e-14);
}

TEST_CASE("Boothby state: pluriclosed on the grid and Bismut-flat at random points", "[backgrounds][known_values]") {
  const HopfRadialState st = boothby_state();
  CHECK(hopf_pluriclosed_constraint(st).maxCoeff() < 1e-12);
  std::mt19937_64 rng(41);
  for (int k = 0; k < 16; ++k) {
    const MetricJet j = hopf_jet(st, annulus_point(rng, st.period()));
    const BismutCurvature bc = bismut_curvature(j);
    CHECK(bc.omega11.max_abs() < 1e-10);
    CHECK(bc.omega20.max_abs() < 1e-10);
    CHECK(max_abs(second_ricci(j, TorsionPotential(2))) < 1e-10);
  }
}

TEST_CASE("Hopf jets are invariant under the deck transformation", "[backgrounds][basic]") {
  const HopfRadialState st = perturbed_hopf(0.2, 2);
  const double al = st.alpha_modulus;
  for (const cd phase : {cd(1.0, 0.0), std::polar(1.0, 0.7)}) {
    const Vec z = point2(1.0, 0.0) * phase;
    const MetricJet j0 = hopf_jet(st, z);
    const MetricJet j1 = hopf_jet(st, al * z);
    CHECK(relative_residual(Mat(j1.g * al * al), j0.g) < 1e-12);
    Tensor3 dg = j1.dg;
    dg *= cd(al * al * al);
    CHECK(relative_residual(dg, j0.dg) < 1e-12);
    Tensor4 d2g = j1.d2g;
    d2g *= cd(std::pow(al, 4));
    CHECK(relative_residual(d2g, j0.d2g) < 1e-12);
    Tensor4 ddg = j1.ddg;
    ddg *= cd(std::pow(al, 4));
    CHECK(relative_residual(ddg, j0.ddg) < 1e-12);
  }
}

TEST_CASE("perturbed Hopf jet matches finite differences of the assembled field", "[backgrounds][oracle]") {
  const HopfRadialState st = perturbed_hopf(0.2, 1);
  const oracle::MatField field = [&](const Vec& z) {
    const ProfileValues p = st.values_at(std::log(z.squaredNorm()));
    return hopf_metric(z, p.a, p.b);
  };
  std::mt19937_64 rng(43);
  for (int k = 0; k < 4; ++k) {
    const Vec z = annulus_point(rng, st.period());
    const double h = 1e-2 * z.norm();
    const MetricJet exact = hopf_jet(st, z);
    const MetricJet fd = oracle::fd_jet(field, z, h);
    const double s = std::max(1.0, exact.d2g.max_abs());
    CHECK(max_abs_diff(exact.dg, fd.dg) < 1e-6 * s);
    CHECK(max_abs_diff(exact.d2g, fd.d2g) < 1e-6 * s);
    CHECK(max_abs_diff(exact.ddg, fd.ddg) < 1e-6 * s);
  }
}

TEST_CASE("Hopf pluriclosed constraint and projection", "[backgrounds][oracle]") {
  HopfRadialState scaled = boothby_state();
  scaled.a.setConstant(3.5);
  CHECK(hopf_pluriclosed_constraint(scaled).maxCoeff() < 1e-12);

  HopfRadialState st = perturbed_hopf(0.2, 1);
  CHECK(hopf_pluriclosed_constraint(st).maxCoeff() < 1e-8);
  std::mt19937_64 rng(47);
  std::normal_distribution<double> N;
  for (int m = 1; m <= 3; ++m)
    for (int j = 0; j < st.size(); ++j) {
      const double s = 2.0 * std::numbers::pi * m * st.grid.node(j) / st.period();
      st.b(j) += 0.05 * N(rng) * std::cos(s) / m;
    }
  CHECK(hopf_pluriclosed_constraint(st).maxCoeff() > 1e-4);
  const double c = st.aeppli_constant();
  const double change = hopf_project(st);
  CHECK(change > 0.0);
  CHECK(hopf_pluriclosed_constraint(st).maxCoeff() < 1e-8);
  CHECK(std::abs(st.aeppli_constant() - c) < 1e-13);
  CHECK(hopf_project(st) < 1e-14);
}

TEST_CASE("Hopf positivity is enforced", "[backgrounds][errors]") {
  HopfRadialState st = boothby_state();
  st.b.setConstant(-2.0);
  CHECK_FALSE(hopf_positive(st));
  CHECK_THROWS_AS(hopf_jet(st, point2(1.0, 0.0)), NonPositiveMetric);
  CHECK_THROWS_AS(HopfRadialState(1.5, 64), ConfigError);
  CHECK_THROWS_AS(HopfRadialState(0.5, 48), ConfigError);
  CHECK_THROWS_AS(hopf_jet(st, Vec::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(perturbed_hopf(1.5, 1), NonPositiveMetric);
  CHECK_THROWS_AS(perturbed_hopf(0.3, 4, std::exp(-std::numbers::pi), 32), NonPositiveMetric);
  CHECK_NOTHROW(perturbed_hopf(0.3, 1, std::exp(-std::numbers::pi), 32));
}

TEST_CASE("Fourier grid differentiates trigonometric polynomials exactly", "[backgrounds][oracle]") {
  const FourierGrid grid(32, 3.0);
  Eigen::VectorXd f(32), df(32), d2f(32);
  const double w = 2.0 * std::numbers::pi / 3.0;
  for (int j = 0; j < 32; ++j) {
    const double s = grid.node(j);
    f(j) = std::sin(3 * w * s) + 0.5 * std::cos(w * s);
    df(j) = 3 * w * std::cos(3 * w * s) - 0.5 * w * std::sin(w * s);
    d2f(j) = -9 * w * w * std::sin(3 * w * s) - 0.5 * w * w * std::cos(w * s);
  }
  CHECK((grid.d1() * f - df).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((grid.d2() * f - d2f).cwiseAbs().maxCoeff() < 1e-11);
  const auto v = grid.evaluate(f, 0.37);
  CHECK(std::abs(v[0] - (std::sin(3 * w * 0.37) + 0.5 * std::cos(w * 0.37))) < 1e-13);
}

TEST_CASE("KK curvature coefficient", "[backgrounds][known_values]") {
  KKState flat;
  flat.R_sigma = 0.0;
  CHECK(kk_curvature(flat).coefficient == 0.0);

  KKState k0;
  k0.R_sigma = 0.0;
  k0.F = {1.0, 0.5};
  const KKCurvature c0 = kk_curvature(k0);
  CHECK(c0.coefficient < 0.0);
  CHECK(std::abs(c0.coefficient + 0.5 * k0.curvature_norm2()) < 1e-15);
}

TEST_CASE("KK coefficient agrees with the Bismut curvature of the chart realization", "[backgrounds][oracle]") {
  for (double R : {-2.0, 0.0, 2.0})
    for (double a : {1.0, 2.5}) {
      KKState st;
      st.R_sigma = R;
      st.a = a;
      st.F = {1.0, 0.0};
      st.h << 1.5, 0.2, 0.2, 0.8;
      const KKCurvature c = kk_curvature(st);
      const cd w = kk_default_point(R);
      const MetricJet jet = kk_chart_jet(st, w);
      const BasePotential p = base_potential(R, w);
      const BismutCurvature bc = bismut_curvature(jet);
      const double base = a * p.sigma;
      CHECK(std::abs(bc.omega11(0, 0, 0, 0) - c.coefficient * base * base) < 1e-12);
      double others = bc.omega20.max_abs();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              if (i + j + k + l > 0) others = std::max(others, std::abs(bc.omega11(i, j, k, l)));
      CHECK(others < 1e-12);
      const BismutRicci rho = bismut_ricci(jet);
      CHECK(std::abs(rho.rho11(0, 0) - c.rho11(0, 0) * p.sigma) < 1e-12);
      CHECK(std::abs(rho.rho11(0, 1)) < 1e-12);
      CHECK(std::abs(rho.rho11(1, 0)) < 1e-12);
      CHECK(std::abs(rho.rho11(1, 1)) < 1e-12);
      CHECK(max_abs(rho.rho20) < 1e-12);
      CHECK(max_abs(c.rho20) == 0.0);
    }
}

TEST_CASE("KK chart jet matches finite differences of the chart metric", "[backgrounds][oracle]") {
  KKState st;
  st.F = {0.7, -0.3};
  st.h << 1.2, 0.1, 0.1, 0.9;
  const cd w = kk_default_point(st.R_sigma) + cd(0.05, 0.02);
  const oracle::MatField field = [&](const Vec& z) { return kk_chart_metric(st, z(0)); };
  Vec z(2);
  z << w, cd(0.3, 0.1);
  const MetricJet fd = oracle::fd_jet(field, z, 1e-2);
  const MetricJet exact = kk_chart_jet(st, w);
  CHECK(max_abs(exact.g - fd.g) < 1e-12);
  CHECK(max_abs_diff(exact.dg, fd.dg) < 1e-9);
  CHECK(max_abs_diff(exact.d2g, fd.d2g) < 1e-8);
}

TEST_CASE("KK state validation", "[backgrounds][errors]") {
  KKState st;
  st.a = -1.0;
  CHECK_THROWS_AS(st.validate(), NonPositiveMetric);
  st.a = 1.0;
  st.h << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(st.validate(), NonPositiveMetric);
  st.h << 1.0, 0.1, 0.2, 1.0;
  CHECK_THROWS_AS(st.validate(), ConfigError);
}

TEST_CASE("Lie algebras: bi-invariant metrics are Bismut-flat", "[backgrounds][known_values]") {
  for (const std::string name : {"u1^4", "su2+u1", "su2+su2", "su3"}) {
    INFO(name);
    const LieGroupData L = lie_algebra(name);
    CHECK_NOTHROW(validate_lie(L));
    const LieFlatness f = lie_flatness(L);
    CHECK(f.r_minus < 1e-12);
    CHECK(lie_bismut_flat_check(L) < 1e-12);
    CHECK(f.torsion_vs_cartan < 1e-12);
    CHECK(nijenhuis(L).max_abs() < 1e-12);
    CHECK(ce_d3_norm(L, cartan_form(L)) < 1e-12);
  }
  CHECK(lie_algebra("su2+u1").dim == 4);
  CHECK(lie_algebra("su3").dim == 8);
}

TEST_CASE("Lie: torsion is d^c omega and the Levi-Civita connection alone is not flat", "[backgrounds][oracle]") {
  const LieGroupData L = lie_algebra("su2+u1");
  const RealTensor3 H = bismut_torsion(L);
  CHECK(H.max_abs() > 0.1);
  const RealTensor3 zero(L.dim);
  CHECK(lie_curvature_norm(L, lie_connection(L, zero, 1.0)) > 1e-3);
  const RealTensor3 C = cartan_form(L);
  CHECK(lie_curvature_norm(L, lie_connection(L, C, 1.0)) < 1e-12);
  CHECK(lie_curvature_norm(L, lie_connection(L, C, -1.0)) < 1e-12);
}

TEST_CASE("Lie: constant J on an abelian algebra is integrable", "[backgrounds][basic]") {
  LieGroupData L = lie_algebra("u1^4");
  RMat J = RMat::Zero(4, 4);
  J(0, 3) = -1.0;
  J(3, 0) = 1.0;
  J(1, 2) = -1.0;
  J(2, 1) = 1.0;
  L.J = J;
  CHECK(nijenhuis(L).max_abs() == 0.0);
}

TEST_CASE("Lie: a non-isotropic subspace gives a non-integrable J", "[backgrounds][oracle]") {
  const LieGroupData L = mixed_structure_counterexample();
  CHECK_NOTHROW(validate_lie(L));
  CHECK(nijenhuis(L).max_abs() > 0.1);
}

TEST_CASE("Calabi-Eckmann torsion check", "[backgrounds][known_values]") {
  const CETorsionResiduals r = ce_torsion_check(lie_algebra("su2+su2"));
  CHECK(r.dH < 1e-12);
  CHECK(r.r_minus < 1e-12);
  CHECK(r.cartan_antisymmetry < 1e-15);
  CHECK_THROWS_AS(ce_torsion_check(lie_algebra("su2+u1")), InvalidLieData);
}

TEST_CASE("Lie data validation", "[backgrounds][errors]") {
  LieGroupData L = lie_algebra("su2+u1");
  L.c(0, 1, 2) += 0.1;
  CHECK_THROWS_AS(validate_lie(L), InvalidLieData);
  CHECK_THROWS_AS(lie_flatness(L), InvalidLieData);
  LieGroupData M = lie_algebra("su2+u1");
  M.metric(0, 0) = 2.0;
  CHECK_THROWS_AS(validate_lie(M), InvalidLieData);
  CHECK_THROWS_AS(lie_algebra("so5"), InvalidLieData);
}

TEST_CASE("background loaders read config sections", "[backgrounds][io]") {
  const Config cfg = Config::parse_string(
      "[hopf]\nN = 32\namplitude = 0.1\nmode = 2\n[kk]\nR_sigma = 0\na0 = 2\nh = 1 0.1 2\nF = 1, 0\n[lie]\nalgebra = su3\n");
  const HopfRadialState h = hopf_from_config(cfg);
  CHECK(h.size() == 32);
  CHECK(std::abs(h.a.maxCoeff() - 1.1) < 1e-12);
  const KKState k = kk_from_config(cfg);
  CHECK(k.a == 2.0);
  CHECK(k.h(0, 1) == 0.1);
  CHECK(k.h(1, 1) == 2.0);
  CHECK(k.F[0] == 1.0);
  CHECK(lie_from_config(cfg).dim == 8);
  CHECK_THROWS_AS(kk_from_config(Config::parse_string("[kk]\nh = 1 2\n")), ConfigError);
  CHECK_THROWS_AS(hopf_from_config(Config::parse_string("[hopf]\nN = 32\nprofile_file = /nonexistent\n")), ConfigError);
}
