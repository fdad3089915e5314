#include "support.hpp"

#include "npd/diagnostics.hpp"

#include <doctest.h>

using namespace npd;
using namespace npd::testing;

namespace {

double max_abs(const SpectralField& f) { return f.coeffs.abs().maxCoeff(); }

NpdState uniform_mode_state(const GridPtr& g, double base, double amplitude) {
  SpectralField c = forward_transform(sample(g, [&](double x, double, double) {
    return base + amplitude * std::cos(2.0 * kPi * x / g->length());
  }));
  NpdState s;
  s.params.valences = {1.0, -1.0};
  s.params.diffusivity = 0.7;
  s.concentrations = {c, c};
  return s;
}

double truncated_gaussian_integral(double width, double length) {
  return width * std::sqrt(2.0 * kPi) * std::erf(length / (2.0 * std::sqrt(2.0) * width));
}

}  // namespace

TEST_CASE("species parameters") {
  SpeciesParams p;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.valences = {1.0, -1.0};
  p.diffusivity = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.diffusivity = 1.0;
  CHECK_NOTHROW(p.validate());
  p.valences = {1.0, -2.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.allow_unequal_valence = true;
  CHECK_NOTHROW(p.validate());
  CHECK(p.valence_magnitude() == 1.0);
}

TEST_CASE("neutral configuration has no field or flow") {
  auto g = grid(8.0, 16);
  NpdState s = uniform_mode_state(g, 1.0, 0.3);
  DerivedFields d = derive_fields(s, true);
  CHECK(max_abs(d.rho) == 0.0);
  CHECK(max_abs(d.phi) == 0.0);
  for (const auto& c : d.u) CHECK(max_abs(c) == 0.0);
  REQUIRE(d.pressure.has_value());
  CHECK(max_abs(*d.pressure) == 0.0);
  CHECK(d.sigma.mean() == doctest::Approx(2.0));
}

TEST_CASE("uniform neutral state is steady") {
  auto g = grid(5.0, 16);
  NpdState s = uniform_mode_state(g, 2.0, 0.0);
  for (const auto& t : compute_rhs(s)) CHECK(max_abs(t) < 1e-15);
}

TEST_CASE("neutral single mode decays as a diffusion eigenmode") {
  auto g = grid(5.0, 16);
  const double a = 0.25;
  NpdState s = uniform_mode_state(g, 1.0, a);
  const double rate = s.params.diffusivity * std::pow(2.0 * kPi / g->length(), 2);
  SpectralField expected = forward_transform(cosine_mode(g, -rate * a, 0));
  for (const auto& t : compute_rhs(s)) CHECK(max_abs(t - expected) < 1e-15);
}

TEST_CASE("charged state satisfies the exact identities") {
  auto g = grid(12.0, 32);
  NpdState s = dipole(g, 1.0, 1.2, 1.0, 0.8);
  Evaluation e = evaluate(s);

  SUBCASE("rhs agrees between entry points") {
    std::vector<SpectralField> rhs = compute_rhs(s);
    for (int i = 0; i < 2; ++i) CHECK(max_abs(rhs[i] - e.rhs[i]) < 1e-15);
  }
  SUBCASE("mass and charge are conserved to roundoff") {
    for (const auto& t : e.rhs) CHECK(std::abs(t.coeffs(0)) < 1e-13);
    CHECK(std::abs((e.rhs[0] - e.rhs[1]).coeffs(0)) < 1e-13);
  }
  SUBCASE("energy and L2 identities") {
    IdentityResiduals r = identity_residuals(s, e.rhs);
    CHECK(r.energy < 1e-7);
    CHECK(r.l2 < 1e-7);
  }
  SUBCASE("velocity is divergence-free and orthogonal to gradients") {
    CHECK(max_abs(divergence(e.fields.u)) < 1e-13);
    std::mt19937_64 rng(4);
    SpectralField q = random_band_limited(g, rng, 10);
    const double scale = std::sqrt(l2_norm_squared(e.fields.u) * l2_norm_squared(gradient(q)));
    CHECK(std::abs(inner_product(e.fields.u, gradient(q))) < 1e-12 * scale);
  }
  SUBCASE("kinetic energy equals the work of the electric force") {
    RealField rho = RealField::zeros(g);
    for (int i = 0; i < 2; ++i) rho.values += s.params.valences[i] * e.concentrations[i].values;
    double work = 0.0;
    for (int j = 0; j < 3; ++j) {
      RealField f{g, rho.values * e.grad_phi[j].values * e.u[j].values};
      work += integral(f);
    }
    const double ke = l2_norm_squared(e.fields.u);
    CHECK(ke > 0.0);
    CHECK(std::abs(ke + work) < 1e-8 * ke);
  }
  SUBCASE("Darcy law with the reconstructed pressure") {
    DerivedFields d = derive_fields(s, true);
    REQUIRE(d.pressure.has_value());
    RealField rho = RealField::zeros(g);
    for (int i = 0; i < 2; ++i) rho.values += s.params.valences[i] * e.concentrations[i].values;
    SpectralVector gp = gradient(*d.pressure);
    double err = 0.0, scale = 0.0;
    for (int j = 0; j < 3; ++j) {
      SpectralField force = dealias(forward_transform({g, rho.values * e.grad_phi[j].values}));
      err += l2_norm_squared(gp[j] + d.u[j] + force);
      scale += l2_norm_squared(force);
    }
    CHECK(std::sqrt(err / scale) < 1e-12);
  }
  SUBCASE("potential solves the Poisson equation") {
    CHECK(relative_difference(e.fields.rho, -1.0 * laplacian(e.fields.phi)) < 1e-12);
  }
}

TEST_CASE("nonlinear tendency reports extrema") {
  auto g = grid(12.0, 16);
  NpdState s = dipole(g, 2.0, 1.5, 1.0);
  NonlinearTendency nl = nonlinear_tendency(s);
  double lo = 1e300, hi = -1e300;
  for (const auto& c : s.concentrations) {
    RealField f = inverse_transform(c);
    lo = std::min(lo, f.values.minCoeff());
    hi = std::max(hi, f.values.maxCoeff());
  }
  CHECK(nl.min_concentration == doctest::Approx(lo).epsilon(1e-12));
  CHECK(nl.max_concentration == doctest::Approx(hi).epsilon(1e-12));
  CHECK(nl.max_speed > 0.0);
  CHECK(nl.max_grad_phi > 0.0);
}

TEST_CASE("initial state construction") {
  const double l = 16.0, w = 1.3;
  auto g = grid(l, 48);

  SUBCASE("constructed neutrality and analytic masses") {
    InitialCondition ic;
    ic.species = {{1.0, {{1.0, {1.0, 0.5, 0.0}, w}}}, {-1.0, {{0.8, {-1.0, 0.0, 2.0}, w}}}};
    InitialState is = make_initial_state(ic, g);
    REQUIRE(is.warnings.size() == 1);
    CHECK(is.warnings[0].find("rescaled") != std::string::npos);
    CHECK(is.neutralization_factor == doctest::Approx(1.25).epsilon(1e-9));
    const NpdState& s = is.state;
    const double m1 = s.concentrations[0].mean() * g->volume();
    const double m2 = s.concentrations[1].mean() * g->volume();
    CHECK(std::abs(m1 - m2) <= 1e-12 * (m1 + m2));
    const double analytic = std::pow(truncated_gaussian_integral(w, l), 3);
    CHECK(m1 == doctest::Approx(analytic).epsilon(1e-8));
  }
  SUBCASE("narrow bumps are flagged") {
    InitialCondition ic;
    ic.species = {{1.0, {{1.0, {0.0, 0.0, 0.0}, 0.9}}}, {-1.0, {{1.0, {1.0, 0.0, 0.0}, 0.9}}}};
    InitialState is = make_initial_state(ic, g);
    CHECK(is.warnings.size() == 2);
  }
  SUBCASE("single charged species cannot be neutralized") {
    InitialCondition ic;
    ic.species = {{1.0, {{1.0, {0.0, 0.0, 0.0}, w}}}};
    CHECK_THROWS_AS(make_initial_state(ic, g), ConfigError);
  }
  SUBCASE("same-sign species cannot be neutralized") {
    InitialCondition ic;
    ic.species = {{1.0, {{1.0, {0.0, 0.0, 0.0}, w}}}, {1.0, {{1.0, {1.0, 0.0, 0.0}, w}}}};
    CHECK_THROWS_AS(make_initial_state(ic, g), ConfigError);
  }
  SUBCASE("negative amplitude") {
    InitialCondition ic;
    ic.species = {{1.0, {{-1.0, {0.0, 0.0, 0.0}, w}}}, {-1.0, {{1.0, {1.0, 0.0, 0.0}, w}}}};
    CHECK_THROWS_AS(make_initial_state(ic, g), ConfigError);
  }
  SUBCASE("bump centers wrap periodically") {
    InitialCondition a, b;
    a.species = {{1.0, {{1.0, {l / 2 - 1.0, 0.0, 0.0}, w}}}, {-1.0, {{1.0, {0.0, 0.0, 0.0}, w}}}};
    b.species = {{1.0, {{1.0, {-l / 2 - 1.0, 0.0, 0.0}, w}}}, {-1.0, {{1.0, {0.0, 0.0, 0.0}, w}}}};
    const auto sa = make_initial_state(a, g).state;
    const auto sb = make_initial_state(b, g).state;
    CHECK(max_abs(sa.concentrations[0] - sb.concentrations[0]) < 1e-14);
  }
}

TEST_CASE("neutralization factor") {
  CHECK(neutralization_factor({1.0, -1.0}, {2.0, 4.0}) == doctest::Approx(0.5));
  CHECK(neutralization_factor({2.0, 1.0, -1.0}, {1.0, 1.0, 1.0}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(neutralization_factor({1.0, 0.0}, {1.0, 1.0}), ConfigError);
  CHECK(neutralization_factor({0.0, 0.0}, {1.0, 1.0}) == 1.0);
}
