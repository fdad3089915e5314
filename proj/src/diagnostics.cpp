#include "npd/diagnostics.hpp"

#include "npd/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace npd {
namespace {

constexpr double kEntropyFloor = 1e-30;

RealArray squared_radius(const GridPtr& grid) {
  RealArray r2(grid->real_size());
  for (Eigen::Index p = 0; p < grid->real_size(); ++p) {
    const auto x = grid->position(p);
    r2(p) = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  }
  return r2;
}

double lp_of(const RealArray& v, double p, double cell) {
  if (std::isinf(p) && p > 0) return v.abs().maxCoeff();
  if (p == 1.0) return v.abs().sum() * cell;
  if (p == 2.0) return std::sqrt(v.square().sum() * cell);
  if (p == 3.0 || p == 4.0 || p == 6.0) {
    return std::pow(v.abs().pow(p).sum() * cell, 1.0 / p);
  }
  throw std::invalid_argument("lp_norm: unsupported order p = " + std::to_string(p));
}

struct Snapshot {
  RealField rho;
  RealField sigma;
  RealVector grad_phi;
  RealField grad_phi_mag;
};

IdentityResiduals residuals_from(const NpdState& state, const DerivedFields& d,
                                 const Snapshot& snap,
                                 const std::vector<SpectralField>& tendencies) {
  const double diff = state.params.diffusivity;
  const double z2 = std::pow(state.params.valence_magnitude(), 2);
  SpectralField rho_t = SpectralField::zeros(state.grid());
  SpectralField sigma_t = SpectralField::zeros(state.grid());
  for (int i = 0; i < state.species_count(); ++i) {
    rho_t.coeffs += state.params.valences[i] * tendencies[i].coeffs;
    sigma_t.coeffs += tendencies[i].coeffs;
  }
  const double cell = state.grid()->cell_volume();
  const RealArray sigma_pos = snap.sigma.values.max(0.0);

  // Lambda^-2 rho is phi.
  const double e1 = inner_product(rho_t, d.phi);
  const double e2 = diff * l2_norm_squared(d.rho);
  const double e3 = diff * z2 * (sigma_pos * snap.grad_phi_mag.values.square()).sum() * cell;
  const double e4 = l2_norm_squared(d.u);
  const double e_scale = std::abs(e1) + std::abs(e2) + std::abs(e3) + std::abs(e4);

  const double l1 = inner_product(rho_t, d.rho) + z2 * inner_product(sigma_t, d.sigma);
  const double l2 = diff * sobolev_norm(d.rho, 1.0);
  const double l3 = diff * z2 * sobolev_norm(d.sigma, 1.0);
  const double l4 = diff * z2 * (snap.rho.values.square() * sigma_pos).sum() * cell;
  const double l_scale = std::abs(l1) + std::abs(l2) + std::abs(l3) + std::abs(l4);

  IdentityResiduals r;
  r.energy = e_scale > 0.0 ? std::abs(e1 + e2 + e3 + e4) / e_scale : 0.0;
  r.l2 = l_scale > 0.0 ? std::abs(l1 + l2 + l3 + l4) / l_scale : 0.0;
  return r;
}

Snapshot snapshot(const DerivedFields& d) {
  Snapshot s;
  s.rho = inverse_transform(d.rho);
  s.sigma = inverse_transform(d.sigma);
  const SpectralVector g = gradient(d.phi);
  for (int j = 0; j < 3; ++j) s.grad_phi[j] = inverse_transform(g[j]);
  s.grad_phi_mag = magnitude(s.grad_phi);
  return s;
}

Snapshot snapshot(const NpdState& state, const Evaluation& e) {
  const GridPtr& grid = state.grid();
  Snapshot s{RealField::zeros(grid), RealField::zeros(grid), e.grad_phi, magnitude(e.grad_phi)};
  for (int i = 0; i < state.species_count(); ++i) {
    s.rho.values += state.params.valences[i] * e.concentrations[i].values;
    s.sigma.values += e.concentrations[i].values;
  }
  return s;
}

std::array<double, 4> elliptic_from(const SpectralField& rho_hat, const RealField& rho,
                                    const RealField& grad_phi_mag) {
  const double cell = rho.grid->cell_volume();
  const double rho1 = lp_of(rho.values, 1.0, cell);
  const double rho2 = lp_of(rho.values, 2.0, cell);
  if (rho2 == 0.0 || rho1 == 0.0) return {0.0, 0.0, 0.0, 0.0};
  const double rho4 = lp_of(rho.values, 4.0, cell);
  const double grad_rho2 = std::sqrt(sobolev_norm(rho_hat, 1.0));
  const double g2 = lp_of(grad_phi_mag.values, 2.0, cell);
  const double g6 = lp_of(grad_phi_mag.values, 6.0, cell);
  const double ginf = lp_of(grad_phi_mag.values, kInfinity, cell);
  return {g2 / (std::pow(rho1, 2.0 / 3.0) * std::cbrt(rho2)), g6 / rho2,
          ginf / (std::pow(g2, 0.25) * std::pow(rho2, 0.75) + rho4), ginf / (rho2 + grad_rho2)};
}

}  // namespace

double sobolev_norm(const SpectralField& c, double k) {
  const GridPtr& grid = c.grid;
  const RealArray& w = grid->parseval_weight();
  if (k == 0.0) return (w * c.coeffs.abs2()).sum() * grid->volume();
  if (k < 0.0) {
    const double scale = c.coeffs.abs().maxCoeff();
    if (std::abs(c.coeffs(0)) > 1e-12 * scale || (scale == 0.0 && c.coeffs(0) != 0.0)) {
      throw MeanZeroViolation("sobolev_norm: negative order needs a mean-zero field");
    }
  }
  const RealArray& k2 = grid->k_squared();
  double sum = 0.0;
  const bool integer = k == std::floor(k) && k > 0.0 && k <= 8.0;
  for (Eigen::Index i = 1; i < c.coeffs.size(); ++i) {
    double m;
    if (integer) {
      m = 1.0;
      for (int p = 0; p < static_cast<int>(k); ++p) m *= k2(i);
    } else {
      m = std::pow(k2(i), k);
    }
    sum += w(i) * m * std::norm(c.coeffs(i));
  }
  return sum * grid->volume();
}

double lp_norm(const RealField& c, double p) {
  return lp_of(c.values, p, c.grid->cell_volume());
}

RealField magnitude(const RealVector& v) {
  return {v[0].grid,
          (v[0].values.square() + v[1].values.square() + v[2].values.square()).sqrt()};
}

double entropy(const RealField& c, double positivity_tolerance,
               std::optional<double> region_radius) {
  const double lo = c.values.minCoeff();
  if (lo < -positivity_tolerance) {
    throw InvalidStateError("entropy: concentration " + std::to_string(lo) +
                            " below the positivity tolerance");
  }
  const double floor = kEntropyFloor * c.values.maxCoeff();
  const GridPtr& grid = c.grid;
  const double r2max = region_radius ? (*region_radius) * (*region_radius) : kInfinity;
  double sum = 0.0;
  for (Eigen::Index p = 0; p < grid->real_size(); ++p) {
    const double v = c.values(p);
    if (!(v > floor)) continue;
    if (region_radius) {
      const auto x = grid->position(p);
      if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > r2max) continue;
    }
    sum += v * std::log(v);
  }
  return sum * grid->cell_volume();
}

double exp_entropy(const RealField& c, double positivity_tolerance) {
  const double mass = lp_norm(c, 1.0);
  if (mass == 0.0) throw InvalidStateError("exp_entropy: zero mass");
  return std::exp(-2.0 * entropy(c, positivity_tolerance) / (3.0 * mass));
}

double moment6(const RealField& c) {
  const RealArray r2 = squared_radius(c.grid);
  return (r2.cube() * c.values.square()).sum() * c.grid->cell_volume();
}

IdentityResiduals identity_residuals(const NpdState& state,
                                     const std::vector<SpectralField>& tendencies) {
  if (tendencies.size() != state.concentrations.size()) {
    throw std::invalid_argument("identity_residuals: one tendency per species is required");
  }
  const DerivedFields d = derive_fields(state);
  return residuals_from(state, d, snapshot(d), tendencies);
}

double shell_bound_check(const SpectralField& sigma, double t, double constant,
                         double sigma0_l1) {
  if (!(constant > 0.0)) throw std::invalid_argument("shell_bound_check: C must be positive");
  const GridPtr& grid = sigma.grid;
  const double l3 = grid->volume();
  const double root_t = std::sqrt(std::max(t, 0.0));
  const RealArray& k2 = grid->k_squared();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < sigma.coeffs.size(); ++i) {
    const double xi = std::sqrt(k2(i)) / (2.0 * std::numbers::pi);  // |k| / L
    const double bound = constant * (sigma0_l1 + xi * root_t);
    if (bound <= 0.0) continue;
    worst = std::max(worst, l3 * std::abs(sigma.coeffs(i)) / bound);
  }
  return worst;
}

std::array<double, 4> elliptic_ratios(const SpectralField& rho) {
  const SpectralField phi = solve_poisson(rho);
  const SpectralVector g = gradient(phi);
  RealVector gp;
  for (int j = 0; j < 3; ++j) gp[j] = inverse_transform(g[j]);
  return elliptic_from(rho, inverse_transform(rho), magnitude(gp));
}

DiagRecord measure(const NpdState& state, const DiagOptions& options) {
  const GridPtr& grid = state.grid();
  const int n = state.species_count();
  const double volume = grid->volume();
  const double cell = grid->cell_volume();

  DiagRecord rec;
  rec.t = state.time;
  const Evaluation e = evaluate(state);
  const DerivedFields& d = e.fields;
  const Snapshot snap = snapshot(state, e);
  const std::vector<RealField>& c = e.concentrations;

  rec.charge_total = d.rho.mean() * volume;
  rec.sobolev_sq.resize(n);
  for (int i = 0; i < n; ++i) {
    rec.mass.push_back(state.concentrations[i].mean() * volume);
    for (int k = 0; k <= options.k_max; ++k) {
      rec.sobolev_sq[i].push_back(sobolev_norm(state.concentrations[i], k));
    }
  }
  for (std::size_t j = 0; j < kSigmaNormOrders.size(); ++j) {
    rec.sigma_lp[j] = lp_of(snap.sigma.values, kSigmaNormOrders[j], cell);
  }
  rec.rho_l2sq = l2_norm_squared(d.rho);
  rec.u_l2sq = l2_norm_squared(d.u);
  rec.u_inf = magnitude(e.u).values.maxCoeff();
  rec.gradphi_l2 = lp_of(snap.grad_phi_mag.values, 2.0, cell);
  rec.gradphi_inf = snap.grad_phi_mag.values.maxCoeff();

  const double radius = options.local_radius > 0.0 ? options.local_radius : grid->length() / 8.0;
  for (int i = 0; i < n; ++i) {
    const double e = entropy(c[i], options.positivity_tolerance);
    rec.entropy.push_back(e);
    rec.entropy_total += e;
    const double m1 = lp_of(c[i].values, 1.0, cell);
    rec.exp_entropy.push_back(m1 > 0.0 ? std::exp(-2.0 * e / (3.0 * m1)) : 0.0);
    rec.moment6.push_back(options.moments ? moment6(c[i]) : std::nan(""));
    rec.local_entropy.push_back(entropy(c[i], options.positivity_tolerance, radius));
    rec.min_c.push_back(c[i].values.minCoeff());
  }

  if (options.residuals) {
    const IdentityResiduals r = residuals_from(state, d, snap, e.rhs);
    rec.residual_energy = r.energy;
    rec.residual_l2 = r.l2;
  }
  const double sigma0 =
      options.sigma0_l1 > 0.0 ? options.sigma0_l1 : lp_of(snap.sigma.values, 1.0, cell);
  rec.shell_ratio_max = shell_bound_check(d.sigma, state.time, options.shell_constant, sigma0);
  rec.elliptic = elliptic_from(d.rho, snap.rho, snap.grad_phi_mag);
  if (options.baseline) rec.sharpness = sharpness_norms(state, *options.baseline, options.k_max);
  return rec;
}

}  // namespace npd
