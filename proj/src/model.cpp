#include "npd/model.hpp"

#include "npd/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace npd {
namespace {

struct Assembly {
  std::vector<RealArray> concentrations;
  SpectralField rho;
  SpectralField sigma;
  SpectralField phi;
  std::array<RealArray, 3> grad_phi;
  SpectralField flux_source_div;  // div of the dealiased rho grad phi
  SpectralVector u;
  std::array<RealArray, 3> u_phys;
};

const Complex kI{0.0, 1.0};

double charge_scale(const NpdState& state) {
  double scale = 0.0;
  for (int i = 0; i < state.species_count(); ++i) {
    scale += std::abs(state.params.valences[i] * state.concentrations[i].mean());
  }
  return scale;
}

Assembly assemble(const NpdState& state, bool need_velocity_physical,
                  ComplexArray& scratch) {
  const GridPtr& grid = state.grid();
  const auto& z = state.params.valences;
  const auto& kd = grid->k_derivative();
  const RealArray& mask = grid->dealias_mask();
  const Eigen::Index ns = grid->spectral_size();
  Assembly a;
  a.rho = SpectralField::zeros(grid);
  a.sigma = SpectralField::zeros(grid);
  RealArray rho_phys = RealArray::Zero(grid->real_size());
  a.concentrations.resize(state.concentrations.size());
  for (int i = 0; i < state.species_count(); ++i) {
    const SpectralField& c = state.concentrations[i];
    require_same_grid(grid, c.grid);
    a.rho.coeffs += z[i] * c.coeffs;
    a.sigma.coeffs += c.coeffs;
    scratch = c.coeffs;
    a.concentrations[i].resize(grid->real_size());
    grid->inverse(scratch.data(), a.concentrations[i].data());
    rho_phys += z[i] * a.concentrations[i];
  }
  a.phi = solve_poisson(a.rho, charge_scale(state));

  SpectralVector force;
  RealArray work(grid->real_size());
  for (int j = 0; j < 3; ++j) {
    scratch = a.phi.coeffs * (kI * kd[j].cast<Complex>());
    a.grad_phi[j].resize(grid->real_size());
    grid->inverse(scratch.data(), a.grad_phi[j].data());
    work = rho_phys * a.grad_phi[j];
    force[j] = {grid, ComplexArray(ns)};
    grid->forward(work.data(), force[j].coeffs.data());
  }

  // Dealias, take the divergence and apply -P in one pass over the modes.
  a.flux_source_div = {grid, ComplexArray(ns)};
  for (int j = 0; j < 3; ++j) a.u[j] = {grid, ComplexArray(ns)};
  for (Eigen::Index i = 0; i < ns; ++i) {
    const double m = mask(i);
    const double k[3] = {kd[0](i), kd[1](i), kd[2](i)};
    const Complex f[3] = {m * force[0].coeffs(i), m * force[1].coeffs(i), m * force[2].coeffs(i)};
    const Complex kf = k[0] * f[0] + k[1] * f[1] + k[2] * f[2];
    a.flux_source_div.coeffs(i) = kI * kf;
    const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    const Complex proj = kk > 0.0 ? kf / kk : Complex{0.0, 0.0};
    for (int j = 0; j < 3; ++j) a.u[j].coeffs(i) = -(f[j] - k[j] * proj);
  }
  if (need_velocity_physical) {
    for (int j = 0; j < 3; ++j) {
      scratch = a.u[j].coeffs;
      a.u_phys[j].resize(grid->real_size());
      grid->inverse(scratch.data(), a.u_phys[j].data());
    }
  }
  return a;
}

}  // namespace

double SpeciesParams::valence_magnitude() const {
  return valences.empty() ? 0.0 : std::abs(valences.front());
}

void SpeciesParams::validate() const {
  if (valences.empty()) throw ConfigError("species: at least one species is required");
  if (!(diffusivity > 0.0) || !std::isfinite(diffusivity)) {
    throw ConfigError("diffusivity: must be positive");
  }
  for (double zi : valences) {
    if (!std::isfinite(zi)) throw ConfigError("species.valence: must be finite");
  }
  if (!allow_unequal_valence) {
    const double z = valence_magnitude();
    for (std::size_t i = 1; i < valences.size(); ++i) {
      if (std::abs(std::abs(valences[i]) - z) > 1e-12 * std::max(1.0, z)) {
        throw ConfigError("species.valence: absolute valences must be equal (set "
                          "allow_unequal_valence to override)");
      }
    }
  }
}

DerivedFields derive_fields(const NpdState& state, bool with_pressure) {
  ComplexArray scratch;
  Assembly a = assemble(state, false, scratch);
  DerivedFields d{std::move(a.rho), std::move(a.sigma), std::move(a.phi), std::move(a.u),
                  std::nullopt};
  if (with_pressure) d.pressure = solve_poisson(a.flux_source_div);
  return d;
}

namespace {

NonlinearTendency tendency_from(const NpdState& state, const Assembly& a,
                                ComplexArray& scratch) {
  const GridPtr& grid = state.grid();
  const double diffusivity = state.params.diffusivity;
  const auto& kd = grid->k_derivative();
  const RealArray& mask = grid->dealias_mask();

  NonlinearTendency out;
  out.min_concentration = std::numeric_limits<double>::infinity();
  out.max_concentration = -std::numeric_limits<double>::infinity();
  out.max_speed = std::sqrt(
      (a.u_phys[0].square() + a.u_phys[1].square() + a.u_phys[2].square()).maxCoeff());
  out.max_grad_phi = std::sqrt(
      (a.grad_phi[0].square() + a.grad_phi[1].square() + a.grad_phi[2].square()).maxCoeff());

  RealArray work(grid->real_size());
  scratch.resize(grid->spectral_size());
  out.tendency.reserve(state.concentrations.size());
  for (int i = 0; i < state.species_count(); ++i) {
    const RealArray& c = a.concentrations[i];
    out.min_concentration = std::min(out.min_concentration, c.minCoeff());
    out.max_concentration = std::max(out.max_concentration, c.maxCoeff());
    const double drift = state.params.valences[i] * diffusivity;
    SpectralField t = SpectralField::zeros(grid);
    for (int j = 0; j < 3; ++j) {
      work = c * (drift * a.grad_phi[j] - a.u_phys[j]);
      grid->forward(work.data(), scratch.data());
      t.coeffs += scratch * (kI * (mask * kd[j]).cast<Complex>());
    }
    out.tendency.push_back(std::move(t));
  }
  return out;
}

void add_diffusion(const NpdState& state, std::vector<SpectralField>& tendency) {
  const double diffusivity = state.params.diffusivity;
  const RealArray& k2 = state.grid()->k_squared();
  for (int i = 0; i < state.species_count(); ++i) {
    tendency[i].coeffs -= diffusivity * state.concentrations[i].coeffs * k2.cast<Complex>();
  }
}

}  // namespace

NonlinearTendency nonlinear_tendency(const NpdState& state) {
  ComplexArray scratch;
  const Assembly a = assemble(state, true, scratch);
  return tendency_from(state, a, scratch);
}

Evaluation evaluate(const NpdState& state) {
  const GridPtr& grid = state.grid();
  ComplexArray scratch;
  Assembly a = assemble(state, true, scratch);
  Evaluation e;
  e.rhs = std::move(tendency_from(state, a, scratch).tendency);
  add_diffusion(state, e.rhs);
  for (auto& c : a.concentrations) e.concentrations.push_back({grid, std::move(c)});
  for (int j = 0; j < 3; ++j) {
    e.grad_phi[j] = {grid, std::move(a.grad_phi[j])};
    e.u[j] = {grid, std::move(a.u_phys[j])};
  }
  e.fields = {std::move(a.rho), std::move(a.sigma), std::move(a.phi), std::move(a.u),
              std::nullopt};
  return e;
}

std::vector<SpectralField> compute_rhs(const NpdState& state) {
  NonlinearTendency nl = nonlinear_tendency(state);
  add_diffusion(state, nl.tendency);
  return std::move(nl.tendency);
}

double neutralization_factor(const std::vector<double>& valences,
                             const std::vector<double>& masses) {
  const std::size_t n = valences.size();
  double others = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) others += valences[i] * masses[i];
  const double last = valences[n - 1] * masses[n - 1];
  if (last == 0.0) {
    if (others == 0.0) return 1.0;
    throw ConfigError(
        "species: the last species carries no charge, so the integral of rho cannot be made "
        "zero");
  }
  const double factor = -others / last;
  if (!(factor > 0.0)) {
    throw ConfigError(
        "species: total charge cannot be neutralized by rescaling the last species (the "
        "integral of rho must be zero)");
  }
  return factor;
}

InitialState make_initial_state(const InitialCondition& ic, const GridPtr& grid) {
  SpeciesParams params;
  params.diffusivity = ic.diffusivity;
  params.allow_unequal_valence = ic.allow_unequal_valence;
  for (const auto& s : ic.species) params.valences.push_back(s.valence);
  params.validate();

  InitialState out;
  const double l = grid->length();
  const double h = grid->spacing();
  std::vector<RealField> fields;
  std::vector<double> masses;
  for (std::size_t i = 0; i < ic.species.size(); ++i) {
    RealField f = RealField::zeros(grid);
    for (const GaussianBump& b : ic.species[i].bumps) {
      if (!(b.amplitude >= 0.0)) {
        throw ConfigError("species[" + std::to_string(i) + "].bumps.amplitude: must be >= 0");
      }
      if (!(b.width > 0.0)) {
        throw ConfigError("species[" + std::to_string(i) + "].bumps.width: must be > 0");
      }
      if (b.width < 3.0 * h) {
        std::ostringstream msg;
        msg << "species[" << i << "]: bump width " << b.width
            << " is under 3 grid spacings (h = " << h << ")";
        out.warnings.push_back(msg.str());
      }
      const double inv = 1.0 / (2.0 * b.width * b.width);
      for (Eigen::Index p = 0; p < grid->real_size(); ++p) {
        const auto x = grid->position(p);
        double r2 = 0.0;
        for (int j = 0; j < 3; ++j) {
          double d = x[j] - b.center[j];
          d -= l * std::round(d / l);
          r2 += d * d;
        }
        f.values(p) += b.amplitude * std::exp(-r2 * inv);
      }
    }
    masses.push_back(integral(f));
    fields.push_back(std::move(f));
  }

  out.neutralization_factor = neutralization_factor(params.valences, masses);
  fields.back().values *= out.neutralization_factor;
  if (std::abs(out.neutralization_factor - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "last species rescaled by " << out.neutralization_factor << " to neutralize charge";
    out.warnings.push_back(msg.str());
  }

  out.state.params = params;
  for (auto& f : fields) out.state.concentrations.push_back(forward_transform(f));
  return out;
}

}  // namespace npd
