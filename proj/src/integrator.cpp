#include "npd/integrator.hpp"

#include "npd/spectral.hpp"

#include <cmath>
#include <sstream>

namespace npd {
namespace {

NpdState with_coeffs(const NpdState& base, std::vector<ComplexArray> coeffs, double time) {
  NpdState s;
  s.time = time;
  s.params = base.params;
  s.concentrations.reserve(coeffs.size());
  for (auto& c : coeffs) s.concentrations.push_back({base.grid(), std::move(c)});
  return s;
}

void check_guards(const NpdState& state, const NonlinearTendency& nl, double dt,
                  const StepperConfig& config) {
  if (nl.min_concentration < -config.positivity_tolerance) {
    std::ostringstream msg;
    msg << "positivity violated at t = " << state.time << ": min c = " << nl.min_concentration
        << " < -" << config.positivity_tolerance;
    throw PositivityError(msg.str(), state.time, nl.min_concentration);
  }
  if (config.check_cfl) {
    const double drift = state.params.valence_magnitude() * state.params.diffusivity *
                         nl.max_grad_phi;
    const double bound = cfl_dt(state.grid()->spacing(), nl.max_speed, drift, config);
    if (dt > bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "time step " << dt << " exceeds the stability bound " << bound << " at t = "
          << state.time;
      throw StabilityError(msg.str());
    }
  }
}

}  // namespace

void StepperConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("stepper.dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("stepper.t_end must be non-negative");
  if (t_end > 0.0 && dt > t_end) throw std::invalid_argument("stepper.dt must not exceed t_end");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
    throw std::invalid_argument("stepper.cfl_safety must lie in (0, 1]");
  }
  if (scheme_order != 4) throw std::invalid_argument("stepper.scheme_order: only 4 is supported");
  if (!(dt_max > 0.0)) throw std::invalid_argument("stepper.dt_max must be positive");
}

double cfl_dt(double spacing, double max_speed, double max_drift, const StepperConfig& config) {
  double bound = config.dt_max;
  if (max_speed > 0.0) bound = std::min(bound, config.cfl_safety * spacing / max_speed);
  if (max_drift > 0.0) bound = std::min(bound, config.cfl_safety * spacing / max_drift);
  return bound;
}

double cfl_dt(const NpdState& state, const StepperConfig& config) {
  const NonlinearTendency nl = nonlinear_tendency(state);
  const double drift =
      state.params.valence_magnitude() * state.params.diffusivity * nl.max_grad_phi;
  return cfl_dt(state.grid()->spacing(), nl.max_speed, drift, config);
}

namespace {

NpdState step_impl(const NpdState& state, double dt, const StepperConfig* config) {
  const GridPtr& grid = state.grid();
  const int n = state.species_count();
  const RealArray half = (-0.5 * state.params.diffusivity * dt * grid->k_squared()).exp();
  const RealArray full = half.square();

  // Stage 1.
  NonlinearTendency nl = nonlinear_tendency(state);
  if (config) check_guards(state, nl, dt, *config);
  std::vector<ComplexArray> k1(n), k2(n), k3(n), k4(n), stage(n);
  for (int i = 0; i < n; ++i) {
    k1[i] = dt * nl.tendency[i].coeffs;
    stage[i] = half * (state.concentrations[i].coeffs + 0.5 * k1[i]);
  }
  // Stage 2.
  NpdState s = with_coeffs(state, stage, state.time + 0.5 * dt);
  nl = nonlinear_tendency(s);
  for (int i = 0; i < n; ++i) {
    k2[i] = dt * nl.tendency[i].coeffs;
    stage[i] = half * state.concentrations[i].coeffs + 0.5 * k2[i];
  }
  // Stage 3.
  s = with_coeffs(state, stage, state.time + 0.5 * dt);
  nl = nonlinear_tendency(s);
  for (int i = 0; i < n; ++i) {
    k3[i] = dt * nl.tendency[i].coeffs;
    stage[i] = full * state.concentrations[i].coeffs + half * k3[i];
  }
  // Stage 4.
  s = with_coeffs(state, stage, state.time + dt);
  nl = nonlinear_tendency(s);
  std::vector<ComplexArray> next(n);
  for (int i = 0; i < n; ++i) {
    k4[i] = dt * nl.tendency[i].coeffs;
    next[i] = full * state.concentrations[i].coeffs +
              (full * k1[i] + 2.0 * half * (k2[i] + k3[i]) + k4[i]) / 6.0;
  }

  NpdState out = with_coeffs(state, std::move(next), state.time + dt);
  for (const auto& c : out.concentrations) {
    if (!all_finite(c)) {
      std::ostringstream msg;
      msg << "non-finite coefficients after step to t = " << out.time;
      throw BlowUpError(msg.str(), out.time);
    }
  }
  return out;
}

}  // namespace

NpdState step(const NpdState& state, double dt) { return step_impl(state, dt, nullptr); }

NpdState step(const NpdState& state, double dt, const StepperConfig& config) {
  return step_impl(state, dt, &config);
}

int step_count(double t_end, double dt) {
  if (t_end <= 0.0) return 0;
  return static_cast<int>(std::ceil(t_end / dt - 1e-9));
}

NpdState run_until(NpdState state, const StepperConfig& config, const Observer& observer,
                   int observe_every) {
  config.validate();
  if (observe_every < 1) throw std::invalid_argument("observer cadence must be >= 1");
  const double t0 = state.time;
  const double t_stop = t0 + config.t_end;
  const int steps = step_count(config.t_end, config.dt);
  if (observer) observer(state);
  for (int s = 1; s <= steps; ++s) {
    const double dt = s == steps ? t_stop - state.time : config.dt;
    state = step(state, dt, config);
    // Keep the time grid free of accumulated rounding.
    state.time = s == steps ? t_stop : t0 + s * config.dt;
    if (observer && s % observe_every == 0) observer(state);
  }
  return state;
}

ConvergenceStudy self_convergence(const NpdState& state, double dt, int steps) {
  if (!(dt > 0.0) || steps < 1) throw std::invalid_argument("self_convergence: need dt > 0 and steps >= 1");
  const auto integrate = [&](int refine) {
    NpdState s = state;
    for (int i = 0; i < steps * refine; ++i) s = step(s, dt / refine);
    return s;
  };
  const NpdState a = integrate(1);
  const NpdState b = integrate(2);
  const NpdState c = integrate(4);
  ConvergenceStudy out;
  for (int i = 0; i < state.species_count(); ++i) {
    out.coarse_difference += std::sqrt(l2_norm_squared(a.concentrations[i] - b.concentrations[i]));
    out.fine_difference += std::sqrt(l2_norm_squared(b.concentrations[i] - c.concentrations[i]));
    out.solution_norm += std::sqrt(l2_norm_squared(c.concentrations[i]));
  }
  out.order = std::log2(out.coarse_difference / out.fine_difference);
  return out;
}

}  // namespace npd
