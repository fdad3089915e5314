#pragma once

#include "npd/model.hpp"

#include <functional>
#include <string>

namespace npd {

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class PositivityError : public std::runtime_error {
 public:
  PositivityError(const std::string& what, double time, double min_value)
      : std::runtime_error(what), time_(time), min_value_(min_value) {}
  double time() const { return time_; }
  double min_value() const { return min_value_; }

 private:
  double time_;
  double min_value_;
};

class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepperConfig {
  double dt = 0.1;
  double t_end = 1.0;
  double cfl_safety = 0.5;
  int scheme_order = 4;
  /// Returned by cfl_dt when neither velocity nor drift limits the step.
  double dt_max = 0.25;
  /// Absolute floor for min c_i; a run aborts below -positivity_tolerance.
  double positivity_tolerance = std::numeric_limits<double>::infinity();
  /// Re-check dt against cfl_dt at the start of every step.
  bool check_cfl = true;

  void validate() const;
};

/// Stability bound: cfl_safety * min(h / max|u|, h / (|z| D max|grad phi|)),
/// capped at dt_max.
double cfl_dt(const NpdState& state, const StepperConfig& config);
double cfl_dt(double spacing, double max_speed, double max_drift, const StepperConfig& config);

/// One integrating-factor RK4 step: diffusion through exp(-D |k|^2 dt),
/// nonlinear terms by classical RK4 in the integrating-factor frame.
///
/// With a config, enforces positivity and the CFL bound on the incoming
/// state; always throws BlowUpError if the result is not finite.
NpdState step(const NpdState& state, double dt);
NpdState step(const NpdState& state, double dt, const StepperConfig& config);

using Observer = std::function<void(const NpdState&)>;

/// Advances to t_end with fixed steps of config.dt (the last one shortened
/// when t_end is not a multiple of dt). The observer sees the initial state
/// and every `observe_every` steps, so it fires floor(steps / k) + 1 times.
NpdState run_until(NpdState state, const StepperConfig& config, const Observer& observer,
                   int observe_every = 1);

int step_count(double t_end, double dt);

struct ConvergenceStudy {
  double order = 0.0;
  /// ||u(dt) - u(dt/2)|| and ||u(dt/2) - u(dt/4)|| summed over species.
  double coarse_difference = 0.0;
  double fine_difference = 0.0;
  /// ||u(dt/4)||, for judging whether the differences sit at roundoff.
  double solution_norm = 0.0;
};

/// Richardson self-convergence: integrates `steps` steps of dt, 2 steps of
/// dt/2 per coarse step and 4 of dt/4, and returns
/// log2(coarse_difference / fine_difference).
ConvergenceStudy self_convergence(const NpdState& state, double dt, int steps);

}  // namespace npd
