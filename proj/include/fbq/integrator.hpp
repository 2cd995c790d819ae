#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbq/boussinesq.hpp"

namespace fbq {

enum class Scheme { IfRk2, IfRk4 };

struct IntegratorConfig {
  double dt = 0.01;  // largest step ever taken (cap for cfl_dt)
  Scheme scheme = Scheme::IfRk4;
  double cfl_safety = 0.5;
  double t_end = 10.0;
  int recheck_interval = 100;  // steps between CFL re-checks; 0 disables

  void validate() const;
};

/// Thrown when a step produces a non-finite coefficient.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, FlowState last_valid)
      : std::runtime_error(what), last_valid_(std::move(last_valid)) {}
  const FlowState& last_valid() const { return last_valid_; }

 private:
  FlowState last_valid_;
};

/// Integrating-factor Runge-Kutta stepper. The fractional dissipation is
/// applied through exact exponentials exp(-kappa |k|^{2beta} dt) and
/// exp(-nu |k|^{2alpha} dt); advection, buoyancy and forcing are explicit.
/// Factors are cached per dt.
class Stepper {
 public:
  Stepper(const GridSpec& grid, const PhysParams& params, Scheme scheme, ModelOptions options = {});

  /// Advances `state` by dt in place. Throws BlowUpError (state untouched).
  void advance(FlowState& state, const ForcingSpec& forcing, double dt);

  Scheme scheme() const { return scheme_; }
  const ModelOptions& options() const { return options_; }

 private:
  void prepare(double dt);
  void rk2(FlowState& state, const ForcingSpec& forcing, double dt);
  void rk4(FlowState& state, const ForcingSpec& forcing, double dt);

  GridSpec grid_;
  PhysParams params_;
  Scheme scheme_;
  ModelOptions options_;
  double cached_dt_ = -1.0;
  std::vector<double> theta_rate_, omega_rate_;  // kappa|k|^{2beta}, nu|k|^{2alpha}
  std::vector<double> e_theta_, e_theta_half_, e_omega_, e_omega_half_;
  SpectralField k1t_, k1w_, k2t_, k2w_, k3t_, k3w_, k4t_, k4w_;
  FlowState work_;
};

/// One step; convenience wrapper constructing a Stepper.
FlowState step(const FlowState& state, const ForcingSpec& forcing, const PhysParams& params, double dt,
               Scheme scheme = Scheme::IfRk4, const ModelOptions& options = {});

/// Largest |u| on the physical grid.
double max_speed(const SpectralField& omega);

/// min(safety * dx / max|u|, cap); a motionless state gets the cap.
double cfl_dt(const FlowState& state, double safety, double cap);

/// Called after every accepted step with the new state and the step size.
using StepObserver = std::function<void(const FlowState&, double dt)>;

/// Integrates from state.t to t_end with a fixed step chosen from the
/// initial CFL condition and shortened (never lengthened) at each re-check.
/// The step is adjusted so the final step lands exactly on t_end.
FlowState integrate(FlowState state, const ForcingSpec& forcing, const PhysParams& params,
                    const IntegratorConfig& config, const ModelOptions& options = {},
                    const StepObserver& observer = {});

struct SpinUpResult {
  FlowState state;
  bool plateau = false;  // time-averaged ||Lambda^beta theta||^2 has settled
  double drift = 0.0;    // relative change between the two halves of the last 20%
  long steps = 0;
};

/// Integrates for duration t_spin and reports whether ||Lambda^beta theta||^2
/// has plateaued: the time averages over the two halves of the final 20% of
/// the run differ by less than `plateau_tolerance` relative.
SpinUpResult spin_up(const FlowState& initial, const ForcingSpec& forcing, const PhysParams& params,
                     const IntegratorConfig& config, double t_spin, double plateau_tolerance = 0.05,
                     const ModelOptions& options = {});

// Checkpoint: char[8] "FBQCKPT1" | int32 n | int32 0 | float64 nu, kappa,
// alpha, beta, t | theta spectrum dump | omega spectrum dump.
void write_checkpoint(std::ostream& out, const FlowState& state, const PhysParams& params);
FlowState read_checkpoint(std::istream& in, PhysParams* params = nullptr);

}  // namespace fbq
