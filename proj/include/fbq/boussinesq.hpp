#pragma once

#include <vector>

#include "fbq/spectral_field.hpp"

namespace fbq {

/// Viscosity, diffusivity and the two dissipation exponents.
struct PhysParams {
  double nu = 0.1;
  double kappa = 0.1;
  double alpha = 0.75;
  double beta = 0.75;
  /// Accept alpha, beta outside (1/2, 1) for exploratory runs.
  bool allow_out_of_range_exponents = false;

  /// Throws std::invalid_argument naming the violated condition.
  void validate() const;
};

struct ForcingMode {
  int k1 = 0;
  int k2 = 0;
  double amplitude = 0.0;
  Phase phase = Phase::Sin;
};

/// Time-independent temperature forcing f built from trigonometric modes,
/// with the norms the bound calculators need.
struct ForcingSpec {
  std::vector<ForcingMode> modes;
  SpectralField field;
  double norm_l2 = 0.0;           // ||f||
  double norm_lambda_beta = 0.0;  // ||Lambda^beta f||
  double norm_lq_a = 0.0;         // ||f||_{L^{4/(2beta-1)}}
  double norm_lq_a1 = 0.0;        // ||f||_{L^{2/(alpha+beta-1)}}
  double q_a = 0.0;               // 4/(2beta-1)
  double q_a1 = 0.0;              // 2/(alpha+beta-1)
  double r0 = 0.0;                // regularity index for the forcing space
  double p0 = 0.0;                // 2/(1-r0)
  double norm_lp0 = 0.0;          // ||f||_{L^{p0}}
};

/// Rejects k = 0 modes and modes outside the dealias cut. `s1` selects r0.
ForcingSpec make_forcing(const GridSpec& grid, std::vector<ForcingMode> modes, const PhysParams& params,
                         double s1 = 1.0);

/// Temperature theta and vorticity omega = d1 u2 - d2 u1 at time t.
struct FlowState {
  SpectralField theta;
  SpectralField omega;
  double t = 0.0;

  explicit FlowState(const GridSpec& grid) : theta(grid), omega(grid) {}
  FlowState(SpectralField th, SpectralField om, double time = 0.0)
      : theta(std::move(th)), omega(std::move(om)), t(time) {}
  const GridSpec& grid() const { return theta.grid(); }
};

/// Switches for verification runs; production runs keep everything on.
struct ModelOptions {
  bool advection = true;
  bool buoyancy = true;
};

struct Velocity {
  SpectralField u1;
  SpectralField u2;
};

/// Biot-Savart: u = grad^perp psi with Laplacian psi = omega.
Velocity velocity_from_vorticity(const SpectralField& omega);

/// ||Lambda^s u|| computed from omega via |k|^(2s-2) |omega^(k)|^2.
double velocity_sobolev_norm(const SpectralField& omega, double s);

/// dealias(u . grad q) for a velocity given by its vorticity.
SpectralField advection(const SpectralField& omega, const SpectralField& q);

/// -dealias(u . grad theta) - kappa Lambda^{2beta} theta + f
SpectralField temperature_rhs(const FlowState& state, const ForcingSpec& forcing, const PhysParams& params,
                              const ModelOptions& options = {});
/// -dealias(u . grad omega) - nu Lambda^{2alpha} omega + d1 theta
SpectralField vorticity_rhs(const FlowState& state, const PhysParams& params, const ModelOptions& options = {});

/// Explicit (non-dissipative) part of both tendencies, evaluated with one
/// shared set of transforms: (-u.grad theta + f, -u.grad omega + d1 theta).
void explicit_tendency(const FlowState& state, const ForcingSpec& forcing, const ModelOptions& options,
                       SpectralField& dtheta, SpectralField& domega);

}  // namespace fbq
