#include "fbq/boussinesq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fbq {

void PhysParams::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (!(nu > 0.0)) fail("viscosity nu must be positive");
  if (!(kappa > 0.0)) fail("diffusivity kappa must be positive");
  if (!std::isfinite(alpha) || !std::isfinite(beta)) fail("exponents alpha, beta must be finite");
  if (allow_out_of_range_exponents) return;
  auto in_range = [](double e) { return e > 0.5 && e < 1.0; };
  if (!in_range(alpha) || !in_range(beta)) {
    std::ostringstream os;
    os << "alpha=" << alpha << ", beta=" << beta
       << " violates the subcritical exponent condition alpha, beta in (1/2, 1)"
          " (pass --allow-out-of-range-exponents to override)";
    fail(os.str());
  }
}

ForcingSpec make_forcing(const GridSpec& grid, std::vector<ForcingMode> modes, const PhysParams& params,
                         double s1) {
  ForcingSpec spec;
  spec.field = SpectralField(grid);
  for (const auto& m : modes) {
    if (m.k1 == 0 && m.k2 == 0) throw std::invalid_argument("forcing must be mean-zero: k = 0 mode rejected");
    if (std::max(std::abs(m.k1), std::abs(m.k2)) > grid.dealias_cut)
      throw std::invalid_argument("forcing mode (" + std::to_string(m.k1) + "," + std::to_string(m.k2) +
                                  ") lies outside the dealias cut");
    spec.field += make_mode(grid, m.k1, m.k2, m.amplitude, m.phase);
  }
  spec.modes = std::move(modes);

  const auto samples = from_spectral(spec.field);
  spec.norm_l2 = sobolev_norm(spec.field, 0.0);
  spec.norm_lambda_beta = sobolev_norm(spec.field, params.beta);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  spec.q_a = params.beta > 0.5 ? 4.0 / (2.0 * params.beta - 1.0) : nan;
  spec.q_a1 = params.alpha + params.beta > 1.0 ? 2.0 / (params.alpha + params.beta - 1.0) : nan;
  spec.norm_lq_a = std::isnan(spec.q_a) ? nan : lp_norm_samples(grid, samples, spec.q_a);
  spec.norm_lq_a1 = std::isnan(spec.q_a1) ? nan : lp_norm_samples(grid, samples, spec.q_a1);

  const double lower = 2.0 * std::max(1.0 - params.alpha, 1.0 - params.beta);
  if (lower < 1.0) {
    if (s1 >= 1.0) {
      spec.r0 = 0.5 * (lower + 1.0);
    } else if (s1 > lower) {
      spec.r0 = s1;
    } else {
      throw std::invalid_argument("s1 must exceed 2 max{1-alpha, 1-beta}");
    }
    spec.p0 = 2.0 / (1.0 - spec.r0);
    spec.norm_lp0 = lp_norm_samples(grid, samples, spec.p0);
  } else {
    spec.r0 = spec.p0 = spec.norm_lp0 = nan;
  }
  return spec;
}

Velocity velocity_from_vorticity(const SpectralField& omega) {
  const GridSpec& g = omega.grid();
  Velocity v{SpectralField(g), SpectralField(g)};
  for (int i = 0; i < g.n; ++i) {
    if (i == g.n / 2) continue;
    const int k1 = g.wavenumber(i);
    for (int j = 0; j < g.half() - 1; ++j) {
      const int ksq = k1 * k1 + j * j;
      if (ksq == 0) continue;
      const Complex w = omega.slot(i, j) / static_cast<double>(ksq);
      v.u1.slot(i, j) = Complex(0.0, j) * w;
      v.u2.slot(i, j) = Complex(0.0, -k1) * w;
    }
  }
  return v;
}

double velocity_sobolev_norm(const SpectralField& omega, double s) {
  const GridSpec& g = omega.grid();
  double sum = 0.0;
  for (int i = 0; i < g.n; ++i) {
    if (i == g.n / 2) continue;
    const int k1 = g.wavenumber(i);
    for (int j = 0; j < g.half() - 1; ++j) {
      const int ksq = k1 * k1 + j * j;
      if (ksq == 0) continue;
      const double w = j == 0 ? 1.0 : 2.0;
      sum += w * std::pow(static_cast<double>(ksq), s - 1.0) * std::norm(omega.slot(i, j));
    }
  }
  return std::sqrt(4.0 * std::numbers::pi * std::numbers::pi * sum);
}

namespace {

struct Scratch {
  int n = 0;
  SpectralField spec;
  std::vector<double> u1, u2, ax, ay, prod;

  void ensure(const GridSpec& g) {
    if (n == g.n) return;
    n = g.n;
    spec = SpectralField(g);
    const auto size = static_cast<std::size_t>(g.physical_size());
    for (auto* v : {&u1, &u2, &ax, &ay, &prod}) v->assign(size, 0.0);
  }
};

Scratch& scratch(const GridSpec& g) {
  thread_local Scratch s;
  s.ensure(g);
  return s;
}

// Velocity components of omega into s.u1 / s.u2 (physical space).
void physical_velocity(const SpectralField& omega, Scratch& s) {
  const GridSpec& g = omega.grid();
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < g.n; ++i) {
      const int k1 = g.wavenumber(i);
      for (int j = 0; j < g.half(); ++j) {
        const int ksq = k1 * k1 + j * j;
        Complex value = 0.0;
        if (ksq != 0 && i != g.n / 2 && j != g.n / 2) {
          const Complex w = omega.slot(i, j) / static_cast<double>(ksq);
          value = c == 0 ? Complex(0.0, j) * w : Complex(0.0, -k1) * w;
        }
        s.spec.slot(i, j) = value;
      }
    }
    from_spectral_into(s.spec, c == 0 ? s.u1 : s.u2);
  }
}

// u . grad q into `out` (spectral, dealiased); velocity already in s.u1/s.u2.
void advect(const SpectralField& q, Scratch& s, SpectralField& out) {
  const GridSpec& g = q.grid();
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < g.n; ++i) {
      const int k1 = g.wavenumber(i);
      for (int j = 0; j < g.half(); ++j) {
        const bool nyquist = i == g.n / 2 || j == g.n / 2;
        const double k = c == 0 ? k1 : j;
        s.spec.slot(i, j) = nyquist ? Complex(0.0) : Complex(0.0, k) * q.slot(i, j);
      }
    }
    from_spectral_into(s.spec, c == 0 ? s.ax : s.ay);
  }
  for (std::size_t p = 0; p < s.prod.size(); ++p) s.prod[p] = s.u1[p] * s.ax[p] + s.u2[p] * s.ay[p];
  to_spectral_into(s.prod, out);
  dealias_in_place(out);
}

void add_dissipation(const SpectralField& q, double coeff, double exponent, SpectralField& out) {
  const GridSpec& g = q.grid();
  for (int i = 0; i < g.n; ++i) {
    const int k1 = g.wavenumber(i);
    for (int j = 0; j < g.half(); ++j) {
      const int ksq = k1 * k1 + j * j;
      if (ksq == 0) continue;
      out.slot(i, j) -= coeff * std::pow(static_cast<double>(ksq), exponent) * q.slot(i, j);
    }
  }
}

}  // namespace

SpectralField advection(const SpectralField& omega, const SpectralField& q) {
  auto& s = scratch(q.grid());
  physical_velocity(omega, s);
  SpectralField out(q.grid());
  advect(q, s, out);
  return out;
}

void explicit_tendency(const FlowState& state, const ForcingSpec& forcing, const ModelOptions& options,
                       SpectralField& dtheta, SpectralField& domega) {
  const GridSpec& g = state.grid();
  if (!(dtheta.grid() == g)) dtheta = SpectralField(g);
  if (!(domega.grid() == g)) domega = SpectralField(g);
  if (options.advection) {
    auto& s = scratch(g);
    physical_velocity(state.omega, s);
    advect(state.theta, s, dtheta);
    advect(state.omega, s, domega);
    dtheta *= -1.0;
    domega *= -1.0;
  } else {
    dtheta = SpectralField(g);
    domega = SpectralField(g);
  }
  dtheta += forcing.field;
  if (options.buoyancy) {
    for (int i = 0; i < g.n; ++i) {
      if (i == g.n / 2) continue;
      const double k1 = g.wavenumber(i);
      for (int j = 0; j < g.half() - 1; ++j) domega.slot(i, j) += Complex(0.0, k1) * state.theta.slot(i, j);
    }
  }
}

SpectralField temperature_rhs(const FlowState& state, const ForcingSpec& forcing, const PhysParams& params,
                              const ModelOptions& options) {
  SpectralField out(state.grid());
  if (options.advection) {
    out = advection(state.omega, state.theta);
    out *= -1.0;
  }
  add_dissipation(state.theta, params.kappa, params.beta, out);
  out += forcing.field;
  return out;
}

SpectralField vorticity_rhs(const FlowState& state, const PhysParams& params, const ModelOptions& options) {
  SpectralField out(state.grid());
  if (options.advection) {
    out = advection(state.omega, state.omega);
    out *= -1.0;
  }
  add_dissipation(state.omega, params.nu, params.alpha, out);
  if (options.buoyancy) out += d1(state.theta);
  return out;
}

}  // namespace fbq
