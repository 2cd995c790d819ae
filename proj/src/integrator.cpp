#include "fbq/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>

#include "fbq/spectrum_io.hpp"

namespace fbq {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("integrator dt must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw std::invalid_argument("cfl_safety must lie in (0, 1]");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (recheck_interval < 0) throw std::invalid_argument("recheck_interval must be nonnegative");
}

Stepper::Stepper(const GridSpec& grid, const PhysParams& params, Scheme scheme, ModelOptions options)
    : grid_(grid),
      params_(params),
      scheme_(scheme),
      options_(options),
      k1t_(grid), k1w_(grid), k2t_(grid), k2w_(grid), k3t_(grid), k3w_(grid), k4t_(grid), k4w_(grid),
      work_(grid) {
  const auto size = static_cast<std::size_t>(grid.spectral_size());
  theta_rate_.resize(size);
  omega_rate_.resize(size);
  for (int i = 0; i < grid.n; ++i) {
    const int k1 = grid.wavenumber(i);
    for (int j = 0; j < grid.half(); ++j) {
      const double ksq = static_cast<double>(k1 * k1 + j * j);
      const std::size_t p = static_cast<std::size_t>(i) * grid.half() + j;
      theta_rate_[p] = ksq == 0.0 ? 0.0 : params.kappa * std::pow(ksq, params.beta);
      omega_rate_[p] = ksq == 0.0 ? 0.0 : params.nu * std::pow(ksq, params.alpha);
    }
  }
}

void Stepper::prepare(double dt) {
  if (dt == cached_dt_) return;
  const auto size = theta_rate_.size();
  e_theta_.resize(size);
  e_theta_half_.resize(size);
  e_omega_.resize(size);
  e_omega_half_.resize(size);
  for (std::size_t p = 0; p < size; ++p) {
    e_theta_[p] = std::exp(-theta_rate_[p] * dt);
    e_theta_half_[p] = std::exp(-theta_rate_[p] * 0.5 * dt);
    e_omega_[p] = std::exp(-omega_rate_[p] * dt);
    e_omega_half_[p] = std::exp(-omega_rate_[p] * 0.5 * dt);
  }
  cached_dt_ = dt;
}

void Stepper::rk2(FlowState& s, const ForcingSpec& forcing, double h) {
  explicit_tendency(s, forcing, options_, k1t_, k1w_);
  auto vt = s.theta.coeffs(), vw = s.omega.coeffs();
  auto at = work_.theta.coeffs(), aw = work_.omega.coeffs();
  auto t1 = k1t_.coeffs(), w1 = k1w_.coeffs();
  for (std::size_t p = 0; p < vt.size(); ++p) {
    at[p] = e_theta_[p] * (vt[p] + h * t1[p]);
    aw[p] = e_omega_[p] * (vw[p] + h * w1[p]);
  }
  explicit_tendency(work_, forcing, options_, k2t_, k2w_);
  auto t2 = k2t_.coeffs(), w2 = k2w_.coeffs();
  for (std::size_t p = 0; p < vt.size(); ++p) {
    vt[p] = e_theta_[p] * vt[p] + 0.5 * h * (e_theta_[p] * t1[p] + t2[p]);
    vw[p] = e_omega_[p] * vw[p] + 0.5 * h * (e_omega_[p] * w1[p] + w2[p]);
  }
}

void Stepper::rk4(FlowState& s, const ForcingSpec& forcing, double h) {
  auto vt = s.theta.coeffs(), vw = s.omega.coeffs();
  auto at = work_.theta.coeffs(), aw = work_.omega.coeffs();
  const std::size_t size = vt.size();

  explicit_tendency(s, forcing, options_, k1t_, k1w_);
  auto t1 = k1t_.coeffs(), w1 = k1w_.coeffs();
  for (std::size_t p = 0; p < size; ++p) {
    at[p] = e_theta_half_[p] * (vt[p] + 0.5 * h * t1[p]);
    aw[p] = e_omega_half_[p] * (vw[p] + 0.5 * h * w1[p]);
  }
  explicit_tendency(work_, forcing, options_, k2t_, k2w_);
  auto t2 = k2t_.coeffs(), w2 = k2w_.coeffs();
  for (std::size_t p = 0; p < size; ++p) {
    at[p] = e_theta_half_[p] * vt[p] + 0.5 * h * t2[p];
    aw[p] = e_omega_half_[p] * vw[p] + 0.5 * h * w2[p];
  }
  explicit_tendency(work_, forcing, options_, k3t_, k3w_);
  auto t3 = k3t_.coeffs(), w3 = k3w_.coeffs();
  for (std::size_t p = 0; p < size; ++p) {
    at[p] = e_theta_[p] * vt[p] + h * e_theta_half_[p] * t3[p];
    aw[p] = e_omega_[p] * vw[p] + h * e_omega_half_[p] * w3[p];
  }
  explicit_tendency(work_, forcing, options_, k4t_, k4w_);
  auto t4 = k4t_.coeffs(), w4 = k4w_.coeffs();
  const double c = h / 6.0;
  for (std::size_t p = 0; p < size; ++p) {
    vt[p] = e_theta_[p] * vt[p] +
            c * (e_theta_[p] * t1[p] + 2.0 * e_theta_half_[p] * (t2[p] + t3[p]) + t4[p]);
    vw[p] = e_omega_[p] * vw[p] +
            c * (e_omega_[p] * w1[p] + 2.0 * e_omega_half_[p] * (w2[p] + w3[p]) + w4[p]);
  }
}

void Stepper::advance(FlowState& state, const ForcingSpec& forcing, double dt) {
  if (!(state.grid() == grid_)) throw std::invalid_argument("state grid does not match the stepper");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  prepare(dt);
  FlowState before = state;
  if (scheme_ == Scheme::IfRk2)
    rk2(state, forcing, dt);
  else
    rk4(state, forcing, dt);
  if (!state.theta.all_finite() || !state.omega.all_finite()) {
    const double t = before.t;
    state = std::move(before);
    throw BlowUpError("non-finite state after step from t=" + std::to_string(t), state);
  }
  state.t = before.t + dt;
}

FlowState step(const FlowState& state, const ForcingSpec& forcing, const PhysParams& params, double dt,
               Scheme scheme, const ModelOptions& options) {
  Stepper stepper(state.grid(), params, scheme, options);
  FlowState next = state;
  stepper.advance(next, forcing, dt);
  return next;
}

double max_speed(const SpectralField& omega) {
  const Velocity v = velocity_from_vorticity(omega);
  const auto u1 = from_spectral(v.u1);
  const auto u2 = from_spectral(v.u2);
  double m = 0.0;
  for (std::size_t p = 0; p < u1.size(); ++p) m = std::max(m, std::hypot(u1[p], u2[p]));
  return m;
}

double cfl_dt(const FlowState& state, double safety, double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("cfl cap must be positive");
  const double speed = max_speed(state.omega);
  if (speed == 0.0) return cap;
  return std::min(safety * state.grid().dx() / speed, cap);
}

FlowState integrate(FlowState state, const ForcingSpec& forcing, const PhysParams& params,
                    const IntegratorConfig& config, const ModelOptions& options, const StepObserver& observer) {
  config.validate();
  Stepper stepper(state.grid(), params, config.scheme, options);
  const double t_end = config.t_end;
  if (state.t >= t_end) return state;

  auto plan = [&](double t_now, double dt_cfl) {
    const double span = t_end - t_now;
    const double steps = std::ceil(span / dt_cfl - 1e-12);
    return span / std::max(steps, 1.0);
  };
  double dt = plan(state.t, cfl_dt(state, config.cfl_safety, config.dt));
  const double t0 = state.t;
  long done = 0;
  long total = std::lround((t_end - t0) / dt);
  while (done < total) {
    stepper.advance(state, forcing, dt);
    ++done;
    if (done == total) state.t = t_end;
    if (observer) observer(state, dt);
    if (config.recheck_interval > 0 && done % config.recheck_interval == 0 && done < total) {
      const double limit = cfl_dt(state, config.cfl_safety, config.dt);
      if (limit < dt) {
        dt = plan(state.t, limit);
        total = done + std::lround((t_end - state.t) / dt);
      }
    }
  }
  return state;
}

SpinUpResult spin_up(const FlowState& initial, const ForcingSpec& forcing, const PhysParams& params,
                     const IntegratorConfig& config, double t_spin, double plateau_tolerance,
                     const ModelOptions& options) {
  if (!(t_spin >= 0.0)) throw std::invalid_argument("spin-up time must be nonnegative");
  SpinUpResult result{initial, false, 0.0, 0};
  if (t_spin == 0.0) return result;

  IntegratorConfig cfg = config;
  cfg.t_end = initial.t + t_spin;
  const double window_start = initial.t + 0.8 * t_spin;
  const double window_mid = initial.t + 0.9 * t_spin;
  double first = 0.0, first_time = 0.0, second = 0.0, second_time = 0.0;
  result.state = integrate(initial, forcing, params, cfg, options, [&](const FlowState& s, double dt) {
    ++result.steps;
    const double mid = s.t - 0.5 * dt;
    if (mid < window_start) return;
    const double e = std::pow(sobolev_norm(s.theta, params.beta), 2);
    if (mid < window_mid) {
      first += e * dt;
      first_time += dt;
    } else {
      second += e * dt;
      second_time += dt;
    }
  });
  if (first_time > 0.0 && second_time > 0.0) {
    const double a = first / first_time, b = second / second_time;
    const double scale = std::max(std::abs(a), std::abs(b));
    result.drift = scale > 0.0 ? std::abs(b - a) / scale : 0.0;
    result.plateau = scale < 1e-20 || result.drift < plateau_tolerance;
  }
  return result;
}

namespace {

constexpr std::array<char, 8> kCheckpointMagic = {'F', 'B', 'Q', 'C', 'K', 'P', 'T', '1'};

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, const FlowState& state, const PhysParams& params) {
  out.write(kCheckpointMagic.data(), kCheckpointMagic.size());
  put<std::int32_t>(out, state.grid().n);
  put<std::int32_t>(out, 0);
  for (double v : {params.nu, params.kappa, params.alpha, params.beta, state.t}) put<double>(out, v);
  write_spectrum_binary(out, state.theta);
  write_spectrum_binary(out, state.omega);
}

FlowState read_checkpoint(std::istream& in, PhysParams* params) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kCheckpointMagic) throw std::runtime_error("not a checkpoint (bad magic)");
  const int n = get<std::int32_t>(in);
  (void)get<std::int32_t>(in);
  PhysParams p;
  p.nu = get<double>(in);
  p.kappa = get<double>(in);
  p.alpha = get<double>(in);
  p.beta = get<double>(in);
  const double t = get<double>(in);
  SpectralField theta = read_spectrum_binary(in);
  SpectralField omega = read_spectrum_binary(in);
  if (theta.grid().n != n || omega.grid().n != n) throw std::runtime_error("checkpoint grid mismatch");
  if (params) *params = p;
  return FlowState(std::move(theta), std::move(omega), t);
}

}  // namespace fbq
