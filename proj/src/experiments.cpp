#include "fbq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "fbq/diagnostics.hpp"
#include "fbq/parallel.hpp"

namespace fbq {

void ExperimentConfig::validate(int modes) const {
  params.validate();
  integrator.validate();
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("perturbation epsilon must be >= 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon T must be > 0");
  if (!(spin_up >= 0.0) || !std::isfinite(spin_up)) throw std::invalid_argument("spin-up time must be >= 0");
  if (!(initial_amplitude >= 0.0)) throw std::invalid_argument("initial amplitude must be >= 0");
  if (pairs < 1) throw std::invalid_argument("number of pairs must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (!(sync_tolerance > 0.0 && sync_tolerance < 1.0)) throw std::invalid_argument("sync tolerance must lie in (0, 1)");
  for (int m : m_values)
    if (m < 0 || m > modes)
      throw std::invalid_argument("m = " + std::to_string(m) + " outside the eigen index range [0, " +
                                  std::to_string(modes) + "]");
}

namespace {

// Splitmix-style derivation so each stream gets an unrelated seed.
std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SpectralField random_band(const GridSpec& grid, std::mt19937_64& rng) {
  RandomFieldOptions opts;
  opts.band = grid.dealias_cut;
  return random_field(grid, rng, opts);
}

// Shared fixed step sequence for trajectories evolved side by side:
// the step only ever shrinks, and the last step lands on the end time.
class StepPlan {
 public:
  StepPlan(const IntegratorConfig& cfg, double duration, double speed_limit_dt)
      : cfg_(cfg), remaining_(duration) {
    replan(speed_limit_dt);
  }
  bool done() const { return taken_ >= total_; }
  double dt() const { return dt_; }
  long taken() const { return taken_; }
  void advance() {
    ++taken_;
    remaining_ -= dt_;
  }
  bool recheck_due() const {
    return cfg_.recheck_interval > 0 && taken_ % cfg_.recheck_interval == 0 && !done();
  }
  void recheck(double limit) {
    if (limit < dt_) {
      const long left = total_ - taken_;
      const double span = dt_ * static_cast<double>(left);
      const long steps = static_cast<long>(std::ceil(span / limit - 1e-12));
      dt_ = span / static_cast<double>(std::max(steps, 1L));
      total_ = taken_ + std::max(steps, 1L);
    }
  }

 private:
  void replan(double limit) {
    const long steps = static_cast<long>(std::ceil(remaining_ / limit - 1e-12));
    total_ = std::max(steps, 1L);
    dt_ = remaining_ / static_cast<double>(total_);
  }
  IntegratorConfig cfg_;
  double remaining_;
  double dt_ = 0.0;
  long taken_ = 0;
  long total_ = 0;
};

double shared_cfl(const std::vector<const FlowState*>& states, const IntegratorConfig& cfg) {
  double dt = cfg.dt;
  for (const auto* s : states) dt = std::min(dt, cfl_dt(*s, cfg.cfl_safety, cfg.dt));
  return dt;
}

struct Prepared {
  GridSpec grid;
  EigenIndex index;
  ForcingSpec forcing;
  FlowState base;
  bool plateau = false;
};

constexpr double kRoundoffFloor = 1e-26;

Prepared prepare(const ExperimentConfig& config, const AttractorSample* start) {
  GridSpec grid = make_grid(config.n);
  EigenIndex index(grid);
  config.validate(index.size());
  ForcingSpec forcing = make_forcing(grid, config.forcing, config.params, config.s1);
  if (start) {
    if (!(start->state.grid() == grid)) throw std::invalid_argument("start state grid differs from the config grid");
    return {grid, std::move(index), std::move(forcing), start->state, start->plateau};
  }
  FlowState init = random_state(grid, derive(config.seed, 0), config.initial_amplitude);
  SpinUpResult spun = spin_up(init, forcing, config.params, config.integrator, config.spin_up);
  spun.state.t = 0.0;
  return {grid, std::move(index), std::move(forcing), std::move(spun.state), spun.plateau};
}

double velocity_sq(const SpectralField& omega, double s) { return std::pow(velocity_sobolev_norm(omega, s), 2); }
double scalar_sq(const SpectralField& f, double s) { return std::pow(sobolev_norm(f, s), 2); }

}  // namespace

FlowState random_state(const GridSpec& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  FlowState s(grid);
  s.theta = random_band(grid, rng);
  s.omega = random_band(grid, rng);
  const double area = grid.domain_size * grid.domain_size;
  for (auto* f : {&s.theta, &s.omega}) {
    const double norm = sobolev_norm(*f, 0.0);
    if (norm > 0.0) *f *= amplitude * std::sqrt(area) / norm;
  }
  return s;
}

FlowState random_perturbation(const GridSpec& grid, std::uint64_t seed, double epsilon, double s1, double s2) {
  std::mt19937_64 rng(seed);
  FlowState p(grid);
  p.theta = random_band(grid, rng);
  p.omega = random_band(grid, rng);
  const double nt = sobolev_norm(p.theta, s1), nw = velocity_sobolev_norm(p.omega, s2);
  // Split epsilon^2 evenly between the two components.
  const double target = epsilon / std::sqrt(2.0);
  p.theta *= nt > 0.0 ? target / nt : 0.0;
  p.omega *= nw > 0.0 ? target / nw : 0.0;
  return p;
}

double difference_norm(const FlowState& a, const FlowState& b, double s1, double s2, const EigenIndex* index, int m) {
  SpectralField dt = a.theta - b.theta;
  SpectralField dw = a.omega - b.omega;
  if (index && m > 0) {
    dt = project_high(dt, *index, m);
    dw = project_high(dw, *index, m);
  }
  return velocity_sq(dw, s2) + scalar_sq(dt, s1);
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

AttractorSample spin_up_experiment(const ExperimentConfig& config) {
  Prepared prep = prepare(config, nullptr);
  return {std::move(prep.base), prep.plateau};
}

SqueezingResult run_squeezing(const ExperimentConfig& config) { return run_squeezing(config, spin_up_experiment(config)); }

SqueezingResult run_squeezing(const ExperimentConfig& config, const AttractorSample& start) {
  Prepared prep = prepare(config, &start);
  SqueezingResult result;
  result.m_values = config.m_values;
  result.spin_up_plateau = prep.plateau;
  const auto nm = config.m_values.size();

  // Pair p starts from the spun-up state advanced by p horizons, so the
  // bases are distinct points along one attractor trajectory.
  std::vector<FlowState> bases;
  bases.push_back(prep.base);
  for (int p = 1; p < config.pairs; ++p) {
    IntegratorConfig cfg = config.integrator;
    cfg.t_end = bases.back().t + config.horizon;
    FlowState next = integrate(bases.back(), prep.forcing, config.params, cfg);
    next.t = 0.0;
    bases.push_back(std::move(next));
  }

  std::vector<SqueezingPair> pairs(static_cast<std::size_t>(config.pairs));
  std::vector<std::vector<SqueezingSample>> series(pairs.size());
  parallel_for(config.pairs, config.threads, [&](int p) {
    auto& rec = pairs[static_cast<std::size_t>(p)];
    rec.pair = p;
    FlowState a = bases[static_cast<std::size_t>(p)];
    FlowState b = a;
    FlowState pert = random_perturbation(prep.grid, derive(config.seed, 1000 + static_cast<std::uint64_t>(p)),
                                         config.epsilon, config.s1, config.s2);
    b.theta += pert.theta;
    b.omega += pert.omega;

    auto sample = [&](std::vector<double>& z) {
      z.resize(nm);
      for (std::size_t i = 0; i < nm; ++i)
        z[i] = difference_norm(b, a, config.s1, config.s2, &prep.index, config.m_values[i]);
      return difference_norm(b, a, config.s1, config.s2);
    };
    rec.y0 = sample(rec.z0);
    auto& out = series[static_cast<std::size_t>(p)];
    out.push_back({p, 0.0, rec.y0, rec.z0});

    Stepper sa(prep.grid, config.params, config.integrator.scheme), sb(prep.grid, config.params, config.integrator.scheme);
    StepPlan plan(config.integrator, config.horizon, shared_cfl({&a, &b}, config.integrator));
    try {
      while (!plan.done()) {
        sa.advance(a, prep.forcing, plan.dt());
        sb.advance(b, prep.forcing, plan.dt());
        plan.advance();
        if (plan.done()) a.t = b.t = config.horizon;
        if (plan.recheck_due()) {
          std::vector<double> z;
          const double y = sample(z);
          out.push_back({p, a.t, y, std::move(z)});
          plan.recheck(shared_cfl({&a, &b}, config.integrator));
        }
      }
      rec.yT = sample(rec.zT);
      out.push_back({p, a.t, rec.yT, rec.zT});
    } catch (const BlowUpError& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  });
  result.pairs = std::move(pairs);
  for (auto& s : series) result.series.insert(result.series.end(), s.begin(), s.end());

  for (const auto& rec : result.pairs) {
    if (!rec.ok || rec.y0 <= 0.0) continue;
    const double l = rec.yT / rec.y0;
    result.l_hat = result.l_hat ? std::max(*result.l_hat, l) : l;
  }
  result.delta_hat.assign(nm, std::nullopt);
  for (std::size_t i = 0; i < nm; ++i)
    for (const auto& rec : result.pairs) {
      if (!rec.ok || rec.y0 <= 0.0) continue;
      const double d = rec.zT[i] / rec.y0;
      result.delta_hat[i] = result.delta_hat[i] ? std::max(*result.delta_hat[i], d) : d;
    }

  std::vector<double> ms, ds;
  for (std::size_t i = 0; i < nm; ++i)
    if (result.delta_hat[i]) {
      ms.push_back(config.m_values[i]);
      ds.push_back(*result.delta_hat[i]);
    }
  result.spearman_delta = spearman(ms, ds);

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < nm; ++i)
    if (result.delta_hat[i] && *result.delta_hat[i] < 1.0 && config.m_values[i] > 0 &&
        (!best || config.m_values[i] < config.m_values[*best]))
      best = i;
  if (best && result.l_hat) {
    result.codimension = config.m_values[*best];
    result.dimension_bound = dimension_bound(*result.codimension, std::max(1.0, *result.l_hat), *result.delta_hat[*best]);
  }
  return result;
}

double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double floor, bool* infinite) {
  if (t.size() != d.size() || t.empty()) throw std::invalid_argument("fit_decay_rate: bad series");
  if (infinite) *infinite = false;
  // Usable window: up to the first sample at or below the floor.
  std::size_t end = 0;
  while (end < d.size() && d[end] > floor && d[end] > 0.0) ++end;
  if (end < 2) {
    if (infinite) *infinite = true;
    return std::numeric_limits<double>::infinity();
  }
  const double t_mid = t.front() + 0.5 * (t[end - 1] - t.front());
  double st = 0, sl = 0, stt = 0, stl = 0;
  long count = 0;
  for (std::size_t i = 0; i < end; ++i) {
    if (t[i] < t_mid) continue;
    const double l = std::log(d[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
    ++count;
  }
  const double denom = static_cast<double>(count) * stt - st * st;
  if (count < 2 || denom <= 0.0) return 0.0;
  return -(static_cast<double>(count) * stl - st * sl) / denom;
}

DeterminingResult run_determining_modes(const ExperimentConfig& config) {
  return run_determining_modes(config, spin_up_experiment(config));
}

DeterminingResult run_determining_modes(const ExperimentConfig& config, const AttractorSample& start) {
  Prepared prep = prepare(config, &start);
  DeterminingResult result;
  result.spin_up_plateau = prep.plateau;
  const std::size_t nm = config.m_values.size();

  FlowState master = prep.base;
  std::vector<FlowState> slaves;
  slaves.reserve(nm);
  for (std::size_t i = 0; i < nm; ++i) {
    FlowState s = master;
    FlowState pert = random_perturbation(prep.grid, derive(config.seed, 2000 + i), config.epsilon, config.s1, config.s2);
    s.theta += pert.theta;
    s.omega += pert.omega;
    overwrite_low(s.theta, master.theta, prep.index, config.m_values[i]);
    overwrite_low(s.omega, master.omega, prep.index, config.m_values[i]);
    slaves.push_back(std::move(s));
  }
  result.series.resize(nm);
  std::vector<double> d0(nm);
  auto measure = [&](std::size_t i) {
    // P_m parts coincide, so the difference is its own Q_m part.
    return velocity_sq(slaves[i].omega - master.omega, 0.0) + scalar_sq(slaves[i].theta - master.theta, 0.0);
  };
  for (std::size_t i = 0; i < nm; ++i) {
    auto& s = result.series[i];
    s.m = config.m_values[i];
    d0[i] = measure(i);
    s.t.push_back(0.0);
    s.d.push_back(d0[i]);
  }

  Stepper master_stepper(prep.grid, config.params, config.integrator.scheme);
  std::vector<Stepper> steppers;
  for (std::size_t i = 0; i < nm; ++i) steppers.emplace_back(prep.grid, config.params, config.integrator.scheme);
  std::vector<const FlowState*> all{&master};
  for (auto& s : slaves) all.push_back(&s);
  StepPlan plan(config.integrator, config.horizon, shared_cfl(all, config.integrator));

  // Differences below ~1e-13 of the master's size are round-off.
  double energy = 0.0;
  auto track_energy = [&] { energy = std::max(energy, velocity_sq(master.omega, 0.0) + scalar_sq(master.theta, 0.0)); };
  track_energy();

  std::vector<char> active(nm, 1);
  while (!plan.done()) {
    const double dt = plan.dt();
    master_stepper.advance(master, prep.forcing, dt);
    parallel_for(static_cast<int>(nm), config.threads, [&](int k) {
      const auto i = static_cast<std::size_t>(k);
      if (!active[i]) return;
      auto& rec = result.series[i];
      try {
        steppers[i].advance(slaves[i], prep.forcing, dt);
      } catch (const BlowUpError& e) {
        rec.ok = false;
        rec.error = e.what();
        active[i] = 0;
        return;
      }
      overwrite_low(slaves[i].theta, master.theta, prep.index, rec.m);
      overwrite_low(slaves[i].omega, master.omega, prep.index, rec.m);
    });
    plan.advance();
    if (plan.done()) master.t = config.horizon;
    track_energy();
    for (std::size_t i = 0; i < nm; ++i) {
      if (!active[i]) continue;
      slaves[i].t = master.t;
      auto& rec = result.series[i];
      const double d = measure(i);
      rec.t.push_back(master.t);
      rec.d.push_back(d);
      if (d > 1e6 * d0[i]) rec.non_determining = true;
    }
    if (plan.recheck_due()) {
      std::vector<const FlowState*> live{&master};
      for (std::size_t i = 0; i < nm; ++i)
        if (active[i]) live.push_back(&slaves[i]);
      plan.recheck(shared_cfl(live, config.integrator));
    }
  }

  std::vector<double> ms, rates;
  for (auto& rec : result.series) {
    if (!rec.ok) continue;
    const double first = rec.d.front();
    if (first == 0.0) {
      rec.rate = std::numeric_limits<double>::infinity();
      rec.rate_infinite = true;
      rec.synchronized = true;
    } else {
      rec.rate = fit_decay_rate(rec.t, rec.d, kRoundoffFloor * energy, &rec.rate_infinite);
      rec.synchronized = !rec.non_determining && rec.d.back() < config.sync_tolerance * first;
    }
    ms.push_back(rec.m);
    rates.push_back(rec.rate);
  }
  result.spearman_rate = spearman(ms, rates);

  // m*: smallest tested m such that every tested m' >= m synchronized.
  std::vector<std::size_t> order(nm);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return config.m_values[a] < config.m_values[b]; });
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!result.series[*it].synchronized) break;
    result.m_star = config.m_values[*it];
  }
  return result;
}

GronwallRecord run_trajectory_pair(const ExperimentConfig& config) {
  return run_trajectory_pair(config, spin_up_experiment(config));
}

GronwallRecord run_trajectory_pair(const ExperimentConfig& config, const AttractorSample& start) {
  Prepared prep = prepare(config, &start);
  GronwallRecord rec;
  const auto& P = config.params;
  const double sigma = std::min(P.nu, P.kappa);
  const double s1 = config.s1, s2 = config.s2;

  FlowState a = prep.base;
  FlowState b = a;
  FlowState pert = random_perturbation(prep.grid, derive(config.seed, 3000), config.epsilon, s1, s2);
  b.theta += pert.theta;
  b.omega += pert.omega;

  auto integrands = [&](double& diss, double& expo) {
    const SpectralField dw = a.omega - b.omega;
    const SpectralField dt = a.theta - b.theta;
    diss = sigma * (velocity_sq(dw, s2 + P.alpha) + scalar_sq(dt, s1 + P.beta));
    expo = velocity_sq(a.omega, s2 + P.alpha) + velocity_sq(b.omega, s2 + P.alpha) + scalar_sq(b.theta, s1 + P.beta);
  };
  double diss_prev, expo_prev;
  integrands(diss_prev, expo_prev);
  rec.t.push_back(0.0);
  rec.y.push_back(difference_norm(a, b, s1, s2));
  rec.dissipation.push_back(0.0);
  rec.exponent.push_back(0.0);
  const double y0 = rec.y.front();
  rec.degenerate = y0 == 0.0;

  Stepper sa(prep.grid, P, config.integrator.scheme), sb(prep.grid, P, config.integrator.scheme);
  StepPlan plan(config.integrator, config.horizon, shared_cfl({&a, &b}, config.integrator));
  while (!plan.done()) {
    const double dt = plan.dt();
    sa.advance(a, prep.forcing, dt);
    sb.advance(b, prep.forcing, dt);
    plan.advance();
    if (plan.done()) a.t = b.t = config.horizon;
    double diss, expo;
    integrands(diss, expo);
    rec.t.push_back(a.t);
    rec.y.push_back(difference_norm(a, b, s1, s2));
    rec.dissipation.push_back(rec.dissipation.back() + 0.5 * dt * (diss + diss_prev));
    rec.exponent.push_back(rec.exponent.back() + 0.5 * dt * (expo + expo_prev));
    diss_prev = diss;
    expo_prev = expo;
    if (plan.recheck_due()) plan.recheck(shared_cfl({&a, &b}, config.integrator));
  }

  if (rec.degenerate) {
    rec.log_c_fit = 0.0;
    rec.holds = std::all_of(rec.y.begin(), rec.y.end(), [](double y) { return y == 0.0; });
    return rec;
  }
  // Fitted in log space; the exponent integral can exceed the double range.
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rec.t.size(); ++i)
    best = std::max(best, std::log(rec.y[i] + rec.dissipation[i]) - std::log(y0) - rec.exponent[i]);
  rec.log_c_fit = best;
  rec.holds = true;
  for (std::size_t i = 0; i < rec.t.size(); ++i) {
    const double lhs = std::log(rec.y[i] + rec.dissipation[i]);
    const double rhs = std::log(y0) + best + rec.exponent[i];
    if (lhs > rhs + 1e-12 * std::abs(rhs)) rec.holds = false;
  }
  return rec;
}

}  // namespace fbq
