// Acceptance run: one PASS/FAIL line per criterion.
// Usage: fbq_acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fbq/config.hpp"
#include "fbq/diagnostics.hpp"
#include "fbq/eigen_index.hpp"
#include "fbq/experiments.hpp"
#include "fbq/inequalities.hpp"
#include "fbq/integrator.hpp"
#include "fbq/run.hpp"
#include "oracle.hpp"

using namespace fbq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> fn;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int worker_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

// forcing on |k| <= 2, the regime used by the attractor experiments
const std::vector<ForcingMode> kForcing = {{1, 0, 1.0, Phase::Sin}, {0, 2, 1.0, Phase::Cos}};

ExperimentConfig attractor_regime() {
  ExperimentConfig c;
  c.n = 64;
  c.params = PhysParams{0.1, 0.1, 0.75, 0.75};
  c.forcing = kForcing;
  c.integrator.dt = 0.01;
  c.spin_up = 100.0;
  c.epsilon = 1e-3;
  c.m_values = {4, 16, 64, 128, 256, 512, 1024, 1600};
  c.seed = 1;
  c.threads = worker_threads();
  return c;
}

Outcome gauss() {
  const double g = gauss_constant();
  const double agm = static_cast<double>(oracle::agm_gauss());
  RunConfig c;
  c.command = "gauss";
  c.digits = 7;
  c.output_dir = (fs::temp_directory_path() / "fbq_accept_gauss").string();
  c.finalize();
  std::ostringstream out, err;
  const int code = run(c, out, err);
  const bool printed = out.str().find("0.8346268") != std::string::npos;
  return {std::abs(g - 0.8346268) < 1e-6 && std::abs(g - agm) < 1e-6 && code == 0 && printed,
          fmt("G = %.16f, agm oracle %.16f, cli printed %s", g, agm, printed ? "0.8346268" : "something else")};
}

Outcome sobolev() {
  double worst = 0;
  for (double s : {0.25, 0.5, 0.75}) {
    const double want = static_cast<double>(oracle::sobolev(s));
    worst = std::max(worst, std::abs(sobolev_constant(s) - want) / want);
  }
  return {worst <= 1e-9, fmt("max relative error vs gamma oracle %.2e", worst)};
}

Outcome linear_decay() {
  const auto g = make_grid(32);
  const PhysParams p{0.1, 0.1, 0.75, 0.75};
  const auto f = make_forcing(g, {}, p);
  FlowState s = random_state(g, 11, 1.0);
  const FlowState s0 = s;
  Stepper stepper(g, p, Scheme::IfRk4, ModelOptions{false, false});
  const double dt = 0.01;
  for (int i = 0; i < 100; ++i) stepper.advance(s, f, dt);
  const double t = 100 * dt;
  double worst = 0;
  auto compare = [&](const SpectralField& got, const SpectralField& init, double coef, double expo) {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.half(); ++j) {
        const double k = std::hypot(g.wavenumber(i), j);
        const Complex want = init.slot(i, j) * std::exp(-coef * std::pow(k, 2 * expo) * t);
        if (std::abs(want) > 0) worst = std::max(worst, std::abs(got.slot(i, j) - want) / std::abs(want));
        else if (std::abs(got.slot(i, j)) > 0) worst = INFINITY;
      }
  };
  compare(s.theta, s0.theta, p.kappa, p.beta);
  compare(s.omega, s0.omega, p.nu, p.alpha);
  return {worst <= 1e-10, fmt("max relative coefficient error %.2e after 100 steps", worst)};
}

// RMS over steps of 1/2 (|theta_{n+1}|^2 - |theta_n|^2)/dt + kappa |Lambda^beta theta|^2 - <f, theta>,
// the last two averaged over the step ends.
double budget_defect(double dt, double t_end, double* max_defect) {
  const auto g = make_grid(64);
  const PhysParams p{0.1, 0.1, 0.75, 0.75};
  const auto f = make_forcing(g, kForcing, p);
  FlowState s = random_state(g, 5, 1.0);
  Stepper stepper(g, p, Scheme::IfRk4);
  auto rate = [&](const FlowState& x) {
    const double d = sobolev_norm(x.theta, p.beta);
    return p.kappa * d * d - inner(f.field, x.theta);
  };
  double e0 = std::pow(sobolev_norm(s.theta, 0), 2), r0 = rate(s);
  const long steps = std::lround(t_end / dt);
  double sum = 0, worst = 0;
  for (long n = 0; n < steps; ++n) {
    stepper.advance(s, f, dt);
    const double e1 = std::pow(sobolev_norm(s.theta, 0), 2), r1 = rate(s);
    const double defect = 0.5 * (e1 - e0) / dt + 0.5 * (r0 + r1);
    sum += defect * defect;
    worst = std::max(worst, std::abs(defect));
    e0 = e1;
    r0 = r1;
  }
  if (max_defect) *max_defect = worst;
  return std::sqrt(sum / steps);
}

Outcome energy_budget() {
  const double dts[] = {0.002, 0.001, 0.0005};
  double rms[3], mx[3];
  for (int i = 0; i < 3; ++i) rms[i] = budget_defect(dts[i], 10.0, &mx[i]);
  const double o1 = std::log2(rms[0] / rms[1]), o2 = std::log2(rms[1] / rms[2]);
  return {std::min(o1, o2) >= 1.8,
          fmt("rms defect %.3e %.3e %.3e (max %.2e %.2e %.2e), observed orders %.3f %.3f", rms[0], rms[1], rms[2],
              mx[0], mx[1], mx[2], o1, o2)};
}

Outcome inequalities() {
  const auto g = make_grid(64);
  const auto poincare = check_poincare(random_samples(g, 1000, 21), 0.0, 1.0);
  const auto poincare2 = check_poincare(random_samples(g, 1000, 22), 0.25, 0.9);
  const auto interp = check_interpolation(random_samples(g, 1000, 23), 0.0, 0.5, 1.0);
  const auto interp2 = check_interpolation(random_samples(g, 1000, 24), 0.2, 0.35, 1.3);
  // equality: one mode at |k| = 1 for Poincare, any single mode for interpolation
  const auto eq_p = check_poincare({make_mode(g, 0, 1, 1.0, Phase::Cos)}, 0.0, 1.0);
  const auto eq_i = check_interpolation({make_mode(g, 4, -3, 2.0, Phase::Sin)}, 0.0, 0.5, 1.0);
  double worst = -INFINITY;
  bool all = true;
  for (const auto* r : {&poincare, &poincare2, &interp, &interp2}) {
    worst = std::max(worst, r->worst_relative_margin);
    all = all && r->passed && r->violations == 0 && r->worst_relative_margin <= 1e-12;
  }
  const double eq = std::max(std::abs(eq_p.worst_relative_margin), std::abs(eq_i.worst_relative_margin));
  return {all && eq <= 1e-12,
          fmt("4 x 1000 fields, worst relative margin %.2e; single-mode equality defect %.2e", worst, eq)};
}

Outcome projections() {
  const auto g = make_grid(64);
  const EigenIndex idx(g);
  const PhysParams p{0.1, 0.1, 0.75, 0.75};
  const auto f = make_forcing(g, kForcing, p);
  const FlowState a = random_state(g, 31, 1.0);
  bool sum_ok = true, idem_ok = true, slave_ok = true, high_ok = true;
  int checked = 0;
  for (int m : {0, 1, 2, 5, 17, 100, 640, 1847, idx.size()}) {
    for (const auto* x : {&a.theta, &a.omega}) {
      const auto P = project_low(*x, idx, m), Q = project_high(*x, idx, m);
      sum_ok = sum_ok && (P + Q == *x);
      idem_ok = idem_ok && (project_low(P, idx, m) == P) && (project_high(Q, idx, m) == Q);
    }
    FlowState master = a, slave = random_state(g, 32, 1.0);
    Stepper sm(g, p, Scheme::IfRk4), ss(g, p, Scheme::IfRk4);
    for (int step = 0; step < 3; ++step) {
      sm.advance(master, f, 0.005);
      ss.advance(slave, f, 0.005);
      const auto qt = project_high(slave.theta, idx, m), qw = project_high(slave.omega, idx, m);
      overwrite_low(slave.theta, master.theta, idx, m);
      overwrite_low(slave.omega, master.omega, idx, m);
      slave_ok = slave_ok && project_low(slave.theta, idx, m) == project_low(master.theta, idx, m) &&
                 project_low(slave.omega, idx, m) == project_low(master.omega, idx, m);
      high_ok = high_ok && project_high(slave.theta, idx, m) == qt && project_high(slave.omega, idx, m) == qw;
      ++checked;
    }
  }
  return {sum_ok && idem_ok && slave_ok && high_ok,
          fmt("bitwise: P+Q=I %s, idempotent %s, slaved low modes %s, high modes kept %s (%d slaving steps)",
              sum_ok ? "yes" : "no", idem_ok ? "yes" : "no", slave_ok ? "yes" : "no", high_ok ? "yes" : "no",
              checked)};
}

Outcome determining() {
  auto c = attractor_regime();
  c.horizon = 20.0;
  const auto r = run_determining_modes(c);
  std::string rates;
  bool all_ok = true;
  for (const auto& s : r.series) {
    all_ok = all_ok && s.ok;
    rates += fmt(" %d:%.3g%s", s.m, s.rate, s.synchronized ? "*" : "");
  }
  bool above = r.m_star.has_value();
  if (above)
    for (const auto& s : r.series)
      if (s.m >= *r.m_star) above = above && s.synchronized;
  return {all_ok && above && r.spearman_rate >= 0.8,
          fmt("m* = %s, spearman(rate, m) = %.3f, rates (* = synchronized)%s",
              r.m_star ? std::to_string(*r.m_star).c_str() : "none", r.spearman_rate, rates.c_str())};
}

Outcome squeezing() {
  auto c = attractor_regime();
  c.horizon = 1.0;
  c.pairs = 5;
  const auto r = run_squeezing(c);
  bool all_ok = r.pairs.size() == 5;
  for (const auto& p : r.pairs) all_ok = all_ok && p.ok;
  std::string deltas;
  for (std::size_t i = 0; i < r.m_values.size(); ++i)
    deltas += r.delta_hat[i] ? fmt(" %d:%.3g", r.m_values[i], *r.delta_hat[i]) : fmt(" %d:undefined", r.m_values[i]);
  const bool last_below = !r.delta_hat.empty() && r.delta_hat.back() && *r.delta_hat.back() < 1.0;
  const bool l_finite = r.l_hat && std::isfinite(*r.l_hat);
  const bool bound_ok = r.dimension_bound && std::isfinite(*r.dimension_bound) && *r.dimension_bound > 0;
  return {all_ok && last_below && r.spearman_delta <= -0.8 && l_finite && bound_ok,
          fmt("l_hat = %.4g, spearman(delta, m) = %.3f, codimension = %s, dimension bound = %.4g, delta_hat%s",
              r.l_hat ? *r.l_hat : NAN, r.spearman_delta,
              r.codimension ? std::to_string(*r.codimension).c_str() : "none",
              r.dimension_bound ? *r.dimension_bound : NAN, deltas.c_str())};
}

Outcome bound_oracle() {
  const auto sweep = oracle::bound_sweep(977, 20);
  std::string first = sweep.mismatches.empty() ? "" : ", first: " + sweep.mismatches.front();
  return {sweep.mismatches.empty() && sweep.overflowed > 0,
          fmt("20 parameter sets, %d comparisons, %zu mismatches, %d overflow cases flagged%s", sweep.comparisons,
              sweep.mismatches.size(), sweep.overflowed, first.c_str())};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const std::string base =
      "[grid]\nn = 16\n[physics]\nnu = 0.1\nkappa = 0.1\nalpha = 0.75\nbeta = 0.75\n"
      "[forcing]\nmode = 1 0 1 sin\nmode = 0 2 1 cos\n[integrator]\nt_end = 2\n"
      "[experiment]\nspin_up = 2\nhorizon = 0.5\npairs = 2\nm_values = 4 20 60\n"
      "[inequalities]\nsamples = 50\npair_samples = 20\ngronwall_instances = 10\n"
      "[run]\nseed = 5\nthreads = 2\n";
  int same = 0;
  std::string differing;
  for (const auto& cmd : known_commands()) {
    std::string manifests[2];
    for (int i = 0; i < 2; ++i) {
      auto c = parse_config(base);
      c.command = cmd;
      c.output_dir = (fs::temp_directory_path() / ("fbq_accept_" + cmd + std::to_string(i))).string();
      fs::remove_all(c.output_dir);
      c.finalize();
      std::ostringstream out, err;
      run(c, out, err);
      manifests[i] = slurp(fs::path(c.output_dir) / "MANIFEST");
    }
    if (!manifests[0].empty() && manifests[0] == manifests[1]) ++same;
    else differing += " " + cmd;
  }
  const int total = static_cast<int>(known_commands().size());
  return {same == total, fmt("%d of %d subcommands reproduce their MANIFEST%s%s", same, total,
                             differing.empty() ? "" : "; differing:", differing.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "gauss constant", 1.0, gauss},
      {2, "sharp sobolev constant", 60.0, sobolev},
      {3, "exact linear decay", 5.0, linear_decay},
      {4, "energy budget order", 120.0, energy_budget},
      {5, "poincare and interpolation", 30.0, inequalities},
      {6, "projection algebra", 60.0, projections},
      {7, "determining modes", 600.0, determining},
      {8, "squeezing", 600.0, squeezing},
      {9, "bound calculators vs oracle", 60.0, bound_oracle},
      {10, "rerun determinism", 120.0, determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %-28s %8.2f s%s  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                in_time ? "" : fmt(" (budget %.0f s)", c.budget_s).c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
