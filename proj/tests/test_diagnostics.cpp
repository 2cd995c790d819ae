#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fbq/diagnostics.hpp"
#include "fbq/integrator.hpp"
#include "oracle.hpp"

using namespace fbq;

namespace {

using oracle::mp;
using oracle::kDoubleMax;
using oracle::agm_gauss;
using oracle::count_below;

void check_rel(double got, const mp& want, double tol = 1e-9) {
  INFO("got " << got << " want " << static_cast<double>(want));
  CHECK(oracle::rel_ok(got, want, tol));
}

}  // namespace

TEST_CASE("gauss constant") {
  const double g = gauss_constant();
  CHECK(std::abs(g - 0.8346268) < 1e-6);
  CHECK(std::abs(g - static_cast<double>(agm_gauss())) < 1e-14);
  CHECK(std::abs(gauss_constant(1e-7) - gauss_constant(5e-8)) < 1e-10);
}

TEST_CASE("sobolev constant against the gamma function") {
  for (double s : {0.25, 0.5, 0.75}) {
    check_rel(sobolev_constant(s), oracle::sobolev(s), 1e-12);
  }
  CHECK(sobolev_constant(0.5) == doctest::Approx(0.423777208123757597).epsilon(1e-13));
  CHECK_THROWS(sobolev_constant(1.0));
}

TEST_CASE("aggregates") {
  PhysParams p;
  p.nu = p.kappa = 1.0;
  const auto g = make_grid(32);
  const auto f = make_forcing(g, {{1, 0, 1.0, Phase::Sin}}, p);
  const auto a = compute_aggregates(f, p);
  CHECK(a.B == doctest::Approx(2 * std::numbers::e * 2 * std::numbers::pi * std::numbers::pi).epsilon(1e-13));
  PhysParams q = p;
  q.kappa = 2.0;
  CHECK(compute_aggregates(f, q).A == doctest::Approx(a.A / 2).epsilon(1e-15));
  const auto z = compute_aggregates(make_forcing(g, {}, p), p);
  CHECK(z.A == 0.0);
  CHECK(z.B == 0.0);
  CHECK(z.A1 == 0.0);
}

TEST_CASE("compute_M examples") {
  PhysParams p;
  p.nu = p.kappa = 1.0;
  const auto zero = compute_M(p, 0, 0, 0);
  CHECK(zero.M1 == 1.0);
  CHECK(zero.M2 == 1.0);
  CHECK(zero.M == 1.0);
  // exponent 4 beta/(2 beta - 1) = 6: M1 = 2^6 + 1
  const auto one = compute_M(p, 1, 1, 1);
  CHECK(one.M1 == doctest::Approx(65.0).epsilon(1e-13));
  CHECK(one.M2 == doctest::Approx(65.0).epsilon(1e-13));
  CHECK(one.M == doctest::Approx(65.0).epsilon(1e-13));
  double prev = 0;
  for (double A : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double m1 = compute_M(p, A, 1, 1).M1;
    CHECK(m1 >= prev);
    prev = m1;
  }
  PhysParams bad = p;
  bad.alpha = 0.55;
  bad.beta = 0.99;
  bad.allow_out_of_range_exponents = true;
  // 3 alpha - beta > 0 here, so M2 is defined; push beta past 3 alpha
  bad.alpha = 0.51;
  bad.beta = 1.6;
  const auto e = compute_M(bad, 1, 1, 1);
  CHECK_FALSE(e.m2_defined);
  CHECK(e.M == e.M1);
}

TEST_CASE("compute_N examples") {
  PhysParams p;
  p.nu = p.kappa = 1.0;
  CHECK(compute_N(p, 0.0, 5.0).N == 0.0);
  CHECK(compute_N(p, 1.0, 0.0).N == doctest::Approx(4 * std::exp(2.0)).epsilon(1e-14));
  CHECK(compute_N(p, 2.0, 0.3).N == doctest::Approx(4 * compute_N(p, 1.0, 0.3).N).epsilon(1e-14));
  const auto big = compute_N(p, 1.0, 1e4);
  CHECK(big.overflow);
  CHECK(std::isinf(big.N));
}

TEST_CASE("threshold examples") {
  PhysParams p;
  p.nu = p.kappa = 1.0;
  const auto g = make_grid(64);
  const EigenIndex idx(g);
  const auto t = determining_threshold(p, 0.0, 1.0, idx);
  CHECK(t.value == doctest::Approx(16.0).epsilon(1e-14));
  CHECK(t.resolved);
  CHECK(t.m_star == count_below(g, 16.0));
  CHECK(idx.eigenvalue(t.m_star + 1) >= 16.0);
  CHECK(idx.eigenvalue(t.m_star) < 16.0);
  const auto t2 = determining_threshold(p, 0.0, 2.0, idx);
  CHECK(t2.value == doctest::Approx(16.0 * std::pow(2.0, 4.0)).epsilon(1e-13));
  CHECK_FALSE(t2.resolved);
  PhysParams near = p;
  near.alpha = 0.5 + 1e-6;
  CHECK(std::isinf(determining_threshold(near, 0.0, 1.0, idx).value));
}

TEST_CASE("rho_m examples") {
  PhysParams p;
  p.nu = p.kappa = 1.0;
  CHECK(rho_m(p, 1.0) == 0.5);
  PhysParams q = p;
  q.nu = 2.0;
  CHECK(rho_m(q, 3.0) == doctest::Approx(0.5 * std::pow(3.0, q.beta)));
  PhysParams r = p;
  r.alpha = 0.6;
  r.beta = 0.9;
  CHECK(rho_m(r, 4.0) == doctest::Approx(0.5 * std::pow(4.0, 0.6)).epsilon(1e-15));
}

TEST_CASE("dimension bound") {
  const mp G = agm_gauss();
  const mp want = mp(10) * log(8 * G * G * 4 / (1 - mp(0.25))) / log(2 / (1 + mp(0.25)));
  check_rel(dimension_bound(10, 2.0, 0.5), want, 1e-12);
  CHECK(dimension_bound(10, 2.0, 0.5) == doctest::Approx(72.16703582181021).epsilon(1e-12));
  CHECK_THROWS(dimension_bound(10, 2.0, 1.0));
  CHECK_THROWS(dimension_bound(10, 0.5, 0.5));
  CHECK(dimension_bound(11, 2.0, 0.5) > dimension_bound(10, 2.0, 0.5));
  CHECK(dimension_bound(10, 3.0, 0.5) > dimension_bound(10, 2.0, 0.5));
  CHECK(dimension_bound(10, 2.0, 0.6) > dimension_bound(10, 2.0, 0.5));
}

TEST_CASE("bound calculators match a 50-digit oracle on random parameter sets") {
  const auto sweep = oracle::bound_sweep(2024, 20);
  for (const auto& m : sweep.mismatches) FAIL_CHECK(m);
  CHECK(sweep.comparisons >= 20 * 13);
  CHECK(sweep.overflowed > 0);
  CHECK(sweep.overflowed < 20);
}

TEST_CASE("bound report json") {
  PhysParams p;
  const auto g = make_grid(16);
  const EigenIndex idx(g);
  const auto r = make_bound_report(make_forcing(g, {}, p), p, idx, 1.0, {1, 5});
  CHECK(r.aggregates.A == 0.0);
  CHECK(r.n_value.N == 0.0);
  CHECK_FALSE(r.threshold.resolved);
  const auto j = to_json(r);
  CHECK(j.find("unresolved at this n") != std::string::npos);
  CHECK(r.rho.size() == 2);
  CHECK(r.rho[1].lambda == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("mode count estimate") {
  PhysParams p;
  p.nu = p.kappa = 1.0;
  // ((sqrt N + 1/2)^2 + 3/4) at N = 4
  CHECK(mode_count_estimate(p, 4.0, 1.0) == doctest::Approx(6.25 + 0.75));
}

TEST_CASE("a priori monitor") {
  const auto g = make_grid(16);
  PhysParams p;
  p.nu = p.kappa = 1.0;
  const auto none = make_forcing(g, {}, p);
  const EigenIndex idx(g);
  const auto rep = make_bound_report(none, p, idx, 1.0, {});
  std::mt19937_64 rng(1);
  FlowState s(random_field(g, rng), random_field(g, rng));
  IntegratorConfig cfg;
  cfg.t_end = 40;
  cfg.dt = 0.05;
  s = integrate(s, none, p, cfg);
  const std::vector<NormRecord> decayed{make_norm_record(s, p, 1, 1)};
  const auto m = monitor_apriori(decayed, rep, none, p);
  CHECK(m.sup_value < 1e-20);
  CHECK(m.fitted_c == 0.0);
  CHECK_THROWS(monitor_apriori({}, rep, none, p));

  std::vector<NormRecord> recs;
  FlowState t(random_field(g, rng), random_field(g, rng));
  for (int i = 0; i < 5; ++i) {
    recs.push_back(make_norm_record(t, p, 1, 1));
    t.theta *= 0.5;
  }
  const auto mm = monitor_apriori(recs, rep, none, p);
  for (const auto& r : recs) CHECK(mm.sup_value >= r.theta_2beta * r.theta_2beta + r.u_2alpha * r.u_2alpha);
}
