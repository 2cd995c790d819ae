#include <cmath>
#include <limits>

#include "doctest.h"
#include "fbq/experiments.hpp"
#include "fbq/parallel.hpp"

using namespace fbq;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n = 16;
  c.forcing = {{1, 0, 1.0, Phase::Sin}, {0, 2, 1.0, Phase::Cos}};
  c.spin_up = 5.0;
  c.horizon = 1.0;
  c.epsilon = 1e-3;
  c.pairs = 3;
  c.m_values = {0, 4, 20, 60, 119};
  c.seed = 42;
  return c;
}

}  // namespace

TEST_CASE("spearman rank correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  // ties get average ranks: x ranks 1,2,3,4 ; y ranks 1.5,1.5,3,4
  CHECK(spearman({1, 2, 3, 4}, {5, 5, 6, 7}) == doctest::Approx(0.9486832980505138));
  CHECK(std::isnan(spearman({1, 2, 3}, {1, 1, 1})));
  CHECK(std::isnan(spearman({1}, {1})));
  CHECK_THROWS(spearman({1, 2}, {1}));
}

TEST_CASE("decay rate fit") {
  std::vector<double> t, d;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    d.push_back(3.0 * std::exp(-2.5 * 0.1 * i));
  }
  CHECK(fit_decay_rate(t, d) == doctest::Approx(2.5).epsilon(1e-10));
  // samples below the floor are ignored; the rest still gives the rate
  auto noisy = d;
  for (std::size_t i = 60; i < noisy.size(); ++i) noisy[i] = 1e-30 * (1 + (i % 3));
  CHECK(fit_decay_rate(t, noisy, 1e-20) == doctest::Approx(2.5).epsilon(1e-10));
  bool inf = false;
  const std::vector<double> zeros(t.size(), 0.0);
  CHECK(std::isinf(fit_decay_rate(t, zeros, 0.0, &inf)));
  CHECK(inf);
}

TEST_CASE("perturbations have the requested size") {
  const auto g = make_grid(16);
  const auto p = random_perturbation(g, 3, 1e-3, 1.0, 1.0);
  const FlowState zero(g);
  CHECK(difference_norm(p, zero, 1.0, 1.0) == doctest::Approx(1e-6).epsilon(1e-12));
  const EigenIndex idx(g);
  CHECK(difference_norm(p, zero, 1.0, 1.0, &idx, 0) == difference_norm(p, zero, 1.0, 1.0));
  CHECK(difference_norm(p, zero, 1.0, 1.0, &idx, 30) < difference_norm(p, zero, 1.0, 1.0));
}

TEST_CASE("config validation") {
  auto c = small_config();
  CHECK_NOTHROW(c.validate(120));
  c.epsilon = -1;
  CHECK_THROWS_AS(c.validate(120), std::invalid_argument);
  c = small_config();
  c.horizon = 0;
  CHECK_THROWS_AS(c.validate(120), std::invalid_argument);
  c = small_config();
  c.m_values = {121};
  CHECK_THROWS_AS(c.validate(120), std::invalid_argument);
}

TEST_CASE("squeezing with identical pairs is degenerate, not nan") {
  auto c = small_config();
  c.epsilon = 0.0;
  const auto r = run_squeezing(c);
  for (const auto& p : r.pairs) {
    CHECK(p.y0 == 0.0);
    CHECK(p.yT == 0.0);
    for (double z : p.zT) CHECK(z == 0.0);
  }
  CHECK_FALSE(r.l_hat.has_value());
  for (const auto& d : r.delta_hat) CHECK_FALSE(d.has_value());
  CHECK_FALSE(r.dimension_bound.has_value());
}

TEST_CASE("squeezing measurements") {
  const auto c = small_config();
  const auto r = run_squeezing(c);
  REQUIRE(r.pairs.size() == 3);
  for (const auto& p : r.pairs) {
    REQUIRE(p.ok);
    CHECK(p.z0[0] == p.y0);  // m = 0: Q_0 = I
    for (std::size_t i = 0; i < p.zT.size(); ++i) CHECK(p.zT[i] <= p.yT * (1 + 1e-14));
    for (std::size_t i = 1; i < p.zT.size(); ++i) CHECK(p.zT[i] <= p.zT[i - 1] * (1 + 1e-14));
  }
  for (const auto& s : r.series)
    for (double z : s.z) CHECK(z <= s.y * (1 + 1e-14));
  REQUIRE(r.l_hat.has_value());
  CHECK(std::isfinite(*r.l_hat));
  CHECK(r.spearman_delta <= -0.8);

  // reproducible from (seed, config); thread count does not matter
  auto c2 = c;
  c2.threads = 2;
  const auto r2 = run_squeezing(c2);
  CHECK(*r2.l_hat == *r.l_hat);
  for (std::size_t i = 0; i < r.delta_hat.size(); ++i) CHECK(*r2.delta_hat[i] == *r.delta_hat[i]);
}

TEST_CASE("determining modes: trivial cases") {
  auto c = small_config();
  c.m_values = {120};
  const auto all = run_determining_modes(c);
  for (double d : all.series[0].d) CHECK(d == 0.0);
  CHECK(all.series[0].rate_infinite);

  c = small_config();
  c.epsilon = 0.0;
  const auto same = run_determining_modes(c);
  for (const auto& s : same.series)
    for (double d : s.d) CHECK(d == 0.0);
}

TEST_CASE("determining modes: decay with more modes") {
  auto c = small_config();
  c.horizon = 4.0;
  c.m_values = {8, 24, 48, 80, 110};
  const auto r = run_determining_modes(c);
  for (const auto& s : r.series) {
    CHECK(s.ok);
    for (double d : s.d) CHECK(d >= 0.0);
    CHECK(std::isfinite(s.rate));
  }
  CHECK(r.spearman_rate >= 0.8);
  CHECK(r.m_star.has_value());
}

TEST_CASE("trajectory pair gronwall record") {
  auto c = small_config();
  c.epsilon = 0.0;
  const auto zero = run_trajectory_pair(c);
  CHECK(zero.degenerate);
  CHECK(zero.holds);
  for (double y : zero.y) CHECK(y == 0.0);

  c = small_config();
  const auto r = run_trajectory_pair(c);
  CHECK(r.holds);
  CHECK(std::isfinite(r.log_c_fit));
  CHECK(r.log_c_fit >= 0.0);  // t = 0 alone forces C >= 1
}

TEST_CASE("unforced pair: difference decays after the transient") {
  auto c = small_config();
  c.forcing.clear();
  // buoyancy pumps the theta difference into omega for t ~ 1/nu
  c.horizon = 60.0;
  const auto r = run_trajectory_pair(c);
  const std::size_t after = r.y.size() / 3;
  CHECK(r.y.back() < r.y[after]);
  for (std::size_t i = after + 1; i < r.y.size(); ++i) CHECK(r.y[i] <= r.y[i - 1] * (1 + 1e-12));
}

TEST_CASE("fitted gronwall constant is stable across seeds") {
  std::vector<double> cs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = small_config();
    c.seed = seed;
    cs.push_back(std::exp(run_trajectory_pair(c).log_c_fit));
  }
  const double lo = *std::min_element(cs.begin(), cs.end()), hi = *std::max_element(cs.begin(), cs.end());
  CHECK(hi <= 1.2 * lo);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(37, 0);
  parallel_for(37, 4, [&](int i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(8, 3, [](int i) {
                    if (i == 5) throw std::runtime_error("x");
                  }),
                  std::runtime_error);
}
