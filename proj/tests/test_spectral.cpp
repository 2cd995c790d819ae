#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fbq/spectral_field.hpp"
#include "fbq/spectrum_io.hpp"

using namespace fbq;
using std::numbers::pi;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SpectralField rnd(const GridSpec& g, std::uint64_t seed, double decay = 2.0) {
  std::mt19937_64 rng(seed);
  RandomFieldOptions o;
  o.decay = decay;
  return random_field(g, rng, o);
}

}  // namespace

TEST_CASE("grid construction") {
  CHECK(make_grid(64).dealias_cut == 21);
  CHECK(make_grid(8).dealias_cut == 2);
  CHECK(make_grid(32).dealias_cut == 10);
  CHECK_THROWS_AS(make_grid(7), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(6), std::invalid_argument);
  const auto g = make_grid(16);
  CHECK(g.wavenumber(0) == 0);
  CHECK(g.wavenumber(8) == 8);
  CHECK(g.wavenumber(9) == -7);
  CHECK(g.row_of(-7) == 9);
  CHECK(g.dx() == doctest::Approx(2 * pi / 16));
}

TEST_CASE("sin x1 transforms to one conjugate pair") {
  const auto g = make_grid(16);
  const auto f = to_spectral(g, sample(g, [](double x1, double) { return std::sin(x1); }));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.half(); ++j) {
      const int k1 = g.wavenumber(i);
      if (j == 0 && std::abs(k1) == 1) continue;
      CHECK(std::abs(f.slot(i, j)) < 1e-15);
    }
  // sin x = (e^{ix} - e^{-ix}) / 2i
  CHECK(std::abs(f.coeff(1, 0) - Complex(0, -0.5)) < 1e-15);
  CHECK(std::abs(f.coeff(-1, 0) - Complex(0, 0.5)) < 1e-15);
  const auto m = make_mode(g, 1, 0, 1.0, Phase::Sin);
  CHECK(sobolev_norm(f - m, 0) < 1e-14);
}

TEST_CASE("constant field maps to zero and is counted") {
  const auto g = make_grid(8);
  const auto before = mean_removal_count();
  const auto f = to_spectral(g, std::vector<double>(64, 3.5));
  for (auto c : f.coeffs()) CHECK(c == Complex(0, 0));
  CHECK(mean_removal_count() == before + 1);
}

TEST_CASE("transform matches a direct DFT at n=8") {
  const auto g = make_grid(8);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> s(64);
  for (auto& v : s) v = nd(rng);
  const auto f = to_spectral(g, s);
  double mean = 0;
  for (double v : s) mean += v / 64;
  for (int k1 = -3; k1 <= 4; ++k1)
    for (int k2 = 0; k2 <= 4; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      Complex direct = 0;
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
          direct += s[a * 8 + b] * std::exp(Complex(0, -2 * pi * (k1 * a + k2 * b) / 8.0));
      direct /= 64.0;
      CHECK(std::abs(f.coeff(k1, k2) - direct) < 1e-14);
    }
  auto back = from_spectral(f);
  for (auto& v : s) v -= mean;
  CHECK(max_abs_diff(back, s) < 1e-12);
}

TEST_CASE("round trip of a random field") {
  const auto g = make_grid(32);
  const auto f = rnd(g, 11);
  const auto back = to_spectral(g, from_spectral(f));
  double err = 0;
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) err = std::max(err, std::abs(back.coeffs()[i] - f.coeffs()[i]));
  CHECK(err < 1e-15);
}

TEST_CASE("fractional laplacian multipliers") {
  const auto g = make_grid(16);
  const auto m1 = make_mode(g, 1, 0, 1.0, Phase::Cos);
  CHECK(fractional_laplacian(m1, 0.37) == m1);
  const auto m34 = make_mode(g, 3, 4, 1.0, Phase::Sin);
  const auto l = fractional_laplacian(m34, 2.0);
  CHECK(std::abs(l.coeff(3, 4) - 25.0 * m34.coeff(3, 4)) < 1e-14);
  const auto f = rnd(g, 5);
  const auto r = fractional_laplacian(fractional_laplacian(f, 0.7), -0.7);
  for (std::size_t i = 0; i < f.coeffs().size(); ++i) CHECK(std::abs(r.coeffs()[i] - f.coeffs()[i]) < 1e-12);
  const auto st = fractional_laplacian(fractional_laplacian(f, 0.3), 0.45);
  const auto direct = fractional_laplacian(f, 0.75);
  for (std::size_t i = 0; i < f.coeffs().size(); ++i)
    CHECK(std::abs(st.coeffs()[i] - direct.coeffs()[i]) <= 1e-13 * (1 + std::abs(direct.coeffs()[i])));
  CHECK(fractional_laplacian(f, 1.3).slot(0, 0) == Complex(0, 0));
}

TEST_CASE("sobolev norms of single modes") {
  const auto g = make_grid(16);
  const auto s1 = make_mode(g, 1, 0, 1.0, Phase::Sin);
  for (double s : {0.0, 0.5, 1.0, 2.3}) CHECK(sobolev_norm(s1, s) == doctest::Approx(std::sqrt(2 * pi * pi)).epsilon(1e-14));
  const auto s2 = make_mode(g, 2, 0, 1.0, Phase::Sin);
  for (double s : {0.0, 0.5, 1.0, 1.5})
    CHECK(sobolev_norm(s2, s) == doctest::Approx(std::pow(2.0, s) * std::sqrt(2 * pi * pi)).epsilon(1e-14));
}

TEST_CASE("parseval against grid quadrature") {
  const auto g = make_grid(32);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = rnd(g, seed);
    const auto v = from_spectral(f);
    double q = 0;
    for (double x : v) q += x * x;
    q *= g.dx() * g.dx();
    CHECK(std::abs(sobolev_norm(f, 0.0) * sobolev_norm(f, 0.0) - q) <= 1e-10 * q);
    CHECK(std::abs(inner(f, f) - q) <= 1e-10 * q);
  }
}

TEST_CASE("lp norms") {
  const auto g = make_grid(32);
  const auto f = make_mode(g, 1, 0, 1.0, Phase::Sin);
  CHECK(lp_norm(f, 2.0) == doctest::Approx(sobolev_norm(f, 0.0)).epsilon(1e-10));
  // \int sin^4 over the torus = (3/8)(2pi)^2
  CHECK(lp_norm(f, 4.0) == doctest::Approx(std::pow(1.5 * pi * pi, 0.25)).epsilon(1e-12));
  const double sup = lp_norm(f, std::numeric_limits<double>::infinity());
  CHECK(sup <= 1.0);
  CHECK(sup > 0.99);
  CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("derivatives of single modes") {
  const auto g = make_grid(16);
  const auto f = make_mode(g, 2, 3, 1.0, Phase::Sin);
  CHECK(d1(f) == make_mode(g, 2, 3, 2.0, Phase::Cos));
  const auto e = d2(f) - make_mode(g, 2, 3, 3.0, Phase::Cos);
  CHECK(sobolev_norm(e, 0) < 1e-14);
}

TEST_CASE("dealiasing") {
  const auto g = make_grid(64);
  const auto inside = make_mode(g, 21, -5, 1.0, Phase::Cos);
  CHECK(dealias(inside) == inside);
  const auto outside = make_mode(g, 31, 0, 1.0, Phase::Sin);
  CHECK(sobolev_norm(dealias(outside), 0) == 0.0);
  std::mt19937_64 rng(2);
  RandomFieldOptions o;
  o.band = 31;
  const auto f = random_field(g, rng, o);
  CHECK(sobolev_norm(dealias(f), 0) <= sobolev_norm(f, 0));
  CHECK(sobolev_norm(dealias(f), 0) < sobolev_norm(f, 0));
}

TEST_CASE("random fields are mean zero, band limited and conjugate symmetric") {
  const auto g = make_grid(16);
  std::mt19937_64 rng(9);
  RandomFieldOptions o;
  o.band = 3;
  const auto f = random_field(g, rng, o);
  CHECK(f.slot(0, 0) == Complex(0, 0));
  CHECK(f.coeff(4, 0) == Complex(0, 0));
  CHECK(f.coeff(1, 4) == Complex(0, 0));
  CHECK(f.coeff(-2, 0) == std::conj(f.coeff(2, 0)));
  CHECK(f.all_finite());
}

TEST_CASE("spectrum dumps round trip bit for bit") {
  const auto g = make_grid(16);
  const auto f = rnd(g, 21);
  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_spectrum_binary(bin, f);
  CHECK(read_spectrum_binary(bin) == f);
  std::stringstream csv;
  write_spectrum_csv(csv, f);
  CHECK(read_spectrum_csv(csv) == f);
  std::stringstream bad("NOTASPEC");
  CHECK_THROWS(read_spectrum_binary(bad));
}

TEST_CASE("every operation keeps the mean zero") {
  const auto g = make_grid(16);
  const auto f = rnd(g, 4);
  for (const auto& h : {fractional_laplacian(f, -0.5), d1(f), d2(f), dealias(f), f + f, 2.0 * f})
    CHECK(h.slot(0, 0) == Complex(0, 0));
}
