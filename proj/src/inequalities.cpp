#include "fbq/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fbq/boussinesq.hpp"
#include "fbq/diagnostics.hpp"

namespace fbq {

namespace {

constexpr double kUnset = -std::numeric_limits<double>::infinity();

InequalityReport start(const char* id) {
  InequalityReport rep;
  rep.id = id;
  rep.worst_margin = rep.worst_relative_margin = kUnset;
  return rep;
}

void record(InequalityReport& rep, double lhs, double rhs, bool hard) {
  ++rep.count;
  const double margin = lhs - rhs;
  rep.worst_margin = std::max(rep.worst_margin, margin);
  if (rhs > 0.0) {
    const double rel = margin / rhs;
    rep.worst_relative_margin = std::max(rep.worst_relative_margin, rel);
    rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    if (hard && rel > kRoundoffSlack) ++rep.violations;
  } else if (hard && lhs > 0.0) {
    ++rep.violations;
  }
}

// Empty sweeps and all-zero samples leave the margins at 0.
void finish(InequalityReport& rep) {
  if (rep.worst_margin == kUnset) rep.worst_margin = 0.0;
  if (rep.worst_relative_margin == kUnset) rep.worst_relative_margin = 0.0;
}

std::vector<double> magnitude(const std::vector<std::vector<double>>& comps) {
  std::vector<double> out(comps.front().size(), 0.0);
  for (const auto& c : comps)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i] * c[i];
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void check_same_grid(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("g and h sample counts differ");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].grid() == b[i].grid())) throw std::invalid_argument("g and h samples live on different grids");
}

}  // namespace

std::vector<SpectralField> random_samples(const GridSpec& grid, int count, std::uint64_t seed, double decay, int band) {
  std::mt19937_64 rng(seed);
  RandomFieldOptions opts;
  opts.decay = decay;
  opts.band = band;
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) out.push_back(random_field(grid, rng, opts));
  return out;
}

int product_band(const GridSpec& grid) { return grid.dealias_cut / 2; }

InequalityReport check_poincare(const std::vector<SpectralField>& samples, double s1, double s2) {
  if (!(s1 <= s2)) throw std::invalid_argument("poincare: need s1 <= s2");
  InequalityReport rep = start("poincare");
  for (const auto& g : samples) record(rep, sobolev_norm(g, s1), sobolev_norm(g, s2), true);
  rep.fitted_constant = 1.0;
  finish(rep);
  rep.passed = rep.violations == 0;
  return rep;
}

InequalityReport check_interpolation(const std::vector<SpectralField>& samples, double s1, double s, double s2) {
  if (!(s1 <= s && s <= s2)) throw std::invalid_argument("interpolation: need s1 <= s <= s2");
  const double delta = s2 > s1 ? (s2 - s) / (s2 - s1) : 1.0;
  InequalityReport rep = start("interpolation");
  for (const auto& g : samples) {
    const double rhs = std::pow(sobolev_norm(g, s1), delta) * std::pow(sobolev_norm(g, s2), 1.0 - delta);
    record(rep, sobolev_norm(g, s), rhs, true);
  }
  rep.fitted_constant = 1.0;
  finish(rep);
  rep.passed = rep.violations == 0;
  return rep;
}

InequalityReport check_sobolev(const std::vector<SpectralField>& samples, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("sobolev: s must lie in (0, 1)");
  const double p = 2.0 / (1.0 - s);
  InequalityReport rep = start("sobolev");
  rep.reference_constant = sobolev_constant(s);
  for (const auto& u : samples) {
    const double lhs = std::pow(lp_norm(u, p), 2);
    const double rhs = std::pow(sobolev_norm(u, s), 2);
    ++rep.count;
    if (rhs > 0.0) {
      const double ratio = lhs / rhs;
      rep.max_ratio = std::max(rep.max_ratio, ratio);
      if (ratio > *rep.reference_constant) ++rep.violations;
    }
  }
  rep.fitted_constant = rep.max_ratio;
  rep.worst_margin = rep.max_ratio - *rep.reference_constant;
  rep.worst_relative_margin = rep.worst_margin / *rep.reference_constant;
  rep.passed = true;  // report only
  return rep;
}

void HolderExponents::validate(bool strict_lower) const {
  for (double e : {p1, p2, q1, q2}) {
    if (std::isnan(e) || e < 2.0 || (strict_lower && e == 2.0))
      throw std::invalid_argument(strict_lower ? "Holder exponents must lie in (2, inf]"
                                               : "Holder exponents must lie in [2, inf]");
  }
  auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
  if (std::abs(inv(p1) + inv(p2) - 0.5) > 1e-12 || std::abs(inv(q1) + inv(q2) - 0.5) > 1e-12)
    throw std::invalid_argument("Holder exponent mismatch: need 1/p1 + 1/p2 = 1/q1 + 1/q2 = 1/2");
}

InequalityReport check_kato_ponce(const std::vector<SpectralField>& g_samples, const std::vector<SpectralField>& h_samples,
                                  double s, const HolderExponents& ex) {
  if (!(s > 0.0)) throw std::invalid_argument("kato-ponce: s must be > 0");
  ex.validate(false);
  check_same_grid(g_samples, h_samples);
  InequalityReport rep = start("kato_ponce");
  for (std::size_t i = 0; i < g_samples.size(); ++i) {
    const auto& g = g_samples[i];
    const auto& h = h_samples[i];
    const auto gp = from_spectral(g), hp = from_spectral(h);
    SpectralField gh = dealias(to_spectral(g.grid(), multiply(gp, hp)));
    const double lhs = sobolev_norm(gh, s);
    const double rhs = lp_norm(fractional_laplacian(g, s), ex.p1) * lp_norm_samples(g.grid(), hp, ex.p2) +
                       lp_norm(fractional_laplacian(h, s), ex.q1) * lp_norm_samples(g.grid(), gp, ex.q2);
    record(rep, lhs, rhs, false);
  }
  rep.fitted_constant = rep.max_ratio;
  finish(rep);
  rep.passed = std::isfinite(rep.max_ratio);
  return rep;
}

SpectralField commutator(const SpectralField& g_omega, const SpectralField& h, double s) {
  const GridSpec& grid = h.grid();
  const Velocity g = velocity_from_vorticity(g_omega);
  const auto g1 = from_spectral(g.u1), g2 = from_spectral(g.u2);
  const auto h1 = from_spectral(d1(h)), h2 = from_spectral(d2(h));
  const auto l1 = from_spectral(fractional_laplacian(d1(h), s)), l2 = from_spectral(fractional_laplacian(d2(h), s));
  std::vector<double> transport(g1.size()), twisted(g1.size());
  for (std::size_t i = 0; i < g1.size(); ++i) {
    transport[i] = g1[i] * h1[i] + g2[i] * h2[i];
    twisted[i] = g1[i] * l1[i] + g2[i] * l2[i];
  }
  SpectralField out = fractional_laplacian(dealias(to_spectral(grid, transport)), s);
  out -= dealias(to_spectral(grid, twisted));
  return out;
}

InequalityReport check_commutator(const std::vector<SpectralField>& g_omega_samples,
                                  const std::vector<SpectralField>& h_samples, double s, const HolderExponents& ex) {
  if (!(s > 0.0)) throw std::invalid_argument("commutator: s must be > 0");
  ex.validate(true);
  check_same_grid(g_omega_samples, h_samples);
  InequalityReport rep = start("commutator");
  for (std::size_t i = 0; i < g_omega_samples.size(); ++i) {
    const auto& w = g_omega_samples[i];
    const auto& h = h_samples[i];
    const GridSpec& grid = h.grid();
    const double lhs = sobolev_norm(commutator(w, h, s), 0.0);
    const Velocity g = velocity_from_vorticity(w);
    const auto grad_g = magnitude({from_spectral(d1(g.u1)), from_spectral(d2(g.u1)), from_spectral(d1(g.u2)),
                                   from_spectral(d2(g.u2))});
    const auto lam_g = magnitude({from_spectral(fractional_laplacian(g.u1, s)), from_spectral(fractional_laplacian(g.u2, s))});
    const auto grad_h = magnitude({from_spectral(d1(h)), from_spectral(d2(h))});
    const double rhs = lp_norm_samples(grid, grad_g, ex.p1) * lp_norm(fractional_laplacian(h, s), ex.p2) +
                       lp_norm_samples(grid, lam_g, ex.q1) * lp_norm_samples(grid, grad_h, ex.q2);
    record(rep, lhs, rhs, false);
  }
  rep.fitted_constant = rep.max_ratio;
  finish(rep);
  rep.passed = std::isfinite(rep.max_ratio);
  return rep;
}

std::vector<double> gronwall_solution(const GronwallInstance& in) {
  std::vector<double> y{in.y0};
  y.reserve(in.g.size() + 1);
  for (std::size_t i = 0; i < in.g.size(); ++i) {
    const double g = in.g[i], h = in.h[i], d = in.cell, prev = y.back();
    if (g == 0.0)
      y.push_back(prev + h * d);
    else
      y.push_back(prev * std::exp(g * d) + h * std::expm1(g * d) / g);
  }
  return y;
}

InequalityReport check_uniform_gronwall(const std::vector<GronwallInstance>& instances, int r_cells) {
  if (r_cells < 1) throw std::invalid_argument("uniform gronwall: r must span at least one cell");
  InequalityReport rep = start("uniform_gronwall");
  for (const auto& in : instances) {
    const std::size_t cells = in.g.size();
    if (in.h.size() != cells || !(in.cell > 0.0)) throw std::invalid_argument("uniform gronwall: malformed instance");
    if (static_cast<std::size_t>(r_cells) > cells) throw std::invalid_argument("uniform gronwall: r exceeds the mesh");
    bool ok = in.y0 >= 0.0 && std::isfinite(in.y0);
    for (std::size_t i = 0; i < cells; ++i) ok = ok && in.g[i] >= 0.0 && in.h[i] >= 0.0 && std::isfinite(in.g[i] + in.h[i]);
    if (!ok) throw std::logic_error("uniform gronwall: instance violates the hypotheses (g, h, y must be nonnegative)");

    const auto y = gronwall_solution(in);
    const double d = in.cell;
    std::vector<double> gi(cells), hi(cells), yi(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      const double g = in.g[i], h = in.h[i];
      gi[i] = g * d;
      hi[i] = h * d;
      yi[i] = g == 0.0 ? y[i] * d + 0.5 * h * d * d : ((y[i] + h / g) * std::expm1(g * d) - h * d) / g;
    }
    const double r = r_cells * d;
    const auto rc = static_cast<std::size_t>(r_cells);
    for (std::size_t j = 0; j + rc <= cells; ++j) {
      double a1 = 0, a2 = 0, a3 = 0;
      for (std::size_t i = j; i < j + rc; ++i) {
        a1 += gi[i];
        a2 += hi[i];
        a3 += yi[i];
      }
      record(rep, y[j + rc], (a3 / r + a2) * std::exp(a1), true);
    }
  }
  finish(rep);
  rep.passed = rep.violations == 0;
  return rep;
}

std::vector<GronwallInstance> random_gronwall_instances(int count, int cells, double cell, std::uint64_t seed,
                                                        double g_max, double h_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GronwallInstance> out;
  for (int k = 0; k < count; ++k) {
    GronwallInstance in;
    in.cell = cell;
    in.y0 = unit(rng);
    for (int i = 0; i < cells; ++i) {
      in.g.push_back(g_max * unit(rng));
      in.h.push_back(h_max * unit(rng));
    }
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace fbq
