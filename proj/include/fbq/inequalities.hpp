#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbq/spectral_field.hpp"

namespace fbq {

struct InequalityReport {
  std::string id;
  long count = 0;                      // samples (or mesh points) examined
  double worst_margin = 0.0;           // max of lhs - rhs; negative means satisfied
  double worst_relative_margin = 0.0;  // max of (lhs - rhs) / rhs over rhs > 0
  double max_ratio = 0.0;              // max of lhs / rhs over rhs > 0
  std::optional<double> fitted_constant;
  std::optional<double> reference_constant;
  long violations = 0;
  bool passed = true;
};

/// Relative slack granted to the constant-explicit inequalities.
inline constexpr double kRoundoffSlack = 1e-12;

/// Random mean-zero samples with |k|^-decay spectra, limited to max |k_i| <= band
/// (band < 0: the dealias cut).
std::vector<SpectralField> random_samples(const GridSpec& grid, int count, std::uint64_t seed, double decay = 2.0,
                                          int band = -1);

/// Band that keeps products of two samples inside the dealias cut.
int product_band(const GridSpec& grid);

/// ||Lambda^{s1} g|| <= ||Lambda^{s2} g|| for mean-zero g, s1 <= s2.
InequalityReport check_poincare(const std::vector<SpectralField>& samples, double s1, double s2);

/// ||Lambda^s g|| <= ||Lambda^{s1} g||^delta ||Lambda^{s2} g||^{1-delta},
/// s = delta s1 + (1 - delta) s2.
InequalityReport check_interpolation(const std::vector<SpectralField>& samples, double s1, double s, double s2);

/// Ratio ||u||^2_{L^p} / ||Lambda^s u||^2 with p = 2/(1-s), compared with
/// the whole-space constant C_s. Violations are counted, never fatal.
InequalityReport check_sobolev(const std::vector<SpectralField>& samples, double s);

struct HolderExponents {
  double p1 = 4.0, p2 = 4.0, q1 = 4.0, q2 = 4.0;
  /// 1/p1 + 1/p2 = 1/q1 + 1/q2 = 1/2 with every exponent in [lower, inf].
  void validate(bool strict_lower) const;
};

/// ||Lambda^s(gh)|| against ||Lambda^s g||_{p1} ||h||_{p2} + ||Lambda^s h||_{q1} ||g||_{q2};
/// the fitted constant is the largest ratio.
InequalityReport check_kato_ponce(const std::vector<SpectralField>& g_samples, const std::vector<SpectralField>& h_samples,
                                  double s, const HolderExponents& exponents = {});

/// Lambda^s(g . grad h) - g . (Lambda^s grad h) for the divergence-free g
/// with vorticity g_omega.
SpectralField commutator(const SpectralField& g_omega, const SpectralField& h, double s);

/// ||commutator|| against ||grad g||_{p1} ||Lambda^s h||_{p2} + ||Lambda^s g||_{q1} ||grad h||_{q2}.
/// g samples are given by their vorticity.
InequalityReport check_commutator(const std::vector<SpectralField>& g_omega_samples,
                                  const std::vector<SpectralField>& h_samples, double s,
                                  const HolderExponents& exponents = {});

/// Nonnegative piecewise-constant g, h on a uniform mesh of `cell` width and
/// y solving y' = g y + h exactly from y0.
struct GronwallInstance {
  double cell = 0.05;
  std::vector<double> g;
  std::vector<double> h;
  double y0 = 0.0;
};

/// y at every mesh node (size cells + 1).
std::vector<double> gronwall_solution(const GronwallInstance& instance);

/// Checks y(t + r) <= (a3/r + a2) e^{a1} at every mesh node, with a1, a2, a3
/// the sup over windows of length r of the integrals of g, h, y.
/// r must be a whole number of cells. Throws std::logic_error if the instance
/// violates the hypotheses (negative g, h or y0).
InequalityReport check_uniform_gronwall(const std::vector<GronwallInstance>& instances, int r_cells);

/// Random instances: `cells` cells, g in [0, g_max], h in [0, h_max], y0 in [0, 1].
std::vector<GronwallInstance> random_gronwall_instances(int count, int cells, double cell, std::uint64_t seed,
                                                        double g_max = 2.0, double h_max = 1.0);

}  // namespace fbq
