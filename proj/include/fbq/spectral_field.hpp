#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fbq/grid.hpp"

namespace fbq {

using Complex = std::complex<double>;

/// Mean-zero real field on the torus, stored as the k2 >= 0 half of its
/// Fourier coefficients (FFTW r2c layout): slot (i, j) holds k = (k1(i), j)
/// with j = 0..n/2. Coefficients follow f^(k) = (2pi)^-2 \int f e^{-ik.x}.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }

  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  Complex& slot(int i, int j) { return coeffs_[static_cast<std::size_t>(i) * grid_.half() + j]; }
  const Complex& slot(int i, int j) const {
    return coeffs_[static_cast<std::size_t>(i) * grid_.half() + j];
  }

  /// Coefficient at an arbitrary wavevector, using conjugate symmetry for
  /// k2 < 0. Zero outside |k_i| <= n/2.
  Complex coeff(int k1, int k2) const;

  /// Sets the coefficient at k and its conjugate partner at -k.
  void set_coeff(int k1, int k2, Complex value);

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);
  /// this += a * x
  void axpy(double a, const SpectralField& x);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Bitwise comparison of all stored coefficients.
  friend bool operator==(const SpectralField& a, const SpectralField& b);

  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<Complex> coeffs_;
};

enum class Phase { Sin, Cos };

/// amplitude * sin(k.x) or amplitude * cos(k.x).
SpectralField make_mode(const GridSpec& grid, int k1, int k2, double amplitude, Phase phase);

/// Forward transform of n*n samples (row index = x1, column index = x2).
/// A nonzero mean is removed and counted in mean_removal_count().
SpectralField to_spectral(const GridSpec& grid, std::span<const double> samples);
std::vector<double> from_spectral(const SpectralField& field);
/// Allocation-free variants used by the time stepper.
void to_spectral_into(std::span<const double> samples, SpectralField& out);
void from_spectral_into(const SpectralField& field, std::span<double> out);

/// Number of to_spectral calls that had to discard a nonzero mean.
std::uint64_t mean_removal_count();

/// Samples g(x1, x2) on the grid points x = 2pi (i, j) / n.
template <class F>
std::vector<double> sample(const GridSpec& grid, F&& g) {
  std::vector<double> out(static_cast<std::size_t>(grid.physical_size()));
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      out[static_cast<std::size_t>(i) * grid.n + j] = g(i * grid.dx(), j * grid.dx());
  return out;
}

/// Lambda^s f: multiplies each coefficient by |k|^s, k = 0 stays zero.
SpectralField fractional_laplacian(const SpectralField& field, double s);

/// Partial derivatives; the Nyquist row/column is zeroed.
SpectralField d1(const SpectralField& field);
SpectralField d2(const SpectralField& field);

/// ||Lambda^s f||_{L^2} with the volume convention \int_Omega |f|^2 dx.
double sobolev_norm(const SpectralField& field, double s);
/// \int_Omega f g dx.
double inner(const SpectralField& f, const SpectralField& g);
/// Quadrature L^p norm on the physical grid; p = infinity gives max |f|.
double lp_norm(const SpectralField& field, double p);
/// Same quadrature applied to precomputed samples.
double lp_norm_samples(const GridSpec& grid, std::span<const double> samples, double p);

/// Zeroes every coefficient with max(|k1|, |k2|) > dealias_cut.
SpectralField dealias(const SpectralField& field);
void dealias_in_place(SpectralField& field);

struct RandomFieldOptions {
  double decay = 2.0;  // amplitude ~ |k|^-decay
  int band = -1;       // max |k_i| kept; -1 means the dealias cut
};

/// I.i.d. complex Gaussian coefficients with power-law decay,
/// conjugate-symmetric and mean-zero.
SpectralField random_field(const GridSpec& grid, std::mt19937_64& rng,
                           const RandomFieldOptions& options = {});

}  // namespace fbq
