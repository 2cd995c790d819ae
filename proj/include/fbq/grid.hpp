#pragma once

#include <numbers>

namespace fbq {

/// Uniform n x n grid on the torus [0, 2pi]^2.
struct GridSpec {
  int n = 0;
  double domain_size = 2.0 * std::numbers::pi;
  /// Largest |k_i| kept after dealiasing quadratic products.
  int dealias_cut = 0;

  int half() const { return n / 2 + 1; }            // stored k2 columns
  int spectral_size() const { return n * half(); }  // stored coefficients
  int physical_size() const { return n * n; }
  double dx() const { return domain_size / n; }

  /// Wavenumber of row index i (k1) or column index j (k2).
  int wavenumber(int index) const { return index <= n / 2 ? index : index - n; }
  int row_of(int k1) const { return k1 >= 0 ? k1 : k1 + n; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Throws std::invalid_argument unless n is even and >= 8.
GridSpec make_grid(int n);

}  // namespace fbq
