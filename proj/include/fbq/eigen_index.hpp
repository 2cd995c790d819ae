#pragma once

#include <limits>
#include <vector>

#include "fbq/spectral_field.hpp"

namespace fbq {

/// One real eigenfunction of Lambda: sin(k.x) or cos(k.x) for a wavevector
/// in the half lattice (k2 > 0, or k2 == 0 and k1 > 0).
struct Eigenfunction {
  int k1 = 0;
  int k2 = 0;
  Phase phase = Phase::Sin;
  double lambda = 0.0;  // |k|
};

/// Deterministic enumeration of the real eigenfunctions carried by the
/// dealiased grid, sorted by (|k|, k1, k2, sin before cos).
class EigenIndex {
 public:
  static constexpr int kNotRetained = std::numeric_limits<int>::max();

  explicit EigenIndex(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  int size() const { return static_cast<int>(ordering_.size()); }
  const std::vector<Eigenfunction>& ordering() const { return ordering_; }

  /// lambda_m, 1-based as in lambda_1 = 1. Throws std::out_of_range.
  double eigenvalue(int m) const;

  /// Position (0-based) of the cos / sin eigenfunction owning a stored slot.
  int cos_rank(int i, int j) const { return cos_rank_[index(i, j)]; }
  int sin_rank(int i, int j) const { return sin_rank_[index(i, j)]; }

  /// Number of eigenfunctions with lambda strictly below `value`.
  int count_below(double value) const;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * grid_.half() + j; }

  GridSpec grid_;
  std::vector<Eigenfunction> ordering_;
  std::vector<int> cos_rank_;
  std::vector<int> sin_rank_;
};

/// P_m: keeps the first m eigenfunction components.
SpectralField project_low(const SpectralField& field, const EigenIndex& index, int m);
/// Q_m = I - P_m.
SpectralField project_high(const SpectralField& field, const EigenIndex& index, int m);

/// Replaces the P_m part of `target` by that of `source`, leaving the Q_m
/// part of `target` untouched. The copied parts are bit-identical.
void overwrite_low(SpectralField& target, const SpectralField& source, const EigenIndex& index, int m);

}  // namespace fbq
