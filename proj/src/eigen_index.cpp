#include "fbq/eigen_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace fbq {

EigenIndex::EigenIndex(const GridSpec& grid)
    : grid_(grid),
      cos_rank_(static_cast<std::size_t>(grid.spectral_size()), kNotRetained),
      sin_rank_(static_cast<std::size_t>(grid.spectral_size()), kNotRetained) {
  const int cut = grid.dealias_cut;
  struct Key {
    int ksq, k1, k2, tag;  // tag 0 = sin, 1 = cos
  };
  std::vector<Key> keys;
  for (int k1 = -cut; k1 <= cut; ++k1)
    for (int k2 = 0; k2 <= cut; ++k2) {
      if (k2 == 0 && k1 <= 0) continue;
      keys.push_back({k1 * k1 + k2 * k2, k1, k2, 0});
      keys.push_back({k1 * k1 + k2 * k2, k1, k2, 1});
    }
  std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(a.ksq, a.k1, a.k2, a.tag) < std::tie(b.ksq, b.k1, b.k2, b.tag);
  });

  ordering_.reserve(keys.size());
  for (std::size_t r = 0; r < keys.size(); ++r) {
    const Key& key = keys[r];
    ordering_.push_back({key.k1, key.k2, key.tag == 0 ? Phase::Sin : Phase::Cos,
                         std::sqrt(static_cast<double>(key.ksq))});
    auto& ranks = key.tag == 0 ? sin_rank_ : cos_rank_;
    const int rank = static_cast<int>(r);
    ranks[index(grid.row_of(key.k1), key.k2)] = rank;
    // k2 == 0 keeps both k and -k in storage; they share the eigenfunction.
    if (key.k2 == 0) ranks[index(grid.row_of(-key.k1), 0)] = rank;
  }
}

double EigenIndex::eigenvalue(int m) const {
  if (m < 1 || m > size())
    throw std::out_of_range("eigenvalue index " + std::to_string(m) + " outside 1.." + std::to_string(size()));
  return ordering_[static_cast<std::size_t>(m - 1)].lambda;
}

int EigenIndex::count_below(double value) const {
  auto it = std::lower_bound(ordering_.begin(), ordering_.end(), value,
                             [](const Eigenfunction& e, double v) { return e.lambda < v; });
  return static_cast<int>(it - ordering_.begin());
}

namespace {

void check_range(const EigenIndex& index, int m) {
  if (m < 0 || m > index.size())
    throw std::out_of_range("projection rank " + std::to_string(m) + " outside 0.." +
                            std::to_string(index.size()));
}

// Splits each stored coefficient into its cos part (real) and sin part
// (imaginary) and keeps the parts selected by `keep_low`.
template <bool KeepLow>
SpectralField project(const SpectralField& field, const EigenIndex& index, int m) {
  check_range(index, m);
  const GridSpec& g = field.grid();
  if (!(g == index.grid())) throw std::invalid_argument("eigen index built for a different grid");
  SpectralField out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.half(); ++j) {
      const Complex c = field.slot(i, j);
      const bool low_re = index.cos_rank(i, j) < m;
      const bool low_im = index.sin_rank(i, j) < m;
      out.slot(i, j) = Complex((low_re == KeepLow) ? c.real() : 0.0, (low_im == KeepLow) ? c.imag() : 0.0);
    }
  return out;
}

}  // namespace

SpectralField project_low(const SpectralField& field, const EigenIndex& index, int m) {
  return project<true>(field, index, m);
}

SpectralField project_high(const SpectralField& field, const EigenIndex& index, int m) {
  return project<false>(field, index, m);
}

void overwrite_low(SpectralField& target, const SpectralField& source, const EigenIndex& index, int m) {
  check_range(index, m);
  const GridSpec& g = target.grid();
  if (!(g == source.grid()) || !(g == index.grid())) throw std::invalid_argument("grid mismatch in overwrite_low");
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.half(); ++j) {
      Complex& t = target.slot(i, j);
      const Complex s = source.slot(i, j);
      if (index.cos_rank(i, j) < m) t.real(s.real());
      if (index.sin_rank(i, j) < m) t.imag(s.imag());
    }
}

}  // namespace fbq
