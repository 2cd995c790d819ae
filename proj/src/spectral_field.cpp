#include "fbq/spectral_field.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fft.hpp"

namespace fbq {

namespace {

std::atomic<std::uint64_t> g_mean_removals{0};

constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

inline double column_weight(const GridSpec& g, int j) { return (j == 0 || j == g.n / 2) ? 1.0 : 2.0; }

void require_same_grid(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("spectral fields live on different grids");
}

}  // namespace

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coeffs_(static_cast<std::size_t>(grid.spectral_size())) {}

Complex SpectralField::coeff(int k1, int k2) const {
  const int h = grid_.n / 2;
  if (std::abs(k1) > h || std::abs(k2) > h) return {};
  if (k2 < 0) return std::conj(coeff(-k1, -k2));
  return slot(grid_.row_of(k1 == -h ? h : k1), k2);
}

void SpectralField::set_coeff(int k1, int k2, Complex value) {
  const int h = grid_.n / 2;
  if (k1 == 0 && k2 == 0) throw std::invalid_argument("the k = 0 coefficient of a mean-zero field is fixed at 0");
  if (std::abs(k1) > h || std::abs(k2) > h) throw std::out_of_range("wavevector outside the grid");
  if (k2 < 0) {
    set_coeff(-k1, -k2, std::conj(value));
    return;
  }
  const int row = grid_.row_of(k1 == -h ? h : k1);
  if (k2 == 0 || k2 == h) {
    const int mirror = grid_.row_of(-k1 == -h ? h : -k1);
    if (mirror == row) value = value.real();
    slot(mirror, k2) = std::conj(value);
  }
  slot(row, k2) = value;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
  require_same_grid(*this, x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
}

bool operator==(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid_ == b.grid_)) return false;
  return std::equal(a.coeffs_.begin(), a.coeffs_.end(), b.coeffs_.begin(), [](Complex x, Complex y) {
    return std::bit_cast<std::uint64_t>(x.real()) == std::bit_cast<std::uint64_t>(y.real()) &&
           std::bit_cast<std::uint64_t>(x.imag()) == std::bit_cast<std::uint64_t>(y.imag());
  });
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField make_mode(const GridSpec& grid, int k1, int k2, double amplitude, Phase phase) {
  if (std::abs(k1) >= grid.n / 2 || std::abs(k2) >= grid.n / 2)
    throw std::out_of_range("mode must satisfy |k_i| < n/2");
  SpectralField f(grid);
  const Complex c = phase == Phase::Cos ? Complex(0.5 * amplitude, 0.0) : Complex(0.0, -0.5 * amplitude);
  f.set_coeff(k1, k2, c);
  return f;
}

void to_spectral_into(std::span<const double> samples, SpectralField& out) {
  const GridSpec& g = out.grid();
  if (samples.size() != static_cast<std::size_t>(g.physical_size()))
    throw std::invalid_argument("sample count does not match the grid");
  auto& ws = detail::FftWorkspace::for_size(g.n);
  std::copy(samples.begin(), samples.end(), ws.real().begin());
  ws.forward();
  const double norm = 1.0 / (static_cast<double>(g.n) * g.n);
  auto spec = ws.spectral();
  auto dst = out.coeffs();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = spec[i] * norm;
  dst[0] = 0.0;
}

SpectralField to_spectral(const GridSpec& grid, std::span<const double> samples) {
  SpectralField f(grid);
  to_spectral_into(samples, f);
  // Recompute the mean only for the warning counter; to_spectral_into
  // already dropped it.
  double sum = 0.0, scale = 0.0;
  for (double v : samples) {
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  const double mean = sum / static_cast<double>(samples.size());
  if (std::abs(mean) > 1e-12 * std::max(scale, 1.0)) ++g_mean_removals;
  return f;
}

void from_spectral_into(const SpectralField& field, std::span<double> out) {
  const GridSpec& g = field.grid();
  if (out.size() != static_cast<std::size_t>(g.physical_size()))
    throw std::invalid_argument("output size does not match the grid");
  auto& ws = detail::FftWorkspace::for_size(g.n);
  auto src = field.coeffs();
  std::copy(src.begin(), src.end(), ws.spectral().begin());
  ws.backward();
  auto r = ws.real();
  std::copy(r.begin(), r.end(), out.begin());
}

std::vector<double> from_spectral(const SpectralField& field) {
  std::vector<double> out(static_cast<std::size_t>(field.grid().physical_size()));
  from_spectral_into(field, out);
  return out;
}

std::uint64_t mean_removal_count() { return g_mean_removals.load(); }

SpectralField fractional_laplacian(const SpectralField& field, double s) {
  const GridSpec& g = field.grid();
  SpectralField out(g);
  for (int i = 0; i < g.n; ++i) {
    const int k1 = g.wavenumber(i);
    for (int j = 0; j < g.half(); ++j) {
      const int ksq = k1 * k1 + j * j;
      if (ksq == 0) continue;
      out.slot(i, j) = field.slot(i, j) * std::pow(static_cast<double>(ksq), 0.5 * s);
    }
  }
  return out;
}

SpectralField d1(const SpectralField& field) {
  const GridSpec& g = field.grid();
  SpectralField out(g);
  for (int i = 0; i < g.n; ++i) {
    if (i == g.n / 2) continue;
    const double k1 = g.wavenumber(i);
    for (int j = 0; j < g.half() - 1; ++j) out.slot(i, j) = Complex(0.0, k1) * field.slot(i, j);
  }
  return out;
}

SpectralField d2(const SpectralField& field) {
  const GridSpec& g = field.grid();
  SpectralField out(g);
  for (int i = 0; i < g.n; ++i) {
    if (i == g.n / 2) continue;
    for (int j = 0; j < g.half() - 1; ++j) out.slot(i, j) = Complex(0.0, j) * field.slot(i, j);
  }
  return out;
}

double sobolev_norm(const SpectralField& field, double s) {
  const GridSpec& g = field.grid();
  double sum = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const int k1 = g.wavenumber(i);
    for (int j = 0; j < g.half(); ++j) {
      const int ksq = k1 * k1 + j * j;
      if (ksq == 0) continue;
      const double m = s == 0.0 ? 1.0 : std::pow(static_cast<double>(ksq), s);
      sum += column_weight(g, j) * m * std::norm(field.slot(i, j));
    }
  }
  return std::sqrt(kFourPiSq * sum);
}

double inner(const SpectralField& f, const SpectralField& h) {
  require_same_grid(f, h);
  const GridSpec& g = f.grid();
  double sum = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.half(); ++j) {
      const Complex a = f.slot(i, j), b = h.slot(i, j);
      sum += column_weight(g, j) * (a.real() * b.real() + a.imag() * b.imag());
    }
  return kFourPiSq * sum;
}

double lp_norm_samples(const GridSpec& grid, std::span<const double> samples, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm requires p >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  const double cell = grid.dx() * grid.dx();
  double sum = 0.0;
  if (p == 2.0) {
    for (double v : samples) sum += v * v;
    return std::sqrt(sum * cell);
  }
  for (double v : samples) sum += std::pow(std::abs(v), p);
  return std::pow(sum * cell, 1.0 / p);
}

double lp_norm(const SpectralField& field, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("L^p norm requires p >= 1");
  const auto samples = from_spectral(field);
  return lp_norm_samples(field.grid(), samples, p);
}

void dealias_in_place(SpectralField& field) {
  const GridSpec& g = field.grid();
  for (int i = 0; i < g.n; ++i) {
    const bool row_out = std::abs(g.wavenumber(i)) > g.dealias_cut;
    for (int j = 0; j < g.half(); ++j)
      if (row_out || j > g.dealias_cut) field.slot(i, j) = 0.0;
  }
}

SpectralField dealias(const SpectralField& field) {
  SpectralField out = field;
  dealias_in_place(out);
  return out;
}

SpectralField random_field(const GridSpec& grid, std::mt19937_64& rng, const RandomFieldOptions& options) {
  const int band = options.band < 0 ? grid.dealias_cut : options.band;
  if (band >= grid.n / 2) throw std::invalid_argument("random field band must stay below n/2");
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(grid);
  for (int k1 = -band; k1 <= band; ++k1) {
    for (int k2 = 0; k2 <= band; ++k2) {
      if (k2 == 0 && k1 <= 0) continue;
      const double ksq = static_cast<double>(k1 * k1 + k2 * k2);
      const double scale = std::pow(ksq, -0.5 * options.decay) / std::sqrt(2.0);
      const double re = normal(rng), im = normal(rng);
      f.set_coeff(k1, k2, Complex(re, im) * scale);
    }
  }
  return f;
}

}  // namespace fbq
