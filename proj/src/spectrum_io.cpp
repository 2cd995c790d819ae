#include "fbq/spectrum_io.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fbq {

namespace {

constexpr std::array<char, 8> kMagic = {'F', 'B', 'Q', 'S', 'P', 'E', 'C', '1'};

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated spectrum dump");
  return value;
}

}  // namespace

void write_spectrum_binary(std::ostream& out, const SpectralField& field) {
  const GridSpec& g = field.grid();
  out.write(kMagic.data(), kMagic.size());
  put<std::int32_t>(out, g.n);
  put<std::int32_t>(out, 0);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.spectral_size()));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.half(); ++j) {
      put<std::int32_t>(out, g.wavenumber(i));
      put<std::int32_t>(out, j);
      put<double>(out, field.slot(i, j).real());
      put<double>(out, field.slot(i, j).imag());
    }
}

SpectralField read_spectrum_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("not a spectrum dump (bad magic)");
  const int n = get<std::int32_t>(in);
  (void)get<std::int32_t>(in);
  const auto count = get<std::uint64_t>(in);
  SpectralField field(make_grid(n));
  const GridSpec& g = field.grid();
  if (count != static_cast<std::uint64_t>(g.spectral_size()))
    throw std::runtime_error("spectrum dump record count does not match n");
  for (std::uint64_t r = 0; r < count; ++r) {
    const int k1 = get<std::int32_t>(in);
    const int k2 = get<std::int32_t>(in);
    const double re = get<double>(in);
    const double im = get<double>(in);
    if (k2 < 0 || k2 > n / 2 || k1 < -n / 2 + 1 || k1 > n / 2)
      throw std::runtime_error("spectrum dump wavevector out of range");
    field.slot(g.row_of(k1), k2) = Complex(re, im);
  }
  return field;
}

void write_spectrum_csv(std::ostream& out, const SpectralField& field) {
  const GridSpec& g = field.grid();
  out << "# n=" << g.n << "\n" << "k1,k2,re,im\n";
  char buf[96];
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.half(); ++j) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", g.wavenumber(i), j, field.slot(i, j).real(),
                    field.slot(i, j).imag());
      out << buf;
    }
}

SpectralField read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# n=", 0) != 0) throw std::runtime_error("missing '# n=' header");
  const int n = std::stoi(line.substr(4));
  if (!std::getline(in, line) || line != "k1,k2,re,im") throw std::runtime_error("missing column header");
  SpectralField field(make_grid(n));
  const GridSpec& g = field.grid();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int k1 = 0, k2 = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &k1, &k2, &re, &im) != 4)
      throw std::runtime_error("malformed spectrum row: " + line);
    if (k2 < 0 || k2 > n / 2 || k1 < -n / 2 + 1 || k1 > n / 2)
      throw std::runtime_error("spectrum row wavevector out of range: " + line);
    field.slot(g.row_of(k1), k2) = Complex(re, im);
  }
  return field;
}

}  // namespace fbq
