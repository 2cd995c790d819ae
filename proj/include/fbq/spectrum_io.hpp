#pragma once

#include <iosfwd>
#include <string>

#include "fbq/spectral_field.hpp"

namespace fbq {

// Binary spectrum dump, little-endian host layout:
//   char[8] "FBQSPEC1" | int32 n | int32 0 | uint64 count |
//   count x { int32 k1 | int32 k2 | float64 re | float64 im }
// Records cover the stored half plane (k2 = 0..n/2) in storage order.
void write_spectrum_binary(std::ostream& out, const SpectralField& field);
SpectralField read_spectrum_binary(std::istream& in);

// CSV: a "# n=<n>" line, a "k1,k2,re,im" header, then one row per stored
// coefficient with 17 significant digits.
void write_spectrum_csv(std::ostream& out, const SpectralField& field);
SpectralField read_spectrum_csv(std::istream& in);

}  // namespace fbq
