#include "fbq/grid.hpp"

#include <stdexcept>
#include <string>

namespace fbq {

GridSpec make_grid(int n) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("grid resolution must be even and >= 8, got " + std::to_string(n));
  GridSpec g;
  g.n = n;
  // Largest cut with 3*cut < n: products of retained modes never alias back
  // into the retained band. Equals floor(n/3) unless 3 divides n.
  g.dealias_cut = (n - 1) / 3;
  return g;
}

}  // namespace fbq
