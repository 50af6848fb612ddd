#include "netctl/quadrature.hpp"

#include "netctl/errors.hpp"

namespace netctl {

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) throw DimensionError("quadrature needs at least two samples");
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  const std::size_t intervals = n - 1;
  std::size_t even_end = intervals % 2 == 0 ? intervals : intervals - 3;
  double total = 0.0;
  if (even_end > 0) {
    double s = f[0] + f[even_end];
    for (std::size_t i = 1; i < even_end; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    total = s * h / 3.0;
  }
  if (even_end != intervals) {
    const std::size_t k = even_end;
    total += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
  }
  return total;
}

}  // namespace netctl
