// Objectives for the plug-in tests; loaded with dlopen.
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

extern "C" {

// sum_i (x_i - 0.25)^2, noise free.
int quadratic(const double* x, std::size_t dim, std::uint64_t, double* y, void*) {
  double s = 0.0;
  for (std::size_t i = 0; i < dim; ++i) s += (x[i] - 0.25) * (x[i] - 0.25);
  *y = s;
  return 0;
}

// Reports failure on every call.
int always_fails(const double*, std::size_t, std::uint64_t, double*, void*) { return 1; }

// Claims success but returns NaN.
int returns_nan(const double*, std::size_t, std::uint64_t, double* y, void*) {
  *y = std::numeric_limits<double>::quiet_NaN();
  return 0;
}
}
