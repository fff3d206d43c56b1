// Ball volume and sphere area as functions of a continuous dimension, and
// where each one peaks.

#include <cstdio>

#include "cdim/gamma.hpp"
#include "cdim/radial_measure.hpp"

namespace {

// Golden-section search for the maximum of f on [lo, hi].
template <class F>
double argmax(F f, double lo, double hi) {
  const double g = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  while (b - a > 1e-12) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

int main() {
  std::printf("%6s %22s %22s\n", "x", "V(x)", "omega(x)");
  for (double x = 0.5; x <= 20.0; x += 0.5)
    std::printf("%6.1f %22.17g %22.17g\n", x, cdim::ball_volume(x), cdim::sphere_area(x));

  const double xv = argmax([](double x) { return cdim::ln_ball_volume(x); }, 1.0, 10.0);
  const double xs = argmax([](double x) { return cdim::ln_coefficient(x); }, 1.0, 10.0);
  std::printf("\nV peaks at x = %.6f, V = %.17g\n", xv, cdim::ball_volume(xv));
  std::printf("omega peaks at x = %.6f, omega = %.17g\n", xs, cdim::sphere_area(xs));
}
