#include "ecl/quadrature.hpp"

namespace ecl::quad {

namespace {
constexpr double kInvPhi = 0.6180339887498948482;  // (sqrt(5) - 1) / 2

template <typename Better>
double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double rel_tol, Better better) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while ((b - a) > rel_tol * 0.5 * std::abs(a + b)) {
    if (better(fc, fd)) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    if (b - a <= 0.0) break;
  }
  return 0.5 * (a + b);
}
}  // namespace

double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol) {
  return golden_section(f, lo, hi, rel_tol,
                        [](double x, double y) { return x > y; });
}

double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol) {
  return golden_section(f, lo, hi, rel_tol,
                        [](double x, double y) { return x < y; });
}

}  // namespace ecl::quad
