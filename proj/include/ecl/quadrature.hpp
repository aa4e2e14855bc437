// Numerical primitives: Gauss-Kronrod quadrature with a global adaptive
// driver, and golden-section search.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

namespace ecl::quad {

/// Abscissae (positive half, centre last) and weights of the 21-point
/// Kronrod rule and its embedded 10-point Gauss rule, from QUADPACK qk21.
struct Kronrod21 {
  static constexpr std::array<double, 11> xgk = {
      0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
      0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
      0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
      0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
      0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
      0.0};
  static constexpr std::array<double, 11> wgk = {
      0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
      0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
      0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
      0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
      0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
      0.149445554002916905664936468389821};
  static constexpr std::array<double, 5> wg = {
      0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
      0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
      0.295524224714752870173892994651338};
};

template <typename T>
struct RuleResult {
  T kronrod{};
  T gauss{};
};

/// Single 21-point Gauss-Kronrod panel on [a, b].
template <typename T, typename F>
RuleResult<T> gk21(F&& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T resk = fc * Kronrod21::wgk[10];
  T resg{};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * Kronrod21::xgk[j];
    const T fsum = f(centre - dx) + f(centre + dx);
    resk += fsum * Kronrod21::wgk[j];
    // Odd positions (1, 3, ..., 9) are the embedded Gauss nodes.
    if (j % 2 == 1) resg += fsum * Kronrod21::wg[j / 2];
  }
  return {resk * half, resg * half};
}

template <typename T>
struct AdaptiveResult {
  T value{};
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

/// Globally adaptive integration over an initial partition `breaks`
/// (strictly increasing, at least two points). The interval with the
/// largest |K21 - G10| estimate is bisected until the summed estimate
/// drops below max(abs_tol, rel_tol * |I|) or the interval budget runs out.
template <typename T, typename F>
AdaptiveResult<T> integrate_adaptive(F&& f, const std::vector<double>& breaks,
                                     const AdaptiveOptions& opts = {}) {
  struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  std::priority_queue<Panel> heap;
  T total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto r = gk21<T>(f, breaks[i], breaks[i + 1]);
    const double err = magnitude(r.kronrod - r.gauss);
    heap.push({breaks[i], breaks[i + 1], r.kronrod, err});
    total += r.kronrod;
    total_err += err;
  }

  AdaptiveResult<T> out;
  auto done = [&] {
    return total_err <= std::max(opts.abs_tol, opts.rel_tol * magnitude(total));
  };
  while (!done() && heap.size() < opts.max_intervals) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);  // cannot bisect further in double precision
      break;
    }
    const auto left = gk21<T>(f, worst.a, mid);
    const auto right = gk21<T>(f, mid, worst.b);
    const double el = magnitude(left.kronrod - left.gauss);
    const double er = magnitude(right.kronrod - right.gauss);
    total += left.kronrod + right.kronrod - worst.value;
    total_err += el + er - worst.error;
    heap.push({worst.a, mid, left.kronrod, el});
    heap.push({mid, worst.b, right.kronrod, er});
  }

  // Re-sum from the panels to shed the running-update rounding.
  out.intervals = heap.size();
  T sum{};
  double err = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = sum;
  out.error = err;
  out.converged = err <= std::max(opts.abs_tol, opts.rel_tol * magnitude(sum));
  return out;
}

/// Golden-section search for a maximum of a unimodal function on [lo, hi].
/// Stops when the bracket width falls below rel_tol times its midpoint.
double golden_section_max(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol);

/// Same, for a minimum.
double golden_section_min(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol);

}  // namespace ecl::quad
