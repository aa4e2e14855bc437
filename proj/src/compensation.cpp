#include "ecl/compensation.hpp"

#include <spdlog/spdlog.h>

#include <sstream>
#include <string>

#include "ecl/error.hpp"
#include "ecl/quadrature.hpp"

namespace ecl {

namespace {

constexpr double kPi2 = kPi * kPi;

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void check_ratio_domain(double ratio) {
  if (!(std::isfinite(ratio) && ratio > kMinAmplitudeRatio)) {
    throw Error(ErrorKind::RatioOutOfDomain,
                "amplitude ratio " + num(ratio) + " is at or below exp(-pi^2/4) = " +
                    num(kMinAmplitudeRatio) +
                    "; the lift-off is beyond the range of the compensation");
  }
}

}  // namespace

void ReferenceCalibration::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Validation, what); };
  if (!(std::isfinite(delta_L_m) && delta_L_m > 0.0)) bad("calibration: delta_L_m must be > 0");
  if (!(std::isfinite(sigma) && sigma > 0.0)) bad("calibration: sigma must be > 0");
  if (!(std::isfinite(alpha0) && alpha0 > 0.0)) bad("calibration: alpha0 must be > 0");
  if (!(std::isfinite(reference_liftoff) && reference_liftoff >= 0.0))
    bad("calibration: reference_liftoff must be >= 0");
}

double approx_zero_crossing(double alpha0, const PlateProperties& plate) {
  if (plate.mu_r < 10.0) {
    spdlog::warn("approx_zero_crossing: mu_r = {} < 10, the high-permeability "
                 "approximation is inaccurate",
                 plate.mu_r);
  }
  return plate.mu_r * alpha0 * alpha0 / (kMu0 * plate.sigma);
}

double compensate_zero_crossing(double omega1, double ratio) {
  check_ratio_domain(ratio);
  return omega1 * (kPi2 / (kPi2 + 4.0 * std::log(ratio)));
}

double estimate_permeability(double omega0, const ReferenceCalibration& cal) {
  return kMu0 * cal.sigma * omega0 / (cal.alpha0 * cal.alpha0);
}

double estimate_liftoff(double ratio, double alpha0) {
  if (ratio > 1.0) {
    throw Error(ErrorKind::NegativeLiftoff,
                "amplitude ratio " + num(ratio) +
                    " exceeds 1: the signal grew relative to the reference");
  }
  check_ratio_domain(ratio);
  const double disc = kPi2 * kPi2 + 4.0 * kPi2 * std::log(ratio);
  return (kPi2 - std::sqrt(std::max(disc, 0.0))) / (4.0 * alpha0);
}

double revised_alpha0(double alpha0, double extra_liftoff) {
  if (alpha0 * extra_liftoff > 0.3) {
    spdlog::warn("revised_alpha0: alpha0 * l = {} exceeds 0.3, outside the "
                 "small lift-off regime",
                 alpha0 * extra_liftoff);
  }
  return alpha0 - 4.0 * alpha0 * alpha0 * extra_liftoff / kPi2;
}

SinusoidComparison compare_sinusoid(const CoilGeometry& geom, MutualFactor form,
                                    int samples) {
  SinusoidComparison out;
  const double a0 = find_alpha0(geom, form).value;
  const double peak = coil_kernel(a0, geom, form);
  auto normalised = [&](double a) { return a > 0.0 ? coil_kernel(a, geom, form) / peak : 0.0; };

  std::vector<double> breaks(17);
  for (std::size_t i = 0; i < breaks.size(); ++i)
    breaks[i] = 2.0 * a0 * static_cast<double>(i) / static_cast<double>(breaks.size() - 1);
  const auto area = quad::integrate_adaptive<double>(normalised, breaks, {1e-10, 0.0, 4000});
  if (!area.converged) {
    throw Error(ErrorKind::NonConvergence, "sinusoid check: kernel area did not converge");
  }
  out.alpha0 = a0;
  out.kernel_area = area.value;
  out.sinusoid_area = a0;
  out.discrepancy = std::abs(out.kernel_area - out.sinusoid_area) / out.kernel_area;

  if (samples >= 2) {
    out.alpha.resize(samples);
    out.kernel.resize(samples);
    out.sinusoid.resize(samples);
    for (int i = 0; i < samples; ++i) {
      const double a = 2.0 * a0 * i / (samples - 1);
      const double s = std::sin(a * kPi / (2.0 * a0));
      out.alpha[i] = a;
      out.kernel[i] = normalised(a);
      out.sinusoid[i] = s * s;
    }
  }
  return out;
}

double sinusoid_bessel_check(const CoilGeometry& geom, MutualFactor form) {
  return compare_sinusoid(geom, form, 0).discrepancy;
}

ReferenceCalibration make_calibration(const SpectralFeatures& reference,
                                      const CoilGeometry& geom, double sigma,
                                      Alpha0Convention convention,
                                      MutualFactor form) {
  const CoilGeometry at = convention == Alpha0Convention::ZeroLiftoff
                              ? geom.with_liftoff(0.0)
                              : geom;
  ReferenceCalibration cal;
  cal.delta_L_m = reference.plateau_amplitude;
  cal.reference_liftoff = geom.l0;
  cal.alpha0 = find_alpha0(at, form).value;
  cal.sigma = sigma;
  cal.reference_mode = reference.reference_mode;
  cal.validate();
  return cal;
}

CompensationResult run_compensation(const SpectralFeatures& features,
                                    const ReferenceCalibration& cal) {
  cal.validate();
  if (features.reference_mode != cal.reference_mode) {
    throw Error(ErrorKind::ModeMismatch,
                "features and calibration use different plateau modes");
  }
  if (!(features.plateau_amplitude > 0.0) || !(features.zero_crossing_hz > 0.0)) {
    throw Error(ErrorKind::Validation,
                "features: plateau amplitude and zero crossing must be > 0");
  }
  CompensationResult r;
  r.alpha0_used = cal.alpha0;
  r.amplitude_ratio = features.plateau_amplitude / cal.delta_L_m;
  r.omega1_measured = 2.0 * kPi * features.zero_crossing_hz;
  r.omega0 = compensate_zero_crossing(r.omega1_measured, r.amplitude_ratio);
  r.mu_r_est = estimate_permeability(r.omega0, cal);
  r.mu_r_uncompensated = estimate_permeability(r.omega1_measured, cal);
  r.liftoff_est = estimate_liftoff(r.amplitude_ratio, cal.alpha0);
  return r;
}

double calibrate_permeability_by_fit(const InductanceSpectrum& spec,
                                     const CoilGeometry& geom, double sigma,
                                     const FitOptions& opts) {
  spec.validate();
  if (!(std::isfinite(sigma) && sigma > 0.0))
    throw Error(ErrorKind::Validation, "fit: sigma must be > 0");
  if (!(opts.mu_lo >= 1.0 && opts.mu_hi > opts.mu_lo && opts.scan_points >= 3))
    throw Error(ErrorKind::Validation, "fit: invalid permeability bracket");

  std::vector<double> freqs;
  std::vector<std::complex<double>> measured;
  for (const auto& p : spec.points) {
    if (std::abs(p.delta_l) < opts.noise_floor) continue;
    freqs.push_back(p.freq_hz);
    measured.push_back(p.delta_l);
  }
  if (freqs.size() < 2 || freqs.back() / freqs.front() < 100.0 * (1.0 - 1e-9)) {
    throw Error(ErrorKind::Validation,
                "fit: the usable spectrum must span at least two decades");
  }

  const DoddDeedsModel model(geom, opts.forward);
  auto objective = [&](double mu_r) {
    const PlateProperties plate{sigma, mu_r};
    double ss = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i)
      ss += std::norm(model.delta_l(plate, freqs[i]) - measured[i]);
    return ss;
  };

  // Scan in log(mu_r) so the bracket covers four decades evenly.
  const int n = opts.scan_points;
  const double log_lo = std::log(opts.mu_lo);
  const double step = (std::log(opts.mu_hi) - log_lo) / (n - 1);
  std::vector<double> grid(n), values(n);
  std::size_t best = 0;
  for (int k = 0; k < n; ++k) {
    grid[k] = std::exp(log_lo + step * k);
    values[k] = objective(grid[k]);
    if (values[k] < values[best]) best = static_cast<std::size_t>(k);
  }
  int minima = 0;
  for (int k = 0; k < n; ++k) {
    const bool left = k == 0 || values[k] < values[k - 1];
    const bool right = k + 1 == n || values[k] <= values[k + 1];
    if (left && right) ++minima;
  }
  if (minima != 1) {
    throw Error(ErrorKind::FitDiverged,
                "fit: objective has " + std::to_string(minima) +
                    " local minima over the permeability scan");
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min<std::size_t>(best + 1, n - 1)];
  return quad::golden_section_min(objective, lo, hi, opts.rel_tol);
}

}  // namespace ecl
