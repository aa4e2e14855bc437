// Lift-off compensation of the zero-crossing frequency and the resulting
// permeability and lift-off estimates.
//
// With the coil kernel approximated by dL_m exp(-2 a0 l) sin^2(a pi / 2 a0),
// a lift-off increase l shifts the kernel peak to a0 - 4 a0^2 l / pi^2 and
// scales the plateau amplitude by r = dL_0 / dL_m. Solving for the
// reference-lift-off crossing gives
//
//   w0 = pi^2 w1 / (pi^2 + 4 ln r),   mu_r = mu0 sigma w0 / a0^2,
//   a0 l = (pi^2 - sqrt(pi^4 + 4 pi^2 ln r)) / 4.
//
// Both are defined only for r > exp(-pi^2 / 4).
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ecl/features.hpp"
#include "ecl/forward_model.hpp"

namespace ecl {

/// Lower bound (exclusive) of the admissible amplitude ratio, exp(-pi^2/4).
inline const double kMinAmplitudeRatio = std::exp(-kPi * kPi / 4.0);

struct ReferenceCalibration {
  double delta_L_m = 0.0;          ///< plateau amplitude at the reference, H
  double reference_liftoff = 0.0;  ///< m
  double alpha0 = 0.0;             ///< 1/m
  double sigma = 0.0;              ///< S/m
  ReferenceMode reference_mode = ReferenceMode::LowFrequencyPlateau;

  void validate() const;
  bool operator==(const ReferenceCalibration&) const = default;
};

struct CompensationResult {
  double omega0 = 0.0;             ///< compensated zero crossing, rad/s
  double mu_r_est = 0.0;           ///< from omega0
  double mu_r_uncompensated = 0.0; ///< from omega1
  double liftoff_est = 0.0;        ///< m above the reference lift-off
  double amplitude_ratio = 0.0;    ///< dL_0 / dL_m
  double alpha0_used = 0.0;        ///< 1/m
  double omega1_measured = 0.0;    ///< rad/s

  bool operator==(const CompensationResult&) const = default;
};

/// Which lift-off the characteristic frequency of a calibration is taken at.
enum class Alpha0Convention { ZeroLiftoff, ReferenceLiftoff };

/// mu_r a0^2 / (mu0 sigma), rad/s. Logs a warning below mu_r = 10 where
/// the 1/mu_r^2 neglect stops being small.
double approx_zero_crossing(double alpha0, const PlateProperties& plate);

/// pi^2 w1 / (pi^2 + 4 ln ratio). Throws RatioOutOfDomain for
/// ratio <= exp(-pi^2/4).
double compensate_zero_crossing(double omega1, double ratio);

/// mu0 sigma w0 / a0^2.
double estimate_permeability(double omega0, const ReferenceCalibration& cal);

/// Lift-off above the reference from the amplitude ratio; the smaller root
/// of 4 (a0 l)^2 - 2 pi^2 (a0 l) - pi^2 ln r = 0. Throws NegativeLiftoff for
/// ratio > 1 and RatioOutOfDomain for ratio <= exp(-pi^2/4).
double estimate_liftoff(double ratio, double alpha0);

/// a0 - 4 a0^2 l / pi^2.
double revised_alpha0(double alpha0, double extra_liftoff);

struct SinusoidComparison {
  double alpha0 = 0.0;
  double kernel_area = 0.0;    ///< Int_0^{2 a0} kernel / peak
  double sinusoid_area = 0.0;  ///< Int_0^{2 a0} sin^2(a pi / 2 a0) = a0
  double discrepancy = 0.0;    ///< |kernel_area - sinusoid_area| / kernel_area
  std::vector<double> alpha;   ///< sample abscissae over [0, 2 a0]
  std::vector<double> kernel;  ///< peak-normalised kernel at alpha
  std::vector<double> sinusoid;
};

SinusoidComparison compare_sinusoid(const CoilGeometry& geom,
                                    MutualFactor form = MutualFactor::DoddDeeds,
                                    int samples = 201);

/// Relative area discrepancy of the sin^2 surrogate on [0, 2 a0].
double sinusoid_bessel_check(const CoilGeometry& geom,
                             MutualFactor form = MutualFactor::DoddDeeds);

/// Calibration from features measured at the reference lift-off geom.l0.
ReferenceCalibration make_calibration(const SpectralFeatures& reference,
                                      const CoilGeometry& geom, double sigma,
                                      Alpha0Convention convention = Alpha0Convention::ZeroLiftoff,
                                      MutualFactor form = MutualFactor::DoddDeeds);

/// ratio -> compensated crossing -> permeability and lift-off.
/// Throws ModeMismatch when features and calibration use different plateau
/// modes.
CompensationResult run_compensation(const SpectralFeatures& features,
                                    const ReferenceCalibration& cal);

struct FitOptions {
  double mu_lo = 1.0;
  double mu_hi = 1e4;
  int scan_points = 49;
  double rel_tol = 1e-4;
  double noise_floor = 0.0;  ///< measured points with |dL| below are ignored
  ForwardOptions forward;
};

/// One-parameter least squares over mu_r:
///   min sum |dL_model(f; mu_r) - dL_measured(f)|^2
/// by a log-spaced scan of [mu_lo, mu_hi] followed by golden section.
/// Throws FitDiverged when the scanned objective has several local minima.
double calibrate_permeability_by_fit(const InductanceSpectrum& spec,
                                     const CoilGeometry& geom, double sigma,
                                     const FitOptions& opts = {});

}  // namespace ecl
