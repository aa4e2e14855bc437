// Text formats.
//
// Sweep CSV: a header row naming the columns, then one row per frequency.
//   inductance: freq_hz,re_dL_H,im_dL_H
//   impedance:  freq_hz,re_z_ohm,im_z_ohm
// Lines starting with '#' and blank lines are ignored. Numbers are written
// with 17 significant digits.
//
// Config, calibration and report documents are JSON, SI units throughout.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ecl/compensation.hpp"
#include "ecl/features.hpp"
#include "ecl/forward_model.hpp"
#include "ecl/ladder.hpp"

namespace ecl {

struct FrequencyGrid {
  double start_hz = 1.0;
  double stop_hz = 1e6;
  int points_per_decade = 40;

  std::vector<double> frequencies() const;
  bool operator==(const FrequencyGrid&) const = default;
};

struct RunConfig {
  CoilGeometry geometry;
  std::optional<PlateProperties> plate;
  FrequencyGrid grid;
  /// Unset means "per data source": low-frequency plateau for simulated
  /// spectra, high-frequency plateau for measured impedance sweeps.
  std::optional<ReferenceMode> reference_mode;
  double cutoff_hz = 500e3;
  double noise_floor = 0.0;
  std::optional<ReferenceCalibration> calibration;
  MutualFactor mutual = MutualFactor::DoddDeeds;
  Alpha0Convention alpha0_convention = Alpha0Convention::ZeroLiftoff;

  /// Throws ErrorKind::Validation naming the field.
  void validate() const;
  FeatureOptions feature_options(ReferenceMode fallback) const;
  bool operator==(const RunConfig&) const = default;
};

struct Report {
  std::string software_version;
  std::string timestamp;
  std::string source;  ///< where the spectrum came from
  RunConfig config;
  ReferenceCalibration calibration;
  SpectralFeatures features;
  CompensationResult result;
};

using Sweep = std::variant<ImpedanceSweep, InductanceSpectrum>;

/// Throws Parse (with line number), Schema (missing/unknown column) or
/// DuplicateFrequency. Rows are sorted by frequency.
Sweep parse_sweep_csv(std::string_view text);
InductanceSpectrum parse_spectrum_csv(std::string_view text);
ImpedanceSweep parse_impedance_csv(std::string_view text);

std::string write_spectrum_csv(const InductanceSpectrum& spec);
std::string write_impedance_csv(const ImpedanceSweep& sweep);

/// freq_hz,re_dL_H,im_dL_H,masked; masked = 1 for points the feature
/// extractor ignores (above the cutoff or below the noise floor).
std::string write_plot_csv(const InductanceSpectrum& spec, const FeatureOptions& opts);

RunConfig parse_config(std::string_view text);
std::string write_config(const RunConfig& cfg);

ReferenceCalibration parse_calibration(std::string_view text);
std::string write_calibration(const ReferenceCalibration& cal);

std::string write_features(const SpectralFeatures& f);
SpectralFeatures parse_features(std::string_view text);

std::string write_report(const Report& report);
Report parse_report(std::string_view text);

/// One row per rung: lift-off, actual/uncompensated/compensated mu_r and
/// both relative errors in percent.
std::string write_ladder_csv(const LadderRun& run, double actual_mu_r);

std::string_view reference_mode_name(ReferenceMode mode);
ReferenceMode parse_reference_mode(std::string_view name);

}  // namespace ecl
