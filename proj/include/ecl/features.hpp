// Spectral feature extraction: zero-crossing frequency of Re(dL), plateau
// amplitudes, and impedance-to-inductance conversion.
#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "ecl/forward_model.hpp"

namespace ecl {

enum class ReferenceMode { LowFrequencyPlateau, HighFrequencyPlateau };

struct ImpedancePoint {
  double freq_hz = 0.0;
  std::complex<double> z;  ///< ohms

  bool operator==(const ImpedancePoint&) const = default;
};

struct ImpedanceSweep {
  std::vector<ImpedancePoint> points;
  bool is_air_reference = false;

  void validate() const;
  bool operator==(const ImpedanceSweep&) const = default;
};

struct FeatureOptions {
  ReferenceMode mode = ReferenceMode::LowFrequencyPlateau;
  double cutoff_hz = 500e3;
  double noise_floor = 0.0;  ///< henries; points with |dL| below are ignored
};

struct SpectralFeatures {
  double zero_crossing_hz = 0.0;
  double plateau_amplitude = 0.0;
  ReferenceMode reference_mode = ReferenceMode::LowFrequencyPlateau;
  std::pair<double, double> crossing_bracket{0.0, 0.0};
};

/// dL(f) = (Z(f) - Z_air(f)) / (j 2 pi f). Throws GridMismatch unless both
/// sweeps carry bit-identical frequency grids.
InductanceSpectrum impedance_to_inductance(const ImpedanceSweep& sample,
                                           const ImpedanceSweep& air);

/// Inverse of impedance_to_inductance for the difference only:
/// dZ(f) = j 2 pi f dL(f).
std::vector<std::complex<double>> inductance_to_impedance_change(
    const InductanceSpectrum& spec);

struct ZeroCrossing {
  double freq_hz = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
};

/// Locates the single + to - transition of Re(dL) scanning upward in
/// frequency, skipping points with |dL| < noise_floor (and exact zeros).
/// The crossing is interpolated linearly in (log f, Re dL).
ZeroCrossing locate_zero_crossing(const InductanceSpectrum& spec,
                                  double noise_floor);

double zero_crossing(const InductanceSpectrum& spec, double noise_floor);

/// Median |Re(dL)| over the lowest half-decade of the grid, or over the
/// highest half-decade at or below cutoff_hz.
double plateau_amplitude(const InductanceSpectrum& spec, ReferenceMode mode,
                         double cutoff_hz);

/// Both extractors on the spectrum truncated at opts.cutoff_hz.
SpectralFeatures extract_features(const InductanceSpectrum& spec,
                                  const FeatureOptions& opts = {});

/// 3 x the scatter, in henries, of the air sweep about a least-squares
/// R + j w L fit over its lowest half-decade. Default noise floor for
/// measured data.
double noise_floor_from_air(const ImpedanceSweep& air);

}  // namespace ecl
