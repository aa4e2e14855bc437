// End-to-end lift-off ladder: simulate one spectrum per lift-off, extract
// features, calibrate on the lowest lift-off and compensate every rung.
#pragma once

#include <array>
#include <vector>

#include "ecl/compensation.hpp"
#include "ecl/features.hpp"
#include "ecl/forward_model.hpp"

namespace ecl {

struct LadderConfig {
  CoilGeometry geometry;  ///< geometry.l0 is ignored; rungs set it
  PlateProperties plate;
  std::vector<double> liftoffs;  ///< m, at least one
  std::vector<double> freqs_hz;
  FeatureOptions features;
  Alpha0Convention alpha0_convention = Alpha0Convention::ZeroLiftoff;
  ForwardOptions forward;
};

struct LadderRow {
  double liftoff = 0.0;
  SpectralFeatures features;
  CompensationResult result;
};

struct LadderRun {
  ReferenceCalibration calibration;
  std::vector<LadderRow> rows;  ///< in ascending lift-off order
  std::vector<InductanceSpectrum> spectra;
};

LadderRun run_liftoff_ladder(const LadderConfig& cfg);

/// The eight-rung benchmark ladder (metres) for the default coil.
inline constexpr std::array<double, 8> kBenchmarkLiftoffs = {
    0.8e-3, 2.3e-3, 2.8e-3, 3.3e-3, 3.8e-3, 4.3e-3, 4.8e-3, 5.3e-3};

struct ReferenceRow {
  double liftoff_mm;
  double uncompensated_mu_r;
  double compensated_mu_r;
};

/// Published permeability estimates for the benchmark ladder (plate with
/// mu_r = 125.2, sigma = 6.624 MS/m, default coil).
inline constexpr std::array<ReferenceRow, 8> kReferenceTable = {{
    {0.8, 120.179393, 120.179393},
    {2.3, 98.6480926, 119.101695},
    {2.8, 89.1353189, 118.210084},
    {3.3, 82.2564103, 117.333333},
    {3.8, 76.104979, 115.942384},
    {4.3, 72.5428571, 116.286711},
    {4.8, 69.8668867, 116.800415},
    {5.3, 68.6025918, 117.259734},
}};

}  // namespace ecl
