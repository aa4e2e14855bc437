// Dodd-Deeds inductance change of a coaxial transmitter/receiver coil pair
// above a conducting, magnetic half-space.
//
//   dL(w) = K * Int_0^inf  P(a)^2 / a^6 * A(a) * phi(a, w)  da
//
// with P the radial Bessel moment of the winding, A the axial (lift-off)
// factor and phi the plate reflection coefficient. All lengths are metres,
// frequencies are hertz at the API boundary, and w = 2*pi*f internally.
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace ecl {

inline constexpr double kPi = std::numbers::pi;
/// Permeability of free space, H/m.
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;

struct CoilGeometry {
  double r1 = 11.4e-3;  ///< inner winding radius
  double r2 = 12.0e-3;  ///< outer winding radius
  double l0 = 0.8e-3;   ///< lift-off of the lower coil above the plate
  double h = 1.5e-3;    ///< axial height of each coil
  double g = 1.0e-3;    ///< axial gap between transmitter and receiver
  int n_turns = 20;     ///< turns per coil

  /// Throws ErrorKind::Validation naming the violated constraint.
  void validate() const;

  CoilGeometry with_liftoff(double liftoff) const;
  /// All five lengths multiplied by `s`.
  CoilGeometry scaled(double s) const;

  bool operator==(const CoilGeometry&) const = default;
};

struct PlateProperties {
  double sigma = 6.624e6;  ///< conductivity, S/m
  double mu_r = 125.2;     ///< relative permeability

  void validate() const;
  bool operator==(const PlateProperties&) const = default;
};

struct SpectrumPoint {
  double freq_hz = 0.0;
  std::complex<double> delta_l;  ///< henries

  bool operator==(const SpectrumPoint&) const = default;
};

/// Frequency-ordered inductance-change samples.
struct InductanceSpectrum {
  std::vector<SpectrumPoint> points;

  /// Frequencies strictly increasing and positive, all values finite.
  void validate() const;
  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
  bool operator==(const InductanceSpectrum&) const = default;
};

/// Characteristic spatial frequency of the coil, 1/m.
struct Alpha0 {
  double value = 0.0;
};

/// Axial factor of the mutual-inductance kernel.
///
/// DoddDeeds is the standard coil-pair term for two windings of height h
/// stacked with gap g:
///   exp(-a(2 l0 + h + g)) * (1 - exp(-a h))^2.
/// AsPrinted is the abbreviated form
///   exp(-a(2 l0 + h + g)) * (exp(-2 a h) + 1),
/// which has no interior maximum in a and therefore no usable alpha0; it
/// is kept for comparison only.
enum class MutualFactor { DoddDeeds, AsPrinted };

struct ForwardOptions {
  MutualFactor mutual = MutualFactor::DoddDeeds;
  double rel_tol = 1e-8;
  /// The integral is truncated once the plate-independent kernel stays
  /// below this fraction of its peak.
  double truncation = 1e-12;
  std::size_t max_intervals = 4000;
};

/// (mu_r a - a1) / (mu_r a + a1), a1 = sqrt(a^2 + j w sigma mu_r mu0).
std::complex<double> phi_kernel(double alpha, double omega,
                                const PlateProperties& plate);

/// Int_{a r1}^{a r2} x J1(x) dx.
double p_integral(double alpha, double r1, double r2);
double p_integral(double alpha, const CoilGeometry& geom);

double a_factor(double alpha, const CoilGeometry& geom,
                MutualFactor form = MutualFactor::DoddDeeds);

/// pi mu0 N^2 / (h^2 (r1 - r2)^2).
double k_factor(const CoilGeometry& geom);

/// Plate-independent kernel P(a)^2 A(a) / a^6.
double coil_kernel(double alpha, const CoilGeometry& geom,
                   MutualFactor form = MutualFactor::DoddDeeds);

/// Argmax of coil_kernel over a, located by a 512-point log scan of
/// [1e-2/r2, 1e3/r2] and golden-section refinement to 1e-6 relative.
/// Evaluated at geom.l0. Throws NonUnimodal when the scan finds separated
/// near-equal maxima, or when the maximum sits on the scan boundary.
Alpha0 find_alpha0(const CoilGeometry& geom,
                   MutualFactor form = MutualFactor::DoddDeeds);

/// Geometric frequency grid: start * 10^(k / ppd), k = 0.. while <= stop.
std::vector<double> log_frequency_grid(double start_hz, double stop_hz,
                                       int points_per_decade);

/// Forward model bound to one coil geometry. The plate-independent kernel
/// is memoised across evaluations, so reuse one instance for many
/// frequencies or plates. Thread-safe.
class DoddDeedsModel {
 public:
  explicit DoddDeedsModel(const CoilGeometry& geom, ForwardOptions opts = {});
  ~DoddDeedsModel();
  DoddDeedsModel(DoddDeedsModel&&) noexcept;
  DoddDeedsModel& operator=(DoddDeedsModel&&) noexcept;

  const CoilGeometry& geometry() const { return geom_; }
  const ForwardOptions& options() const { return opts_; }

  /// Complex inductance change in henries. freq_hz == 0 gives the static
  /// limit ((mu_r - 1)/(mu_r + 1)) * delta_l0(). Throws NonConvergence.
  std::complex<double> delta_l(const PlateProperties& plate,
                               double freq_hz) const;

  /// K * Int P^2 A / a^6 da, the plate-independent magnitude.
  double delta_l0() const;

  InductanceSpectrum spectrum(const PlateProperties& plate,
                              std::span<const double> freqs_hz) const;

  double kernel(double alpha) const;
  double alpha_max() const { return alpha_max_; }

 private:
  struct Cache;

  CoilGeometry geom_;
  ForwardOptions opts_;
  double k_ = 0.0;
  double alpha_max_ = 0.0;
  std::vector<double> breaks_;
  std::unique_ptr<Cache> cache_;
};

std::complex<double> delta_L(const CoilGeometry& geom,
                             const PlateProperties& plate, double freq_hz,
                             const ForwardOptions& opts = {});

double delta_L0_magnitude(const CoilGeometry& geom,
                          const ForwardOptions& opts = {});

InductanceSpectrum simulate_spectrum(const CoilGeometry& geom,
                                     const PlateProperties& plate,
                                     std::span<const double> freqs_hz,
                                     const ForwardOptions& opts = {});

}  // namespace ecl
