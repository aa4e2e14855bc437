#include "ecl/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ecl/error.hpp"

namespace ecl {

namespace {

// sqrt(10), padded so log-grid points landing on the band edge are kept.
constexpr double kHalfDecade = 3.1622776601683795 * (1.0 + 1e-9);
constexpr std::size_t kMinPlateauPoints = 3;

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double upper = v[n / 2];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lower + upper);
}

std::string fmt_hz(double f) {
  std::ostringstream os;
  os.precision(17);
  os << f;
  return os.str();
}

}  // namespace

void ImpedanceSweep::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(std::isfinite(p.freq_hz) && p.freq_hz > 0.0) ||
        !std::isfinite(p.z.real()) || !std::isfinite(p.z.imag())) {
      throw Error(ErrorKind::Validation,
                  "impedance sweep: invalid value at index " + std::to_string(i));
    }
    if (i > 0 && !(p.freq_hz > points[i - 1].freq_hz)) {
      throw Error(ErrorKind::Validation,
                  "impedance sweep: frequencies not strictly increasing at index " +
                      std::to_string(i));
    }
  }
}

InductanceSpectrum impedance_to_inductance(const ImpedanceSweep& sample,
                                           const ImpedanceSweep& air) {
  sample.validate();
  air.validate();
  const std::size_t n = std::min(sample.points.size(), air.points.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (sample.points[i].freq_hz != air.points[i].freq_hz) {
      throw Error(ErrorKind::GridMismatch,
                  "frequency grids differ at index " + std::to_string(i) +
                      ": sample " + fmt_hz(sample.points[i].freq_hz) +
                      " Hz vs air " + fmt_hz(air.points[i].freq_hz) + " Hz");
    }
  }
  if (sample.points.size() != air.points.size()) {
    throw Error(ErrorKind::GridMismatch,
                "frequency grids differ in length: sample " +
                    std::to_string(sample.points.size()) + " vs air " +
                    std::to_string(air.points.size()));
  }
  using namespace std::complex_literals;
  InductanceSpectrum out;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = sample.points[i].freq_hz;
    const std::complex<double> dz = sample.points[i].z - air.points[i].z;
    out.points.push_back({f, dz / (2.0i * kPi * f)});
  }
  return out;
}

std::vector<std::complex<double>> inductance_to_impedance_change(
    const InductanceSpectrum& spec) {
  using namespace std::complex_literals;
  std::vector<std::complex<double>> out;
  out.reserve(spec.points.size());
  for (const auto& p : spec.points) out.push_back(2.0i * kPi * p.freq_hz * p.delta_l);
  return out;
}

ZeroCrossing locate_zero_crossing(const InductanceSpectrum& spec,
                                  double noise_floor) {
  std::vector<const SpectrumPoint*> usable;
  usable.reserve(spec.points.size());
  for (const auto& p : spec.points) {
    if (std::abs(p.delta_l) < noise_floor) continue;
    if (p.delta_l.real() == 0.0) continue;
    usable.push_back(&p);
  }
  if (usable.size() < 2) {
    throw Error(ErrorKind::NoZeroCrossing,
                "zero_crossing: fewer than 2 points above the noise floor");
  }
  int crossings = 0;
  ZeroCrossing found;
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    const auto& a = *usable[i];
    const auto& b = *usable[i + 1];
    if (!(a.delta_l.real() > 0.0 && b.delta_l.real() < 0.0)) continue;
    if (++crossings > 1) continue;
    const double xa = std::log(a.freq_hz);
    const double xb = std::log(b.freq_hz);
    const double t = a.delta_l.real() / (a.delta_l.real() - b.delta_l.real());
    found.freq_hz = std::exp(xa + t * (xb - xa));
    found.bracket = {a.freq_hz, b.freq_hz};
  }
  if (crossings == 0) {
    throw Error(ErrorKind::NoZeroCrossing,
                "zero_crossing: Re(dL) never changes sign from + to -");
  }
  if (crossings > 1) {
    throw Error(ErrorKind::MultipleCrossings,
                "zero_crossing: " + std::to_string(crossings) +
                    " sign changes from + to -; consider raising the noise floor");
  }
  // exp/log rounding can land on a bracket end when the sign change is
  // right next to a sample.
  found.freq_hz = std::clamp(found.freq_hz, std::nextafter(found.bracket.first, HUGE_VAL),
                             std::nextafter(found.bracket.second, 0.0));
  return found;
}

double zero_crossing(const InductanceSpectrum& spec, double noise_floor) {
  return locate_zero_crossing(spec, noise_floor).freq_hz;
}

double plateau_amplitude(const InductanceSpectrum& spec, ReferenceMode mode,
                         double cutoff_hz) {
  std::vector<double> band;
  if (!spec.points.empty()) {
    if (mode == ReferenceMode::LowFrequencyPlateau) {
      const double top = spec.points.front().freq_hz * kHalfDecade;
      for (const auto& p : spec.points) {
        if (p.freq_hz > top) break;
        band.push_back(std::abs(p.delta_l.real()));
      }
    } else {
      auto last = std::find_if(spec.points.rbegin(), spec.points.rend(),
                               [&](const SpectrumPoint& p) { return p.freq_hz <= cutoff_hz; });
      if (last != spec.points.rend()) {
        const double bottom = last->freq_hz / kHalfDecade;
        for (auto it = last; it != spec.points.rend() && it->freq_hz >= bottom; ++it)
          band.push_back(std::abs(it->delta_l.real()));
      }
    }
  }
  if (band.size() < kMinPlateauPoints) {
    throw Error(ErrorKind::InsufficientPlateau,
                "plateau_amplitude: " + std::to_string(band.size()) +
                    " points in the plateau band, need at least 3");
  }
  return median(std::move(band));
}

SpectralFeatures extract_features(const InductanceSpectrum& spec,
                                  const FeatureOptions& opts) {
  spec.validate();
  if (!(opts.noise_floor >= 0.0) || !(opts.cutoff_hz > 0.0)) {
    throw Error(ErrorKind::Validation,
                "features: noise_floor must be >= 0 and cutoff_hz > 0");
  }
  InductanceSpectrum kept;
  for (const auto& p : spec.points)
    if (p.freq_hz <= opts.cutoff_hz) kept.points.push_back(p);

  const auto zc = locate_zero_crossing(kept, opts.noise_floor);
  SpectralFeatures out;
  out.zero_crossing_hz = zc.freq_hz;
  out.crossing_bracket = zc.bracket;
  out.reference_mode = opts.mode;
  out.plateau_amplitude = plateau_amplitude(kept, opts.mode, opts.cutoff_hz);
  if (!(out.plateau_amplitude > 0.0)) {
    throw Error(ErrorKind::InsufficientPlateau,
                "features: plateau amplitude is zero");
  }
  return out;
}

double noise_floor_from_air(const ImpedanceSweep& air) {
  air.validate();
  if (air.points.empty()) return 0.0;
  using namespace std::complex_literals;
  const double top = air.points.front().freq_hz * kHalfDecade;
  std::vector<ImpedancePoint> band;
  for (const auto& p : air.points) {
    if (p.freq_hz > top) break;
    band.push_back(p);
  }
  if (band.size() < 3) return 0.0;
  // Least-squares R + j w L for the bare coil, then the scatter about it
  // expressed in henries.
  double r = 0.0, num = 0.0, den = 0.0;
  for (const auto& p : band) {
    const double w = 2.0 * kPi * p.freq_hz;
    r += p.z.real();
    num += w * p.z.imag();
    den += w * w;
  }
  r /= static_cast<double>(band.size());
  const double l = num / den;
  double ss = 0.0;
  for (const auto& p : band) {
    const double w = 2.0 * kPi * p.freq_hz;
    ss += std::norm((p.z - std::complex<double>(r, w * l)) / w);
  }
  return 3.0 * std::sqrt(ss / static_cast<double>(band.size() - 2));
}

}  // namespace ecl
