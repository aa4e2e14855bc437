#include "ecl/forward_model.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <string>
#include <unordered_map>

#include "ecl/error.hpp"
#include "ecl/quadrature.hpp"

namespace ecl {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Validation, what);
}

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

constexpr int kScanPoints = 512;

std::vector<double> alpha_scan_grid(double r2) {
  const double lo = 1e-2 / r2;
  const double hi = 1e3 / r2;
  const double step = std::log(hi / lo) / (kScanPoints - 1);
  std::vector<double> grid(kScanPoints);
  for (int k = 0; k < kScanPoints; ++k) grid[k] = lo * std::exp(step * k);
  return grid;
}

}  // namespace

void CoilGeometry::validate() const {
  require(finite_all({r1, r2, l0, h, g}), "geometry: lengths must be finite");
  require(r1 > 0.0 && r1 < r2, "geometry: radii must satisfy 0 < r1 < r2");
  require(h > 0.0, "geometry: coil height h must be > 0");
  require(g >= 0.0, "geometry: gap g must be >= 0");
  require(l0 >= 0.0, "geometry: lift-off l0 must be >= 0");
  require(n_turns >= 1, "geometry: n_turns must be >= 1");
}

CoilGeometry CoilGeometry::with_liftoff(double liftoff) const {
  CoilGeometry out = *this;
  out.l0 = liftoff;
  return out;
}

CoilGeometry CoilGeometry::scaled(double s) const {
  CoilGeometry out = *this;
  out.r1 *= s;
  out.r2 *= s;
  out.l0 *= s;
  out.h *= s;
  out.g *= s;
  return out;
}

void PlateProperties::validate() const {
  require(std::isfinite(sigma) && sigma > 0.0, "plate: sigma must be > 0");
  require(std::isfinite(mu_r) && mu_r >= 1.0, "plate: mu_r must be >= 1");
}

void InductanceSpectrum::validate() const {
  double prev = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(std::isfinite(p.freq_hz) && p.freq_hz > 0.0) ||
        !std::isfinite(p.delta_l.real()) || !std::isfinite(p.delta_l.imag())) {
      throw Error(ErrorKind::Validation,
                  "spectrum: non-finite or non-positive value at index " +
                      std::to_string(i));
    }
    if (i > 0 && !(p.freq_hz > prev)) {
      throw Error(ErrorKind::Validation,
                  "spectrum: frequencies not strictly increasing at index " +
                      std::to_string(i));
    }
    prev = p.freq_hz;
  }
}

std::complex<double> phi_kernel(double alpha, double omega,
                                const PlateProperties& plate) {
  using namespace std::complex_literals;
  const double mu_alpha = plate.mu_r * alpha;
  const std::complex<double> alpha1 =
      std::sqrt(alpha * alpha + 1i * (omega * plate.sigma * plate.mu_r * kMu0));
  return (mu_alpha - alpha1) / (mu_alpha + alpha1);
}

double p_integral(double alpha, double r1, double r2) {
  const double a = alpha * r1;
  const double b = alpha * r2;
  if (a == b) return 0.0;
  // Panels of at most one unit in x keep the 21-point rule at full precision.
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a))));
  const double width = (b - a) / panels;
  auto integrand = [](double x) { return x * ::j1(x); };
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == panels) ? b : lo + width;
    sum += quad::gk21<double>(integrand, lo, hi).kronrod;
  }
  return sum;
}

double p_integral(double alpha, const CoilGeometry& geom) {
  return p_integral(alpha, geom.r1, geom.r2);
}

double a_factor(double alpha, const CoilGeometry& geom, MutualFactor form) {
  const double decay = std::exp(-alpha * (2.0 * geom.l0 + geom.h + geom.g));
  switch (form) {
    case MutualFactor::DoddDeeds: {
      const double w = -std::expm1(-alpha * geom.h);
      return decay * w * w;
    }
    case MutualFactor::AsPrinted:
      return decay * (std::exp(-2.0 * alpha * geom.h) + 1.0);
  }
  return 0.0;
}

double k_factor(const CoilGeometry& geom) {
  const double n = geom.n_turns;
  const double dr = geom.r1 - geom.r2;
  return kPi * kMu0 * n * n / (geom.h * geom.h * dr * dr);
}

double coil_kernel(double alpha, const CoilGeometry& geom, MutualFactor form) {
  const double p = p_integral(alpha, geom) / (alpha * alpha * alpha);
  return p * p * a_factor(alpha, geom, form);
}

Alpha0 find_alpha0(const CoilGeometry& geom, MutualFactor form) {
  geom.validate();
  const auto grid = alpha_scan_grid(geom.r2);
  std::vector<double> values(grid.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = coil_kernel(grid[k], geom, form);
    if (values[k] > values[best]) best = k;
  }
  if (best == 0 || best + 1 == grid.size()) {
    std::ostringstream msg;
    msg << "find_alpha0: kernel maximum lies on the scan boundary (alpha = "
        << grid[best] << " 1/m); no interior characteristic frequency";
    throw Error(ErrorKind::NonUnimodal, msg.str());
  }
  int near_peaks = 0;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const bool peak = values[k] > values[k - 1] && values[k] >= values[k + 1];
    if (peak && values[k] >= 0.99 * values[best]) ++near_peaks;
  }
  if (near_peaks > 1) {
    throw Error(ErrorKind::NonUnimodal,
                "find_alpha0: " + std::to_string(near_peaks) +
                    " separated maxima within 1% of the global peak");
  }
  const double alpha = quad::golden_section_max(
      [&](double a) { return coil_kernel(a, geom, form); }, grid[best - 1],
      grid[best + 1], 1e-6);
  return Alpha0{alpha};
}

std::vector<double> log_frequency_grid(double start_hz, double stop_hz,
                                       int points_per_decade) {
  require(std::isfinite(start_hz) && start_hz > 0.0,
          "grid: start must be > 0");
  require(std::isfinite(stop_hz) && stop_hz > start_hz,
          "grid: stop must be > start");
  require(points_per_decade >= 1, "grid: points_per_decade must be >= 1");
  const double decades = std::log10(stop_hz / start_hz);
  const auto n =
      static_cast<std::size_t>(std::floor(decades * points_per_decade + 1e-9)) + 1;
  const double log_start = std::log10(start_hz);
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid[k] = std::pow(10.0, log_start + static_cast<double>(k) / points_per_decade);
  }
  return grid;
}

struct DoddDeedsModel::Cache {
  std::mutex mutex;
  std::unordered_map<double, double> kernel;
  std::once_flag l0_once;
  double l0 = 0.0;
};

DoddDeedsModel::DoddDeedsModel(const CoilGeometry& geom, ForwardOptions opts)
    : geom_(geom), opts_(opts), cache_(std::make_unique<Cache>()) {
  geom_.validate();
  k_ = k_factor(geom_);

  const auto grid = alpha_scan_grid(geom_.r2);
  std::size_t best = 0;
  double peak = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = coil_kernel(grid[k], geom_, opts_.mutual);
    if (v > peak) {
      peak = v;
      best = k;
    }
  }
  const double threshold = opts_.truncation * peak;
  const double step = 0.25 / geom_.r2;
  // Two J1 periods below threshold before giving up on a late lobe.
  const double quiet_span = 4.0 * kPi / geom_.r1;
  const double hard_cap = 1e6 / geom_.r2;
  double last_above = grid[best];
  for (double a = grid[best]; a < hard_cap; a += step) {
    if (coil_kernel(a, geom_, opts_.mutual) >= threshold) last_above = a;
    if (a - last_above > quiet_span) break;
  }
  alpha_max_ = last_above + 2.0 * kPi / geom_.r1;

  const double width = std::min(kPi / (2.0 * geom_.r2),
                                1.0 / (2.0 * geom_.l0 + 2.0 * geom_.h + geom_.g));
  const auto panels = static_cast<std::size_t>(std::ceil(alpha_max_ / width));
  breaks_.resize(panels + 1);
  for (std::size_t i = 0; i <= panels; ++i)
    breaks_[i] = alpha_max_ * static_cast<double>(i) / static_cast<double>(panels);
}

DoddDeedsModel::~DoddDeedsModel() = default;
DoddDeedsModel::DoddDeedsModel(DoddDeedsModel&&) noexcept = default;
DoddDeedsModel& DoddDeedsModel::operator=(DoddDeedsModel&&) noexcept = default;

double DoddDeedsModel::kernel(double alpha) const {
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->kernel.find(alpha); it != cache_->kernel.end())
      return it->second;
  }
  const double v = coil_kernel(alpha, geom_, opts_.mutual);
  std::lock_guard lock(cache_->mutex);
  cache_->kernel.emplace(alpha, v);
  return v;
}

double DoddDeedsModel::delta_l0() const {
  std::call_once(cache_->l0_once, [this] {
    quad::AdaptiveOptions qo{opts_.rel_tol, 0.0, opts_.max_intervals};
    const auto r = quad::integrate_adaptive<double>(
        [this](double a) { return kernel(a); }, breaks_, qo);
    if (!r.converged) {
      throw Error(ErrorKind::NonConvergence,
                  "delta_L0: adaptive quadrature exceeded " +
                      std::to_string(opts_.max_intervals) + " intervals");
    }
    cache_->l0 = k_ * r.value;
  });
  return cache_->l0;
}

std::complex<double> DoddDeedsModel::delta_l(const PlateProperties& plate,
                                             double freq_hz) const {
  plate.validate();
  require(std::isfinite(freq_hz) && freq_hz >= 0.0,
          "delta_L: frequency must be >= 0");
  if (freq_hz == 0.0) {
    return (plate.mu_r - 1.0) / (plate.mu_r + 1.0) * delta_l0();
  }
  const double omega = 2.0 * kPi * freq_hz;
  quad::AdaptiveOptions qo{opts_.rel_tol, 0.0, opts_.max_intervals};
  const auto r = quad::integrate_adaptive<std::complex<double>>(
      [&](double a) { return kernel(a) * phi_kernel(a, omega, plate); },
      breaks_, qo);
  if (!r.converged) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "delta_L: adaptive quadrature exceeded " << opts_.max_intervals
        << " intervals at f = " << freq_hz << " Hz";
    throw Error(ErrorKind::NonConvergence, msg.str());
  }
  return k_ * r.value;
}

InductanceSpectrum DoddDeedsModel::spectrum(
    const PlateProperties& plate, std::span<const double> freqs_hz) const {
  for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
    require(std::isfinite(freqs_hz[i]) && freqs_hz[i] > 0.0,
            "simulate_spectrum: frequencies must be > 0");
    require(i == 0 || freqs_hz[i] > freqs_hz[i - 1],
            "simulate_spectrum: frequencies must be strictly increasing");
  }
  InductanceSpectrum out;
  out.points.reserve(freqs_hz.size());
  for (double f : freqs_hz) out.points.push_back({f, delta_l(plate, f)});
  return out;
}

std::complex<double> delta_L(const CoilGeometry& geom,
                             const PlateProperties& plate, double freq_hz,
                             const ForwardOptions& opts) {
  return DoddDeedsModel(geom, opts).delta_l(plate, freq_hz);
}

double delta_L0_magnitude(const CoilGeometry& geom, const ForwardOptions& opts) {
  return DoddDeedsModel(geom, opts).delta_l0();
}

InductanceSpectrum simulate_spectrum(const CoilGeometry& geom,
                                     const PlateProperties& plate,
                                     std::span<const double> freqs_hz,
                                     const ForwardOptions& opts) {
  return DoddDeedsModel(geom, opts).spectrum(plate, freqs_hz);
}

}  // namespace ecl
