#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "ecl/compensation.hpp"
#include "ecl/error.hpp"
#include "ecl/features.hpp"
#include "ecl/forward_model.hpp"
#include "ecl/io.hpp"
#include "ecl/ladder.hpp"

namespace ecl::cli {

namespace fs = std::filesystem;

namespace {

// Tolerances of the benchmark-ladder check.
constexpr double kRowTolerance = 0.03;
constexpr double kMaxCompensatedError = 0.075;
constexpr double kMaxSpreadRatio = 0.15;
constexpr double kMaxSinusoidDiscrepancy = 0.05;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(ErrorKind::Io, fmt::format("write failed for '{}'", path.string()));
}

/// Options shared by several subcommands; each is applied on top of the
/// config document when given.
struct Common {
  std::string config_path;
  std::optional<double> mu_r;
  std::optional<double> sigma;
  std::optional<int> ppd;
  std::optional<double> start;
  std::optional<double> stop;
  std::optional<std::string> reference_mode;
  std::optional<double> cutoff_hz;
  std::optional<double> noise_floor;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig{} : parse_config(read_file(c.config_path));
  if (c.mu_r || c.sigma) {
    PlateProperties plate = cfg.plate.value_or(PlateProperties{});
    if (c.mu_r) plate.mu_r = *c.mu_r;
    if (c.sigma) plate.sigma = *c.sigma;
    cfg.plate = plate;
  }
  if (c.ppd) cfg.grid.points_per_decade = *c.ppd;
  if (c.start) cfg.grid.start_hz = *c.start;
  if (c.stop) cfg.grid.stop_hz = *c.stop;
  if (c.reference_mode) cfg.reference_mode = parse_reference_mode(*c.reference_mode);
  if (c.cutoff_hz) cfg.cutoff_hz = *c.cutoff_hz;
  if (c.noise_floor) cfg.noise_floor = *c.noise_floor;
  cfg.validate();
  return cfg;
}

void add_config(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON run configuration");
}
void add_plate(CLI::App* app, Common& c) {
  app->add_option("--mu-r", c.mu_r, "Plate relative permeability");
  app->add_option("--sigma", c.sigma, "Plate conductivity, S/m");
}
void add_grid(CLI::App* app, Common& c) {
  app->add_option("--points-per-decade", c.ppd, "Frequency samples per decade");
  app->add_option("--start", c.start, "First frequency, Hz");
  app->add_option("--stop", c.stop, "Last frequency, Hz");
}
void add_feature_flags(CLI::App* app, Common& c) {
  app->add_option("--reference-mode", c.reference_mode, "Plateau used for amplitudes: low|high");
  app->add_option("--cutoff-hz", c.cutoff_hz, "Ignore samples above this frequency");
  app->add_option("--noise-floor", c.noise_floor, "Ignore samples with |dL| below this, H");
}

std::vector<double> parse_liftoffs_mm(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v >= 0.0)) throw std::invalid_argument(item);
      out.push_back(v * 1e-3);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Validation, fmt::format("--liftoffs: '{}' is not a lift-off in mm", item));
    }
  }
  if (out.empty()) throw Error(ErrorKind::Validation, "--liftoffs: empty list");
  return out;
}

std::string liftoff_tag(double liftoff_m) { return fmt::format("{:g}", liftoff_m * 1e3); }

/// Spectrum from either an inductance CSV, or an impedance CSV with an air
/// reference. Returns the spectrum, its default plateau mode and noise floor.
struct LoadedSpectrum {
  InductanceSpectrum spectrum;
  ReferenceMode default_mode = ReferenceMode::LowFrequencyPlateau;
  std::optional<double> air_noise_floor;
};

LoadedSpectrum load_spectrum(const std::string& path, const std::string& air_path) {
  LoadedSpectrum out;
  if (air_path.empty()) {
    out.spectrum = parse_spectrum_csv(read_file(path));
    return out;
  }
  const ImpedanceSweep sample = parse_impedance_csv(read_file(path));
  ImpedanceSweep air = parse_impedance_csv(read_file(air_path));
  air.is_air_reference = true;
  out.spectrum = impedance_to_inductance(sample, air);
  out.default_mode = ReferenceMode::HighFrequencyPlateau;
  out.air_noise_floor = noise_floor_from_air(air);
  return out;
}

FeatureOptions resolve_features(const RunConfig& cfg, const Common& c, const LoadedSpectrum& s) {
  FeatureOptions opts = cfg.feature_options(s.default_mode);
  if (!c.noise_floor && s.air_noise_floor && cfg.noise_floor == 0.0) opts.noise_floor = *s.air_noise_floor;
  return opts;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = std::strtoll(epoch, nullptr, 10);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multifrequency eddy-current lift-off compensation toolkit", "ecliftoff"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // simulate
  Common sim;
  std::string sim_liftoffs, sim_output = ".";
  auto* simulate = app.add_subcommand("simulate", "Write one simulated spectrum CSV per lift-off");
  add_config(simulate, sim);
  add_plate(simulate, sim);
  add_grid(simulate, sim);
  simulate->add_option("--liftoffs", sim_liftoffs, "Comma-separated lift-offs in mm");
  simulate->add_option("--output", sim_output, "Output directory");

  // features
  Common feat;
  std::string feat_path, feat_air, feat_plot;
  auto* features = app.add_subcommand("features", "Extract zero crossing and plateau amplitude");
  features->add_option("spectrum", feat_path, "Inductance CSV, or impedance CSV with --air")->required();
  add_config(features, feat);
  add_feature_flags(features, feat);
  features->add_option("--air", feat_air, "Air-reference impedance CSV");
  features->add_option("--plot", feat_plot, "Write plot-data CSV here");

  // calibrate
  Common calc;
  std::string cal_path, cal_air, cal_output;
  auto* calibrate = app.add_subcommand("calibrate", "Build a reference calibration from a spectrum at the reference lift-off");
  calibrate->add_option("spectrum", cal_path, "Reference spectrum")->required();
  add_config(calibrate, calc);
  add_plate(calibrate, calc);
  add_feature_flags(calibrate, calc);
  calibrate->add_option("--air", cal_air, "Air-reference impedance CSV");
  calibrate->add_option("--output", cal_output, "Write the calibration JSON here");

  // compensate
  Common comp;
  std::string comp_path, comp_cal, comp_air, comp_output, comp_plot;
  auto* compensate = app.add_subcommand("compensate", "Compensate a spectrum against a calibration");
  compensate->add_option("spectrum", comp_path, "Spectrum at the unknown lift-off")->required();
  compensate->add_option("--calibration", comp_cal, "Calibration JSON (defaults to the config's)");
  add_config(compensate, comp);
  add_feature_flags(compensate, comp);
  compensate->add_option("--air", comp_air, "Air-reference impedance CSV");
  compensate->add_option("--output", comp_output, "Write the report JSON here");
  compensate->add_option("--plot", comp_plot, "Write plot-data CSV here");

  // table2
  Common tab;
  std::string tab_output, tab_liftoffs;
  auto* table2 = app.add_subcommand("table2", "Run the benchmark lift-off ladder and check it");
  add_config(table2, tab);
  add_plate(table2, tab);
  add_grid(table2, tab);
  add_feature_flags(table2, tab);
  table2->add_option("--output", tab_output, "Write the table CSV here (default stdout)");
  table2->add_option("--liftoffs", tab_liftoffs, "Comma-separated lift-offs in mm");

  // validate-approx
  Common val;
  std::string val_plot;
  auto* validate = app.add_subcommand("validate-approx", "Compare the coil kernel with its sin^2 surrogate");
  add_config(validate, val);
  validate->add_option("--plot", val_plot, "Write both normalised curves as CSV here");

  // fit
  Common fitc;
  std::string fit_path, fit_air;
  auto* fit = app.add_subcommand("fit", "Least-squares permeability fit of a spectrum");
  fit->add_option("spectrum", fit_path, "Spectrum CSV")->required();
  add_config(fit, fitc);
  add_plate(fit, fitc);
  add_feature_flags(fit, fitc);
  fit->add_option("--air", fit_air, "Air-reference impedance CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) {
      const RunConfig cfg = load_config(sim);
      const PlateProperties plate = cfg.plate.value_or(PlateProperties{});
      const std::vector<double> liftoffs =
          sim_liftoffs.empty() ? std::vector<double>{cfg.geometry.l0} : parse_liftoffs_mm(sim_liftoffs);
      const auto freqs = cfg.grid.frequencies();
      fs::create_directories(sim_output);
      for (double l : liftoffs) {
        const ForwardOptions fo{cfg.mutual};
        const auto spec = simulate_spectrum(cfg.geometry.with_liftoff(l), plate, freqs, fo);
        const fs::path file = fs::path(sim_output) / fmt::format("spectrum_{}mm.csv", liftoff_tag(l));
        write_file(file, write_spectrum_csv(spec));
        out << file.string() << "\n";
      }
      return kExitOk;
    }

    if (*features) {
      const RunConfig cfg = load_config(feat);
      const auto loaded = load_spectrum(feat_path, feat_air);
      const FeatureOptions fo = resolve_features(cfg, feat, loaded);
      const SpectralFeatures f = extract_features(loaded.spectrum, fo);
      if (!feat_plot.empty()) write_file(feat_plot, write_plot_csv(loaded.spectrum, fo));
      out << write_features(f);
      return kExitOk;
    }

    if (*calibrate) {
      const RunConfig cfg = load_config(calc);
      const auto loaded = load_spectrum(cal_path, cal_air);
      const SpectralFeatures f = extract_features(loaded.spectrum, resolve_features(cfg, calc, loaded));
      const double sigma = cfg.plate.value_or(PlateProperties{}).sigma;
      const auto cal = make_calibration(f, cfg.geometry, sigma, cfg.alpha0_convention, cfg.mutual);
      if (cal_output.empty()) {
        out << write_calibration(cal);
      } else {
        write_file(cal_output, write_calibration(cal));
        out << cal_output << "\n";
      }
      return kExitOk;
    }

    if (*compensate) {
      RunConfig cfg = load_config(comp);
      const ReferenceCalibration cal = !comp_cal.empty() ? parse_calibration(read_file(comp_cal))
                                       : cfg.calibration
                                           ? *cfg.calibration
                                           : throw Error(ErrorKind::Validation,
                                                         "compensate: no calibration given (--calibration or config)");
      const auto loaded = load_spectrum(comp_path, comp_air);
      FeatureOptions fo = resolve_features(cfg, comp, loaded);
      // The plateau mode must match the calibration unless set explicitly.
      if (!cfg.reference_mode) fo.mode = cal.reference_mode;
      const SpectralFeatures f = extract_features(loaded.spectrum, fo);
      const CompensationResult r = run_compensation(f, cal);
      if (!comp_plot.empty()) write_file(comp_plot, write_plot_csv(loaded.spectrum, fo));

      Report report{kVersion, utc_timestamp(), comp_path, cfg, cal, f, r};
      const std::string summary =
          fmt::format("mu_r_est={:.6g} omega0={:.6g} rad/s liftoff_est={:.6g} mm (ratio={:.6g})\n",
                      r.mu_r_est, r.omega0, r.liftoff_est * 1e3, r.amplitude_ratio);
      if (comp_output.empty()) {
        out << write_report(report);
        err << summary;
      } else {
        write_file(comp_output, write_report(report));
        out << summary;
      }
      return kExitOk;
    }

    if (*table2) {
      const RunConfig cfg = load_config(tab);
      LadderConfig lc;
      lc.geometry = cfg.geometry;
      lc.plate = cfg.plate.value_or(PlateProperties{});
      lc.liftoffs = tab_liftoffs.empty()
                        ? std::vector<double>(kBenchmarkLiftoffs.begin(), kBenchmarkLiftoffs.end())
                        : parse_liftoffs_mm(tab_liftoffs);
      lc.freqs_hz = cfg.grid.frequencies();
      lc.features = cfg.feature_options(ReferenceMode::LowFrequencyPlateau);
      lc.alpha0_convention = cfg.alpha0_convention;
      lc.forward.mutual = cfg.mutual;
      const LadderRun run = run_liftoff_ladder(lc);

      const std::string table = write_ladder_csv(run, lc.plate.mu_r);
      if (tab_output.empty()) {
        out << table;
      } else {
        write_file(tab_output, table);
      }

      bool ok = true;
      double unc_min = HUGE_VAL, unc_max = -HUGE_VAL, cmp_min = HUGE_VAL, cmp_max = -HUGE_VAL;
      for (const auto& row : run.rows) {
        const double unc = row.result.mu_r_uncompensated;
        const double cmp = row.result.mu_r_est;
        unc_min = std::min(unc_min, unc);
        unc_max = std::max(unc_max, unc);
        cmp_min = std::min(cmp_min, cmp);
        cmp_max = std::max(cmp_max, cmp);
        const double cmp_err = std::abs(cmp - lc.plate.mu_r) / lc.plate.mu_r;
        const bool err_ok = cmp_err <= kMaxCompensatedError;
        ok = ok && err_ok;
        err << fmt::format("{} l0={:g} mm compensated error {:.2f}% (limit {:.1f}%)\n",
                           err_ok ? "PASS" : "FAIL", row.liftoff * 1e3, 100 * cmp_err,
                           100 * kMaxCompensatedError);
        for (const auto& ref : kReferenceTable) {
          if (std::abs(ref.liftoff_mm - row.liftoff * 1e3) > 1e-9) continue;
          const double du = unc / ref.uncompensated_mu_r - 1.0;
          const double dc = cmp / ref.compensated_mu_r - 1.0;
          const bool row_ok = std::abs(du) <= kRowTolerance && std::abs(dc) <= kRowTolerance;
          ok = ok && row_ok;
          err << fmt::format(
              "{} l0={:g} mm uncompensated {:.4f} vs {:.4f} ({:+.2f}%), compensated {:.4f} vs "
              "{:.4f} ({:+.2f}%) (limit ±{:.0f}%)\n",
              row_ok ? "PASS" : "FAIL", row.liftoff * 1e3, unc, ref.uncompensated_mu_r, 100 * du,
              cmp, ref.compensated_mu_r, 100 * dc, 100 * kRowTolerance);
        }
      }
      if (run.rows.size() >= 2) {
        const double spread = (cmp_max - cmp_min) / (unc_max - unc_min);
        const bool spread_ok = spread <= kMaxSpreadRatio;
        ok = ok && spread_ok;
        err << fmt::format("{} spread ratio {:.4f} (limit {:.2f})\n", spread_ok ? "PASS" : "FAIL",
                           spread, kMaxSpreadRatio);
      }
      return ok ? kExitOk : kExitToleranceFailed;
    }

    if (*validate) {
      const RunConfig cfg = load_config(val);
      const auto cmp = compare_sinusoid(cfg.geometry, cfg.mutual);
      if (!val_plot.empty()) {
        std::string csv = "alpha_per_m,kernel_normalised,sinusoid_normalised\n";
        for (std::size_t i = 0; i < cmp.alpha.size(); ++i)
          csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", cmp.alpha[i], cmp.kernel[i], cmp.sinusoid[i]);
        write_file(val_plot, csv);
      }
      const bool ok = cmp.discrepancy <= kMaxSinusoidDiscrepancy;
      out << fmt::format("alpha0={:.10g} kernel_area={:.10g} sinusoid_area={:.10g} discrepancy={:.6f}\n",
                         cmp.alpha0, cmp.kernel_area, cmp.sinusoid_area, cmp.discrepancy);
      err << fmt::format("{} sinusoid area discrepancy {:.2f}% (limit {:.0f}%)\n", ok ? "PASS" : "FAIL",
                         100 * cmp.discrepancy, 100 * kMaxSinusoidDiscrepancy);
      return ok ? kExitOk : kExitToleranceFailed;
    }

    if (*fit) {
      const RunConfig cfg = load_config(fitc);
      const auto loaded = load_spectrum(fit_path, fit_air);
      FitOptions fo;
      fo.noise_floor = resolve_features(cfg, fitc, loaded).noise_floor;
      fo.forward.mutual = cfg.mutual;
      const double sigma = cfg.plate.value_or(PlateProperties{}).sigma;
      const double mu = calibrate_permeability_by_fit(loaded.spectrum, cfg.geometry, sigma, fo);
      out << fmt::format("{:.10g}\n", mu);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "InternalError: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitUsage;
}

}  // namespace ecl::cli
