#include "ecl/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

#include "ecl/error.hpp"
#include "json.hpp"

namespace ecl {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- CSV

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorKind::Parse, fmt::format("line {}: '{}' is not a finite number",
                                              line_no, field));
  }
  return v;
}

struct Schema {
  std::array<std::string_view, 3> columns;
  bool impedance;
};

constexpr Schema kInductanceSchema{{"freq_hz", "re_dL_H", "im_dL_H"}, false};
constexpr Schema kImpedanceSchema{{"freq_hz", "re_z_ohm", "im_z_ohm"}, true};

struct Row {
  double f, re, im;
  std::size_t line;
};

std::string fmt17(double v) { return fmt::format("{:.17g}", v); }

// --------------------------------------------------------------- JSON

/// Reads one JSON object, rejecting unknown keys and wrong types.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw Error(ErrorKind::Validation, fmt::format("{}: expected an object", label()));
  }

  std::optional<double> number(const char* key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number())
      throw Error(ErrorKind::Validation, fmt::format("{}.{}: expected a number", path_, key));
    return v->get<double>();
  }

  std::optional<int> integer(const char* key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer())
      throw Error(ErrorKind::Validation, fmt::format("{}.{}: expected an integer", path_, key));
    return v->get<int>();
  }

  std::optional<std::string> string(const char* key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_string())
      throw Error(ErrorKind::Validation, fmt::format("{}.{}: expected a string", path_, key));
    return v->get<std::string>();
  }

  const json* object(const char* key) { return find(key); }

  double require_number(const char* key) {
    auto v = number(key);
    if (!v) throw Error(ErrorKind::Validation, fmt::format("{}.{}: missing", path_, key));
    return *v;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k))
        throw Error(ErrorKind::Validation, fmt::format("{}: unknown key '{}'", label(), k));
    }
  }

  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string label() const { return path_.empty() ? "document" : path_; }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_json(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

std::string_view mutual_name(MutualFactor m) {
  return m == MutualFactor::DoddDeeds ? "dodd_deeds" : "as_printed";
}

MutualFactor parse_mutual(const std::string& s) {
  if (s == "dodd_deeds") return MutualFactor::DoddDeeds;
  if (s == "as_printed") return MutualFactor::AsPrinted;
  throw Error(ErrorKind::Validation,
              fmt::format("model.mutual_factor: '{}' is not one of dodd_deeds, as_printed", s));
}

std::string_view convention_name(Alpha0Convention c) {
  return c == Alpha0Convention::ZeroLiftoff ? "zero_liftoff" : "reference_liftoff";
}

Alpha0Convention parse_convention(const std::string& s) {
  if (s == "zero_liftoff") return Alpha0Convention::ZeroLiftoff;
  if (s == "reference_liftoff") return Alpha0Convention::ReferenceLiftoff;
  throw Error(ErrorKind::Validation,
              fmt::format("model.alpha0_convention: '{}' is not one of zero_liftoff, "
                          "reference_liftoff",
                          s));
}

json calibration_to_json(const ReferenceCalibration& cal) {
  return json{{"delta_L_m_H", cal.delta_L_m},
              {"reference_liftoff_m", cal.reference_liftoff},
              {"alpha0_per_m", cal.alpha0},
              {"sigma_S_per_m", cal.sigma},
              {"reference_mode", reference_mode_name(cal.reference_mode)}};
}

ReferenceCalibration calibration_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ReferenceCalibration cal;
  cal.delta_L_m = r.require_number("delta_L_m_H");
  cal.reference_liftoff = r.require_number("reference_liftoff_m");
  cal.alpha0 = r.require_number("alpha0_per_m");
  cal.sigma = r.require_number("sigma_S_per_m");
  if (auto m = r.string("reference_mode")) cal.reference_mode = parse_reference_mode(*m);
  r.finish();
  cal.validate();
  return cal;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["geometry"] = {{"r1_m", c.geometry.r1},     {"r2_m", c.geometry.r2},
                   {"liftoff_m", c.geometry.l0}, {"height_m", c.geometry.h},
                   {"gap_m", c.geometry.g},      {"turns", c.geometry.n_turns}};
  if (c.plate) j["plate"] = {{"sigma_S_per_m", c.plate->sigma}, {"mu_r", c.plate->mu_r}};
  j["grid"] = {{"start_hz", c.grid.start_hz},
               {"stop_hz", c.grid.stop_hz},
               {"points_per_decade", c.grid.points_per_decade}};
  json feats = {{"cutoff_hz", c.cutoff_hz}, {"noise_floor_H", c.noise_floor}};
  if (c.reference_mode) feats["reference_mode"] = reference_mode_name(*c.reference_mode);
  j["features"] = feats;
  if (c.calibration) j["calibration"] = calibration_to_json(*c.calibration);
  j["model"] = {{"mutual_factor", mutual_name(c.mutual)},
                {"alpha0_convention", convention_name(c.alpha0_convention)}};
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  ObjectReader top(j, "");
  if (const json* g = top.object("geometry")) {
    ObjectReader r(*g, "geometry");
    if (auto v = r.number("r1_m")) c.geometry.r1 = *v;
    if (auto v = r.number("r2_m")) c.geometry.r2 = *v;
    if (auto v = r.number("liftoff_m")) c.geometry.l0 = *v;
    if (auto v = r.number("height_m")) c.geometry.h = *v;
    if (auto v = r.number("gap_m")) c.geometry.g = *v;
    if (auto v = r.integer("turns")) c.geometry.n_turns = *v;
    r.finish();
  }
  if (const json* p = top.object("plate")) {
    ObjectReader r(*p, "plate");
    PlateProperties plate;
    if (auto v = r.number("sigma_S_per_m")) plate.sigma = *v;
    if (auto v = r.number("mu_r")) plate.mu_r = *v;
    r.finish();
    c.plate = plate;
  }
  if (const json* g = top.object("grid")) {
    ObjectReader r(*g, "grid");
    if (auto v = r.number("start_hz")) c.grid.start_hz = *v;
    if (auto v = r.number("stop_hz")) c.grid.stop_hz = *v;
    if (auto v = r.integer("points_per_decade")) c.grid.points_per_decade = *v;
    r.finish();
  }
  if (const json* f = top.object("features")) {
    ObjectReader r(*f, "features");
    if (auto v = r.string("reference_mode")) c.reference_mode = parse_reference_mode(*v);
    if (auto v = r.number("cutoff_hz")) c.cutoff_hz = *v;
    if (auto v = r.number("noise_floor_H")) c.noise_floor = *v;
    r.finish();
  }
  if (const json* cal = top.object("calibration")) c.calibration = calibration_from_json(*cal, "calibration");
  if (const json* m = top.object("model")) {
    ObjectReader r(*m, "model");
    if (auto v = r.string("mutual_factor")) c.mutual = parse_mutual(*v);
    if (auto v = r.string("alpha0_convention")) c.alpha0_convention = parse_convention(*v);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

json features_to_json(const SpectralFeatures& f) {
  return json{{"zero_crossing_hz", f.zero_crossing_hz},
              {"plateau_amplitude_H", f.plateau_amplitude},
              {"reference_mode", reference_mode_name(f.reference_mode)},
              {"crossing_bracket_hz", {f.crossing_bracket.first, f.crossing_bracket.second}}};
}

SpectralFeatures features_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  SpectralFeatures f;
  f.zero_crossing_hz = r.require_number("zero_crossing_hz");
  f.plateau_amplitude = r.require_number("plateau_amplitude_H");
  if (auto m = r.string("reference_mode")) f.reference_mode = parse_reference_mode(*m);
  const json* b = r.object("crossing_bracket_hz");
  if (!b || !b->is_array() || b->size() != 2 || !(*b)[0].is_number() || !(*b)[1].is_number()) {
    throw Error(ErrorKind::Validation,
                fmt::format("{}.crossing_bracket_hz: expected two numbers", path));
  }
  f.crossing_bracket = {(*b)[0].get<double>(), (*b)[1].get<double>()};
  r.finish();
  return f;
}

json result_to_json(const CompensationResult& r) {
  return json{{"omega1_measured_rad_s", r.omega1_measured},
              {"amplitude_ratio", r.amplitude_ratio},
              {"omega0_rad_s", r.omega0},
              {"mu_r_est", r.mu_r_est},
              {"mu_r_uncompensated", r.mu_r_uncompensated},
              {"liftoff_est_m", r.liftoff_est},
              {"alpha0_per_m", r.alpha0_used}};
}

CompensationResult result_from_json(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  CompensationResult out;
  out.omega1_measured = r.require_number("omega1_measured_rad_s");
  out.amplitude_ratio = r.require_number("amplitude_ratio");
  out.omega0 = r.require_number("omega0_rad_s");
  out.mu_r_est = r.require_number("mu_r_est");
  out.mu_r_uncompensated = r.require_number("mu_r_uncompensated");
  out.liftoff_est = r.require_number("liftoff_est_m");
  out.alpha0_used = r.require_number("alpha0_per_m");
  r.finish();
  return out;
}

}  // namespace

// ------------------------------------------------------------ public API

std::string_view reference_mode_name(ReferenceMode mode) {
  return mode == ReferenceMode::LowFrequencyPlateau ? "low" : "high";
}

ReferenceMode parse_reference_mode(std::string_view name) {
  if (name == "low") return ReferenceMode::LowFrequencyPlateau;
  if (name == "high") return ReferenceMode::HighFrequencyPlateau;
  throw Error(ErrorKind::Validation,
              fmt::format("reference_mode: '{}' is not one of low, high", name));
}

std::vector<double> FrequencyGrid::frequencies() const {
  return log_frequency_grid(start_hz, stop_hz, points_per_decade);
}

void RunConfig::validate() const {
  geometry.validate();
  if (plate) plate->validate();
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Validation, what); };
  if (!(std::isfinite(grid.start_hz) && grid.start_hz > 0.0)) bad("grid.start_hz must be > 0");
  if (!(std::isfinite(grid.stop_hz) && grid.stop_hz > grid.start_hz))
    bad("grid: start_hz must be < stop_hz");
  if (grid.points_per_decade < 4) bad("grid.points_per_decade must be >= 4");
  if (!(std::isfinite(cutoff_hz) && cutoff_hz > 0.0)) bad("features.cutoff_hz must be > 0");
  if (!(std::isfinite(noise_floor) && noise_floor >= 0.0))
    bad("features.noise_floor_H must be >= 0");
  if (calibration) calibration->validate();
}

FeatureOptions RunConfig::feature_options(ReferenceMode fallback) const {
  return FeatureOptions{reference_mode.value_or(fallback), cutoff_hz, noise_floor};
}

Sweep parse_sweep_csv(std::string_view text) {
  const Schema* schema = nullptr;
  std::array<std::size_t, 3> index{};
  std::size_t n_columns = 0;
  std::vector<Row> rows;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split_commas(line);
    if (!schema) {
      for (const Schema* s : {&kInductanceSchema, &kImpedanceSchema}) {
        if (std::find(fields.begin(), fields.end(), s->columns[1]) != fields.end()) schema = s;
      }
      if (!schema) {
        throw Error(ErrorKind::Schema,
                    fmt::format("line {}: header names neither re_dL_H nor re_z_ohm", line_no));
      }
      for (std::size_t c = 0; c < 3; ++c) {
        auto it = std::find(fields.begin(), fields.end(), schema->columns[c]);
        if (it == fields.end()) {
          throw Error(ErrorKind::Schema,
                      fmt::format("line {}: missing column '{}'", line_no, schema->columns[c]));
        }
        index[c] = static_cast<std::size_t>(it - fields.begin());
      }
      if (fields.size() != 3) {
        for (auto f : fields) {
          if (std::find(schema->columns.begin(), schema->columns.end(), f) == schema->columns.end())
            throw Error(ErrorKind::Schema,
                        fmt::format("line {}: unexpected column '{}'", line_no, f));
        }
        throw Error(ErrorKind::Schema, fmt::format("line {}: duplicate column", line_no));
      }
      n_columns = fields.size();
      continue;
    }
    if (fields.size() != n_columns) {
      throw Error(ErrorKind::Parse, fmt::format("line {}: expected {} fields, found {}", line_no,
                                                n_columns, fields.size()));
    }
    Row r{parse_number(fields[index[0]], line_no), parse_number(fields[index[1]], line_no),
          parse_number(fields[index[2]], line_no), line_no};
    if (!(r.f > 0.0)) {
      throw Error(ErrorKind::Parse, fmt::format("line {}: frequency must be > 0", line_no));
    }
    rows.push_back(r);
  }
  if (!schema) throw Error(ErrorKind::Schema, "missing header row");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.f < b.f; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].f == rows[i - 1].f) {
      throw Error(ErrorKind::DuplicateFrequency,
                  fmt::format("lines {} and {}: duplicate frequency {} Hz", rows[i - 1].line,
                              rows[i].line, fmt17(rows[i].f)));
    }
  }

  if (schema->impedance) {
    ImpedanceSweep sweep;
    for (const auto& r : rows) sweep.points.push_back({r.f, {r.re, r.im}});
    return sweep;
  }
  InductanceSpectrum spec;
  for (const auto& r : rows) spec.points.push_back({r.f, {r.re, r.im}});
  return spec;
}

InductanceSpectrum parse_spectrum_csv(std::string_view text) {
  auto s = parse_sweep_csv(text);
  if (auto* spec = std::get_if<InductanceSpectrum>(&s)) return std::move(*spec);
  throw Error(ErrorKind::Schema, "expected inductance columns freq_hz,re_dL_H,im_dL_H");
}

ImpedanceSweep parse_impedance_csv(std::string_view text) {
  auto s = parse_sweep_csv(text);
  if (auto* sweep = std::get_if<ImpedanceSweep>(&s)) return std::move(*sweep);
  throw Error(ErrorKind::Schema, "expected impedance columns freq_hz,re_z_ohm,im_z_ohm");
}

std::string write_spectrum_csv(const InductanceSpectrum& spec) {
  std::string out = "freq_hz,re_dL_H,im_dL_H\n";
  for (const auto& p : spec.points) {
    out += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.freq_hz, p.delta_l.real(), p.delta_l.imag());
  }
  return out;
}

std::string write_impedance_csv(const ImpedanceSweep& sweep) {
  std::string out = "freq_hz,re_z_ohm,im_z_ohm\n";
  for (const auto& p : sweep.points) {
    out += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.freq_hz, p.z.real(), p.z.imag());
  }
  return out;
}

std::string write_plot_csv(const InductanceSpectrum& spec, const FeatureOptions& opts) {
  std::string out = "freq_hz,re_dL_H,im_dL_H,masked\n";
  for (const auto& p : spec.points) {
    const bool masked = p.freq_hz > opts.cutoff_hz || std::abs(p.delta_l) < opts.noise_floor;
    out += fmt::format("{:.17g},{:.17g},{:.17g},{}\n", p.freq_hz, p.delta_l.real(),
                       p.delta_l.imag(), masked ? 1 : 0);
  }
  return out;
}

RunConfig parse_config(std::string_view text) { return config_from_json(parse_json(text)); }

std::string write_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

ReferenceCalibration parse_calibration(std::string_view text) {
  return calibration_from_json(parse_json(text), "calibration");
}

std::string write_calibration(const ReferenceCalibration& cal) {
  return calibration_to_json(cal).dump(2) + "\n";
}

std::string write_features(const SpectralFeatures& f) { return features_to_json(f).dump(2) + "\n"; }

SpectralFeatures parse_features(std::string_view text) {
  return features_from_json(parse_json(text), "features");
}

std::string write_report(const Report& report) {
  json j;
  j["software_version"] = report.software_version;
  j["timestamp"] = report.timestamp;
  j["inputs"] = {{"source", report.source},
                 {"config", config_to_json(report.config)},
                 {"calibration", calibration_to_json(report.calibration)}};
  j["features"] = features_to_json(report.features);
  j["compensation"] = result_to_json(report.result);
  return j.dump(2) + "\n";
}

Report parse_report(std::string_view text) {
  const json j = parse_json(text);
  ObjectReader top(j, "");
  Report r;
  r.software_version = top.string("software_version").value_or("");
  r.timestamp = top.string("timestamp").value_or("");
  const json* inputs = top.object("inputs");
  if (!inputs) throw Error(ErrorKind::Validation, "report: missing inputs");
  {
    ObjectReader in(*inputs, "inputs");
    r.source = in.string("source").value_or("");
    const json* cfg = in.object("config");
    if (!cfg) throw Error(ErrorKind::Validation, "inputs.config: missing");
    r.config = config_from_json(*cfg);
    const json* cal = in.object("calibration");
    if (!cal) throw Error(ErrorKind::Validation, "inputs.calibration: missing");
    r.calibration = calibration_from_json(*cal, "inputs.calibration");
    in.finish();
  }
  const json* f = top.object("features");
  const json* c = top.object("compensation");
  if (!f || !c) throw Error(ErrorKind::Validation, "report: missing features or compensation");
  r.features = features_from_json(*f, "features");
  r.result = result_from_json(*c, "compensation");
  top.finish();
  return r;
}

std::string write_ladder_csv(const LadderRun& run, double actual_mu_r) {
  std::string out =
      "liftoff_mm,actual_mu_r,uncompensated_mu_r,compensated_mu_r,"
      "uncompensated_error_pct,compensated_error_pct\n";
  for (const auto& row : run.rows) {
    const double unc = row.result.mu_r_uncompensated;
    const double cmp = row.result.mu_r_est;
    out += fmt::format("{:.12g},{:.12g},{:.10g},{:.10g},{:.6f},{:.6f}\n", row.liftoff * 1e3,
                       actual_mu_r, unc, cmp, 100.0 * std::abs(unc - actual_mu_r) / actual_mu_r,
                       100.0 * std::abs(cmp - actual_mu_r) / actual_mu_r);
  }
  return out;
}

}  // namespace ecl
