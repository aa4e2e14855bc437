#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"
#include "ecl/error.hpp"
#include "ecl/io.hpp"

namespace fs = std::filesystem;
using namespace ecl;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / fs::path("ecl_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::size_t data_rows(const std::string& csv) {
  std::size_t n = 0;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

const std::string kData = ECL_TEST_DATA;

}  // namespace

TEST_CASE("usage") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"bogus"}).code == cli::kExitUsage);
  CHECK(invoke({"features"}).code == cli::kExitUsage);
  const auto help = invoke({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("table2") != std::string::npos);
  CHECK(invoke({"--version"}).out.find(cli::kVersion) != std::string::npos);
}

TEST_CASE("simulate") {
  TempDir tmp;
  const auto r = invoke({"simulate", "--liftoffs", "0.8,2.3,2.8,3.3,3.8,4.3,4.8,5.3", "--output", tmp / "out",
                      "--points-per-decade", "40", "--start", "1", "--stop", "1e6"});
  REQUIRE(r.code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(tmp.path / "out")) {
    ++files;
    CHECK(data_rows(slurp(e.path())) == 241);
  }
  CHECK(files == 8);
  CHECK(fs::exists(tmp.path / "out" / "spectrum_5.3mm.csv"));

  SUBCASE("deterministic output") {
    REQUIRE(invoke({"simulate", "--liftoffs", "2.3", "--output", tmp / "again"}).code == 0);
    CHECK(slurp(tmp.path / "again" / "spectrum_2.3mm.csv") == slurp(tmp.path / "out" / "spectrum_2.3mm.csv"));
  }
  SUBCASE("missing config") {
    const auto m = invoke({"simulate", "--config", tmp / "nope.json", "--output", tmp / "x"});
    CHECK(m.code == exit_code_for(ErrorKind::Io));
    CHECK(m.err.find("nope.json") != std::string::npos);
    CHECK(m.err.find("IoError") == 0);
  }
  SUBCASE("bad lift-off list") {
    CHECK(invoke({"simulate", "--liftoffs", "0.8,abc", "--output", tmp / "x"}).code ==
          exit_code_for(ErrorKind::Validation));
  }
}

TEST_CASE("features") {
  TempDir tmp;
  REQUIRE(invoke({"simulate", "--liftoffs", "0.8", "--output", tmp.path.string()}).code == 0);
  REQUIRE(invoke({"simulate", "--liftoffs", "0.8", "--mu-r", "1", "--output", tmp / "nm"}).code == 0);

  const auto r = invoke({"features", tmp / "spectrum_0.8mm.csv", "--plot", tmp / "plot.csv"});
  REQUIRE(r.code == 0);
  const auto f = parse_features(r.out);
  CHECK(f.zero_crossing_hz == doctest::Approx(45973.3).epsilon(1e-3));
  CHECK(f.reference_mode == ReferenceMode::LowFrequencyPlateau);
  CHECK(data_rows(slurp(tmp.path / "plot.csv")) == 241);

  const auto nm = invoke({"features", tmp / "nm/spectrum_0.8mm.csv"});
  CHECK(nm.code == exit_code_for(ErrorKind::NoZeroCrossing));
  CHECK(nm.err.find("NoZeroCrossing") == 0);
  CHECK(nm.out.empty());

  const auto air = invoke({"features", kData + "/sample_0.8mm.csv", "--air", kData + "/air.csv"});
  REQUIRE(air.code == 0);
  CHECK(parse_features(air.out).reference_mode == ReferenceMode::HighFrequencyPlateau);
  CHECK(parse_features(air.out).zero_crossing_hz == doctest::Approx(45973.3).epsilon(0.01));

  const auto wrong = invoke({"features", kData + "/sample_0.8mm.csv"});
  CHECK(wrong.code == exit_code_for(ErrorKind::Schema));
}

TEST_CASE("calibrate and compensate") {
  TempDir tmp;
  REQUIRE(invoke({"simulate", "--liftoffs", "0.8,5.3", "--output", tmp.path.string()}).code == 0);
  REQUIRE(invoke({"calibrate", tmp / "spectrum_0.8mm.csv", "--output", tmp / "cal.json"}).code == 0);

  SUBCASE("reference against itself") {
    const auto r = invoke({"compensate", tmp / "spectrum_0.8mm.csv", "--calibration", tmp / "cal.json"});
    REQUIRE(r.code == 0);
    const auto rep = parse_report(r.out);
    CHECK(rep.result.liftoff_est == 0.0);
    CHECK(rep.result.mu_r_est == rep.result.mu_r_uncompensated);
    CHECK(r.err.find("mu_r_est=") != std::string::npos);
  }
  SUBCASE("largest lift-off") {
    const auto r = invoke({"compensate", tmp / "spectrum_5.3mm.csv", "--calibration", tmp / "cal.json", "--output",
                        tmp / "report.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mu_r_est=") == 0);
    const auto rep = parse_report(slurp(tmp.path / "report.json"));
    CHECK(rep.result.mu_r_est > rep.result.mu_r_uncompensated);
    CHECK(rep.result.liftoff_est > 0.0);
    CHECK(rep.source == tmp / "spectrum_5.3mm.csv");
  }
  SUBCASE("amplitude ratio outside the domain") {
    auto cal = parse_calibration(slurp(tmp.path / "cal.json"));
    cal.delta_L_m *= 20.0;
    std::ofstream(tmp.path / "doctored.json") << write_calibration(cal);
    const auto r = invoke({"compensate", tmp / "spectrum_0.8mm.csv", "--calibration", tmp / "doctored.json"});
    CHECK(r.code == exit_code_for(ErrorKind::RatioOutOfDomain));
    CHECK(r.err.find("RatioOutOfDomain") == 0);
  }
  SUBCASE("no calibration") {
    CHECK(invoke({"compensate", tmp / "spectrum_0.8mm.csv"}).code == exit_code_for(ErrorKind::Validation));
  }
  SUBCASE("timestamp honours SOURCE_DATE_EPOCH") {
    ::setenv("SOURCE_DATE_EPOCH", "86400", 1);
    const auto r = invoke({"compensate", tmp / "spectrum_5.3mm.csv", "--calibration", tmp / "cal.json"});
    ::unsetenv("SOURCE_DATE_EPOCH");
    CHECK(parse_report(r.out).timestamp == "1970-01-02T00:00:00Z");
  }
}

TEST_CASE("table2") {
  TempDir tmp;
  SUBCASE("single reference rung") {
    const auto r = invoke({"table2", "--liftoffs", "0.8"});
    CHECK(data_rows(r.out) == 1);
    std::istringstream in(r.out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 6);
    CHECK(cells[2] == cells[3]);
    const bool any_fail = r.err.find("FAIL") != std::string::npos;
    CHECK(r.code == (any_fail ? cli::kExitToleranceFailed : cli::kExitOk));
  }
  SUBCASE("full ladder to a file") {
    const auto r = invoke({"table2", "--output", tmp / "t2.csv"});
    CHECK(data_rows(slurp(tmp.path / "t2.csv")) == 8);
    CHECK(r.err.find("spread ratio") != std::string::npos);
    const bool any_fail = r.err.find("FAIL") != std::string::npos;
    CHECK(r.code == (any_fail ? cli::kExitToleranceFailed : cli::kExitOk));
  }
  SUBCASE("nonmagnetic plate") {
    const auto r = invoke({"table2", "--mu-r", "1"});
    CHECK(r.code == exit_code_for(ErrorKind::NoZeroCrossing));
    CHECK(r.err.find("NoZeroCrossing") == 0);
  }
}

TEST_CASE("validate-approx") {
  TempDir tmp;
  const auto r = invoke({"validate-approx", "--plot", tmp / "fig.csv"});
  CHECK(data_rows(slurp(tmp.path / "fig.csv")) == 201);
  const auto pos = r.out.find("discrepancy=");
  REQUIRE(pos != std::string::npos);
  const double d = std::stod(r.out.substr(pos + 12));
  CHECK(r.code == (d <= 0.05 ? cli::kExitOk : cli::kExitToleranceFailed));

  RunConfig doubled;
  doubled.geometry = CoilGeometry{}.scaled(2.0);
  std::ofstream(tmp.path / "big.json") << write_config(doubled);
  const auto big = invoke({"validate-approx", "--config", tmp / "big.json"});
  CHECK(big.out.substr(big.out.find("discrepancy=")) == r.out.substr(pos));
}

TEST_CASE("fit") {
  TempDir tmp;
  REQUIRE(invoke({"simulate", "--liftoffs", "2.3", "--output", tmp.path.string()}).code == 0);
  RunConfig c;
  c.geometry = CoilGeometry{}.with_liftoff(2.3e-3);
  std::ofstream(tmp.path / "c.json") << write_config(c);
  const auto r = invoke({"fit", tmp / "spectrum_2.3mm.csv", "--config", tmp / "c.json"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(125.2).epsilon(1e-3));
}
