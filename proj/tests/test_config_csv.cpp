#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oscavg/config.hpp"
#include "oscavg/csv.hpp"

using namespace oscavg;
namespace fs = std::filesystem;

namespace {

/// Message of the exception E thrown by fn; fails the test when nothing
/// is thrown.
template <class E, class F>
std::string message_of(F&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  } catch (...) {
    FAIL("threw a different exception type");
  }
  FAIL("expected an exception");
  return {};
}

struct TempFile {
  fs::path path;
  explicit TempFile(const char* name) : path(fs::temp_directory_path() / name) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
};

}  // namespace

TEST_CASE("full-precision formatting round-trips doubles bitwise") {
  CHECK(format_full(1.0) == "1.0000000000000000e+00");
  CHECK(format_full(-0.5) == "-5.0000000000000000e-01");

  const std::vector<double> gnarly{
      std::numbers::pi,
      1.0 / 3.0,
      0.1 + 0.2,
      -0.0,
      6.02214076e23,
      5e-324,               // smallest subnormal
      1.7976931348623157e308,
      -2.2250738585072014e-308,
  };
  for (double v : gnarly) {
    const std::string s = format_full(v);
    double back = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(ec == std::errc());
    REQUIRE(end == s.data() + s.size());
    CHECK(std::memcmp(&back, &v, sizeof v) == 0);
  }
}

TEST_CASE("csv write/read round trip is bitwise") {
  TempFile f("oscavg_test_roundtrip.csv");
  CsvTable table;
  table.header = {"t", "H", "x0"};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-12, 12);
  for (int i = 0; i < 50; ++i) {
    table.rows.push_back({mant(rng) * std::pow(10.0, expo(rng)),
                          mant(rng) * std::pow(10.0, expo(rng)), mant(rng)});
  }
  write_csv(f.path, table);
  const CsvTable back = read_csv(f.path);
  REQUIRE(back.header == table.header);
  REQUIRE(back.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) CHECK(back.rows[i][c] == table.rows[i][c]);
  }
}

TEST_CASE("csv error paths") {
  TempFile f("oscavg_test_bad.csv");

  CsvTable mismatch;
  mismatch.header = {"a", "b"};
  mismatch.rows = {{1.0}};
  CHECK_THROWS_AS(write_csv(f.path, mismatch), Error);

  CHECK_THROWS_AS((void)read_csv(fs::temp_directory_path() / "oscavg_no_such_file.csv"), Error);

  {
    std::ofstream out(f.path);
    out << "a,b\n1.0,banana\n";
  }
  const std::string msg = message_of<Error>([&] { (void)read_csv(f.path); });
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("banana") != std::string::npos);

  {
    std::ofstream out(f.path);
    out << "a,b\n1.0,2.0,3.0\n";
  }
  CHECK_THROWS_AS((void)read_csv(f.path), Error);

  {
    std::ofstream out(f.path);
    out.close();
  }
  CHECK_THROWS_AS((void)read_csv(f.path), Error);
}

TEST_CASE("csv reader accepts CRLF line endings") {
  TempFile f("oscavg_test_crlf.csv");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "t,v\r\n1.0,2.0\r\n\r\n";
  }
  const CsvTable t = read_csv(f.path);
  REQUIRE(t.header.size() == 2);
  CHECK(t.header[1] == "v");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][1] == 2.0);
}

TEST_CASE("default configuration survives a serialize/parse round trip") {
  const ExperimentConfig def;
  const ExperimentConfig back = ExperimentConfig::parse(def.serialize());
  CHECK(back == def);
}

TEST_CASE("fully populated configuration survives a round trip") {
  ExperimentConfig cfg;
  cfg.model = "vdp";
  cfg.initial_t = -1.25;
  cfg.initial_H = 1.0 / 3.0;
  cfg.initial_x = {0.1 + 0.2, -0.0};
  cfg.simulate_t_end = 80.0;
  cfg.gamma = 0.75;
  cfg.L = std::numbers::pi;
  cfg.window_samples = 300;
  cfg.compare_t_star = std::sqrt(2.0);
  cfg.scaling_experiment = "epsilon_sweep";
  cfg.H_star_list = {0.4, 0.2, 0.1, 0.05};
  cfg.epsilon_list = {0.3, 0.15, 0.075, 0.0375};
  cfg.integrator.method = Method::fixed_rk4;
  cfg.integrator.step = 0.017;
  cfg.integrator.max_steps = 123456;
  cfg.integrator.enforce_positive_H = false;
  cfg.quadrature.rule = QuadratureRule::gauss_legendre;
  cfg.quadrature.nodes = 128;
  cfg.quadrature.check_tol = 1e-9;
  cfg.sup_f1 = std::sqrt(3.0);
  cfg.sup_f2 = 0.0;
  cfg.c_L = 7.7;
  cfg.noise_floor = 1e-12;
  cfg.lipschitz_samples = 999;
  cfg.seed = UINT64_MAX;
  cfg.threads = 5;
  cfg.exec = "serial";
  cfg.output_dir = "results/alt";

  const ExperimentConfig back = ExperimentConfig::parse(cfg.serialize());
  CHECK(back == cfg);

  // And again through a file.
  TempFile f("oscavg_test_config.cfg");
  {
    std::ofstream out(f.path);
    out << cfg.serialize();
  }
  CHECK(ExperimentConfig::parse_file(f.path) == cfg);
}

TEST_CASE("parser handles comments, blank lines, and whitespace") {
  const char* text =
      "# experiment setup\n"
      "\n"
      "model = vdp\n"
      "\twindow.gamma\t=\t0.6   # tabs and a trailing comment\n"
      "window.L = 2.0\n"
      "run.exec = serial\n";
  const ExperimentConfig cfg = ExperimentConfig::parse(text);
  CHECK(cfg.model == "vdp");
  CHECK(cfg.gamma == 0.6);
  CHECK(cfg.L == 2.0);
  CHECK(cfg.exec == "serial");
  // Untouched keys keep their defaults.
  CHECK(cfg.window_samples == 256);
}

TEST_CASE("parser reports key and line for malformed input") {
  {
    const std::string msg = message_of<ConfigError>(
        [] { (void)ExperimentConfig::parse("model = vdp\nwindow.L = 1\nwindow.L = 2\n"); });
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("duplicate key 'window.L'") != std::string::npos);
  }
  {
    const std::string msg = message_of<ConfigError>(
        [] { (void)ExperimentConfig::parse("\n\n\nwibble.wobble = 3\n"); });
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("wibble.wobble") != std::string::npos);
  }
  {
    const std::string msg =
        message_of<ConfigError>([] { (void)ExperimentConfig::parse("just some words\n"); });
    CHECK(msg.find("key = value") != std::string::npos);
  }
  CHECK_THROWS_AS((void)ExperimentConfig::parse("model =\n"), ConfigError);
  CHECK_THROWS_AS((void)ExperimentConfig::parse("= 5\n"), ConfigError);
  CHECK_THROWS_AS((void)ExperimentConfig::parse_file("/no/such/dir/x.cfg"), ConfigError);
}

TEST_CASE("parser rejects values of the wrong shape") {
  auto bad = [](const char* line) {
    CHECK_THROWS_AS((void)ExperimentConfig::parse(line), ConfigError);
  };
  bad("window.gamma = banana\n");
  bad("window.samples = -3\n");
  bad("run.threads = 2.5\n");
  bad("lipschitz.seed = -3\n");
  bad("integrator.method = euler\n");
  bad("integrator.enforce_positive_H = yes\n");
  bad("quadrature.rule = midpoint\n");
  bad("run.exec = turbo\n");
  bad("scaling.H_star_list = 1,,0.5\n");

  const std::string msg = message_of<ConfigError>(
      [] { (void)ExperimentConfig::parse("window.gamma = banana\n"); });
  CHECK(msg.find("window.gamma") != std::string::npos);
  CHECK(msg.find("banana") != std::string::npos);
}

TEST_CASE("configuration range validation") {
  auto broken = [](auto&& mutate) {
    ExperimentConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  };
  broken([](ExperimentConfig& c) { c.model = "unknown"; });
  broken([](ExperimentConfig& c) { c.gamma = 0.0; });
  broken([](ExperimentConfig& c) { c.gamma = 1.0; });
  broken([](ExperimentConfig& c) { c.L = 0.0; });
  broken([](ExperimentConfig& c) { c.window_samples = 1; });
  broken([](ExperimentConfig& c) { c.simulate_t_end = c.initial_t; });
  broken([](ExperimentConfig& c) { c.scaling_experiment = "foo"; });
  broken([](ExperimentConfig& c) {
    c.compare_H_star = 0.5;
    c.compare_t_star = 1.0;
  });
  broken([](ExperimentConfig& c) { c.compare_H_star = 0.0; });
  broken([](ExperimentConfig& c) { c.initial_H = 0.0; });
  broken([](ExperimentConfig& c) { c.initial_x = {1.0}; });  // bianchi3 needs 3
  broken([](ExperimentConfig& c) { c.integrator.abs_tol = 1.0; });
  broken([](ExperimentConfig& c) { c.quadrature.nodes = 4; });
  broken([](ExperimentConfig& c) { c.sup_f1 = 0.0; });
  broken([](ExperimentConfig& c) { c.sup_f2 = -1.0; });
  broken([](ExperimentConfig& c) { c.c_L = 0.0; });
  broken([](ExperimentConfig& c) { c.noise_floor = -1.0; });
  broken([](ExperimentConfig& c) { c.lipschitz_samples = 0; });
  broken([](ExperimentConfig& c) { c.threads = -1; });
  broken([](ExperimentConfig& c) { c.exec = "turbo"; });
  broken([](ExperimentConfig& c) { c.output_dir = ""; });

  CHECK_NOTHROW(ExperimentConfig{}.validate());
}

TEST_CASE("configuration builds model, initial state, and run config") {
  ExperimentConfig cfg;
  cfg.model = "vdp";
  cfg.initial_t = 2.0;
  const OscillatoryModel m = cfg.make_model();
  CHECK(m.name == "vdp");

  SystemState s = cfg.make_initial(m);
  CHECK(s.t == 2.0);
  CHECK(s.H == m.default_initial.H);
  CHECK(s.x == m.default_initial.x);

  cfg.initial_H = 0.25;
  cfg.initial_x = {1.5, 0.5};
  s = cfg.make_initial(m);
  CHECK(s.H == 0.25);
  CHECK(s.x == std::vector<double>{1.5, 0.5});

  cfg.exec = "serial";
  cfg.window_samples = 64;
  const RunConfig rc = cfg.make_run_config(m);
  CHECK(rc.exec == Exec::serial);
  CHECK(rc.window_samples == 64);
  CHECK(rc.initial.H == 0.25);

  cfg.initial_x = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS((void)cfg.make_initial(m), ConfigError);
}
