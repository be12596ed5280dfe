#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oscavg/csv.hpp"

using namespace oscavg;
namespace fs = std::filesystem;

namespace {

/// Workspace under the system temp dir, removed on destruction.
struct Workspace {
  fs::path dir;
  explicit Workspace(const char* name) : dir(fs::temp_directory_path() / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  [[nodiscard]] fs::path file(const char* rel, const std::string& content) const {
    const fs::path p = dir / rel;
    std::ofstream out(p);
    out << content;
    return p;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + OSCAVG_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("simulate writes the trajectory and keeps a constant drive constant") {
  Workspace ws("oscavg_cli_sim_vdp");
  const fs::path cfg = ws.file("run.cfg",
                               "model = vdp\n"
                               "simulate.t_end = 10\n"
                               "output.dir = " + (ws.dir / "out").string() + "\n");
  CHECK(run_cli("simulate -c " + quoted(cfg)) == 0);

  const CsvTable t = read_csv(ws.dir / "out" / "simulate.csv");
  REQUIRE(t.header.size() == 4);
  CHECK(t.header[0] == "t");
  CHECK(t.header[1] == "H");
  CHECK(t.header[2] == "r");
  CHECK(t.header[3] == "psi");
  REQUIRE(t.rows.size() >= 2);
  CHECK(t.rows.front()[0] == 0.0);
  CHECK(t.rows.back()[0] == 10.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i][1] == 0.1);  // dH/dt == 0 for this model, bitwise
    if (i > 0) CHECK(t.rows[i][0] > t.rows[i - 1][0]);
  }
  CHECK(fs::exists(ws.dir / "out" / "simulate_summary.txt"));
}

TEST_CASE("simulate shows the drive decaying for the cosmological model") {
  Workspace ws("oscavg_cli_sim_b3");
  const fs::path cfg = ws.file("run.cfg",
                               "model = bianchi3\n"
                               "simulate.t_end = 15\n"
                               "output.dir = " + (ws.dir / "out").string() + "\n");
  CHECK(run_cli("simulate -c " + quoted(cfg)) == 0);
  const CsvTable t = read_csv(ws.dir / "out" / "simulate.csv");
  REQUIRE(t.rows.size() >= 2);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.rows[i][1] < t.rows[i - 1][1]);
    CHECK(t.rows[i][1] > 0.0);
  }
}

TEST_CASE("compare writes aligned error series that start at zero") {
  Workspace ws("oscavg_cli_cmp");
  const fs::path cfg = ws.file("run.cfg",
                               "model = vdp\n"
                               "output.dir = " + (ws.dir / "out").string() + "\n");
  CHECK(run_cli("compare -c " + quoted(cfg)) == 0);
  const CsvTable t = read_csv(ws.dir / "out" / "compare.csv");
  REQUIRE(t.header == std::vector<std::string>({"t", "err_xy", "err_xz", "err_yz"}));
  REQUIRE(t.rows.size() >= 200);
  CHECK(t.rows.front()[0] == 0.0);
  CHECK(t.rows.front()[1] == 0.0);
  CHECK(t.rows.front()[2] == 0.0);
  CHECK(t.rows.front()[3] == 0.0);
  const std::string summary = slurp(ws.dir / "out" / "compare_summary.txt");
  CHECK(summary.find("sup |x - z|") != std::string::npos);
}

TEST_CASE("scaling sweep passes and reports four levels") {
  Workspace ws("oscavg_cli_scaling");
  const fs::path cfg = ws.file("run.cfg",
                               "model = vdp\n"
                               "scaling.experiment = epsilon_sweep\n"
                               "output.dir = " + (ws.dir / "out").string() + "\n");
  CHECK(run_cli("scaling -c " + quoted(cfg)) == 0);
  const CsvTable t = read_csv(ws.dir / "out" / "scaling.csv");
  REQUIRE(t.header.size() == 4);
  CHECK(t.header[0] == "epsilon");
  CHECK(t.header[3] == "sup_err_yz");
  REQUIRE(t.rows.size() == 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(t.rows[i][3] < t.rows[i - 1][3]);
  const std::string summary = slurp(ws.dir / "out" / "scaling_summary.txt");
  CHECK(summary.find("verdict: PASS") != std::string::npos);
}

TEST_CASE("bound check passes with model bounds and fails with a falsified bound") {
  Workspace ws("oscavg_cli_bound");
  const std::string out = (ws.dir / "out").string();
  const fs::path good = ws.file("good.cfg",
                                "model = bianchi3\n"
                                "compare.H_star = 0.5\n"
                                "output.dir = " + out + "\n");
  CHECK(run_cli("bound-check -c " + quoted(good)) == 0);
  const CsvTable t = read_csv(ws.dir / "out" / "bound_check.csv");
  REQUIRE(t.header == std::vector<std::string>({"t", "err_xy", "bound"}));
  for (const auto& row : t.rows) CHECK(row[1] <= row[2] + 1e-9);

  // An absurdly small claimed decay bound must be caught.
  const fs::path bad = ws.file("bad.cfg",
                               "model = bianchi3\n"
                               "compare.H_star = 0.5\n"
                               "bounds.sup_f2 = 1e-12\n"
                               "bounds.noise_floor = 0\n"
                               "output.dir = " + out + "2\n");
  CHECK(run_cli("bound-check -c " + quoted(bad)) == 1);
  const std::string summary = slurp(fs::path(out + "2") / "bound_check_summary.txt");
  CHECK(summary.find("verdict: FAIL") != std::string::npos);
}

TEST_CASE("configuration problems exit with code 2") {
  Workspace ws("oscavg_cli_cfgerr");
  const fs::path bad_range = ws.file("a.cfg", "model = vdp\nwindow.gamma = 1.5\n");
  CHECK(run_cli("compare -c " + quoted(bad_range)) == 2);
  const fs::path bad_key = ws.file("b.cfg", "model = vdp\nwibble = 3\n");
  CHECK(run_cli("compare -c " + quoted(bad_key)) == 2);
  CHECK(run_cli("compare -c " + quoted(ws.dir / "missing.cfg")) == 2);
  CHECK(run_cli("compare") == 2);   // missing required option
  CHECK(run_cli("frobnicate") == 2);  // unknown subcommand
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("hypothesis violations exit with code 3") {
  Workspace ws("oscavg_cli_numerr");
  // The cosmological drive decays, so the constant-drive sweep must refuse it.
  const fs::path cfg = ws.file("run.cfg",
                               "model = bianchi3\n"
                               "scaling.experiment = epsilon_sweep\n"
                               "output.dir = " + (ws.dir / "out").string() + "\n");
  CHECK(run_cli("scaling -c " + quoted(cfg)) == 3);
}

TEST_CASE("reruns are byte-identical and honor the output override") {
  Workspace ws("oscavg_cli_rerun");
  const fs::path cfg = ws.file("run.cfg",
                               "model = bianchi3\n"
                               "compare.t_star = 1.0\n"
                               "output.dir = " + (ws.dir / "a").string() + "\n");
  CHECK(run_cli("compare -c " + quoted(cfg)) == 0);
  CHECK(run_cli("compare -c " + quoted(cfg) + " -o " + quoted(ws.dir / "b")) == 0);
  CHECK(fs::exists(ws.dir / "b" / "compare.csv"));
  CHECK(slurp(ws.dir / "a" / "compare.csv") == slurp(ws.dir / "b" / "compare.csv"));
  CHECK(slurp(ws.dir / "a" / "compare_summary.txt") == slurp(ws.dir / "b" / "compare_summary.txt"));
}

TEST_CASE("the trivial model runs through every command") {
  Workspace ws("oscavg_cli_zero");
  const std::string out = (ws.dir / "out").string();
  const fs::path cfg = ws.file("run.cfg",
                               "model = zero\n"
                               "simulate.t_end = 5\n"
                               "bounds.sup_f1 = 1\n"
                               "bounds.sup_f2 = 0\n"
                               "bounds.c_L = 1\n"
                               "output.dir = " + out + "\n");
  CHECK(run_cli("simulate -c " + quoted(cfg)) == 0);
  CHECK(run_cli("compare -c " + quoted(cfg)) == 0);
  CHECK(run_cli("bound-check -c " + quoted(cfg)) == 0);
  const CsvTable t = read_csv(fs::path(out) / "compare.csv");
  for (const auto& row : t.rows) {
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
    CHECK(row[3] == 0.0);
  }
}
