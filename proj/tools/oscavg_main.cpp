#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "oscavg/analysis.hpp"
#include "oscavg/config.hpp"
#include "oscavg/csv.hpp"
#include "oscavg/models.hpp"
#include "oscavg/parallel.hpp"

namespace fs = std::filesystem;
using namespace oscavg;

namespace {

// Exit codes: 0 success / experiment passed, 1 experiment failed its
// criterion, 2 configuration problem, 3 numerical failure.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct CliArgs {
  std::string config_path;
  std::string output_dir;  ///< overrides output.dir when nonempty
  bool verbose = false;
};

struct Session {
  ExperimentConfig cfg;
  OscillatoryModel model;
  RunConfig rc;
  fs::path out_dir;
};

Session open_session(const CliArgs& args) {
  Session s{ExperimentConfig::parse_file(args.config_path), {}, {}, {}};
  if (!args.output_dir.empty()) s.cfg.output_dir = args.output_dir;
  s.model = s.cfg.make_model();
  s.rc = s.cfg.make_run_config(s.model);
  if (s.cfg.threads > 0) set_threads(s.cfg.threads);
  s.out_dir = s.cfg.output_dir;
  fs::create_directories(s.out_dir);
  if (args.verbose) {
    std::cerr << "# model " << s.model.name << ", output " << s.out_dir.string() << ", threads "
              << max_threads() << "\n"
              << s.cfg.serialize();
  }
  return s;
}

/// Prints the summary and mirrors it to <out_dir>/<name>_summary.txt.
void emit_summary(const Session& s, const std::string& name, const std::string& text) {
  std::cout << text;
  const fs::path path = s.out_dir / (name + "_summary.txt");
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

/// Runs the window comparison selected by the config: anchored at the
/// drive level compare.H_star when set, else at the time compare.t_star
/// (default: the initial time).
ComparisonRun run_selected_comparison(const Session& s) {
  if (s.cfg.compare_H_star) {
    return compare_at_H(s.model, s.rc, *s.cfg.compare_H_star, s.cfg.gamma, s.cfg.L);
  }
  const double t_star = s.cfg.compare_t_star ? *s.cfg.compare_t_star : s.cfg.initial_t;
  return compare(s.model, s.rc, t_star, s.cfg.gamma, s.cfg.L);
}

GronwallBound make_bound(const Session& s, const ComparisonRun& run) {
  GronwallBound b;
  b.H_star = run.H_star;
  if (s.cfg.sup_f1) {
    b.sup_f1 = *s.cfg.sup_f1;
  } else if (s.model.sup_f1) {
    b.sup_f1 = *s.model.sup_f1;
  } else {
    throw ConfigError("model '" + s.model.name +
                      "' has no analytic sup_f1; set bounds.sup_f1 in the config");
  }
  if (s.cfg.sup_f2) {
    b.sup_f2 = *s.cfg.sup_f2;
  } else if (s.model.sup_f2) {
    b.sup_f2 = *s.model.sup_f2;
  } else {
    throw ConfigError("model '" + s.model.name +
                      "' has no analytic sup_f2; set bounds.sup_f2 in the config");
  }
  if (s.cfg.c_L) {
    b.c_L = *s.cfg.c_L;
  } else {
    b.c_L = estimate_lipschitz(s.model, s.model.default_lipschitz_region, s.cfg.lipschitz_samples,
                               s.cfg.seed, s.rc.exec);
  }
  b.validate();
  return b;
}

std::string describe_window(const ComparisonRun& run) {
  std::string text;
  text += "t_star = " + fmt(run.t_star) + ", H_star = " + fmt(run.H_star) + "\n";
  text += "window = " + fmt(run.window) + " (L = " + fmt(run.L) + ", gamma = " + fmt(run.gamma) +
          ")\n";
  if (run.window_truncated) {
    text += "window truncated at t = " + fmt(run.times.back()) + ": " + run.truncation_reason +
            "\n";
  }
  return text;
}

int cmd_simulate(const CliArgs& args) {
  const Session s = open_session(args);
  const IntegrationResult res =
      integrate(full_system_rhs(s.model), s.rc.initial, s.cfg.simulate_t_end, s.rc.integrator);

  CsvTable table;
  table.header = {"t", "H"};
  for (const auto& n : s.model.component_names) table.header.push_back(n);
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    std::vector<double> row;
    row.reserve(1 + res.trajectory.dim());
    row.push_back(res.trajectory.time(i));
    const auto y = res.trajectory.values(i);
    row.insert(row.end(), y.begin(), y.end());
    table.rows.push_back(std::move(row));
  }
  write_csv(s.out_dir / "simulate.csv", table);

  std::string text;
  text += "model " + s.model.name + ": integrated [" + fmt(s.rc.initial.t) + ", " +
          fmt(res.trajectory.back_time()) + "] in " + std::to_string(res.steps) + " steps\n";
  text += "status: " + std::string(to_string(res.status));
  if (!res.message.empty()) text += " (" + res.message + ")";
  text += "\n";
  const auto yb = res.trajectory.back_values();
  text += "final H = " + fmt(yb[0]) + "\n";
  for (std::size_t c = 0; c < s.model.dimension; ++c) {
    text += "final " + s.model.component_names[c] + " = " + fmt(yb[c + 1]) + "\n";
  }
  emit_summary(s, "simulate", text);
  return res.ok() ? kExitPass : kExitNumerical;
}

int cmd_compare(const CliArgs& args) {
  const Session s = open_session(args);
  const ComparisonRun run = run_selected_comparison(s);

  CsvTable table;
  table.header = {"t", "err_xy", "err_xz", "err_yz"};
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    table.rows.push_back({run.times[i], run.err_xy[i], run.err_xz[i], run.err_yz[i]});
  }
  write_csv(s.out_dir / "compare.csv", table);

  std::string text = "model " + s.model.name + " three-system comparison\n";
  text += describe_window(run);
  text += "sup |x - y| = " + fmt(run.sup_err_xy()) + "\n";
  text += "sup |x - z| = " + fmt(run.sup_err_xz()) + "\n";
  text += "sup |y - z| = " + fmt(run.sup_err_yz()) + "\n";
  text += "max triangle violation = " + fmt(run.max_triangle_violation()) + "\n";
  emit_summary(s, "compare", text);
  return kExitPass;
}

int cmd_scaling(const CliArgs& args) {
  const Session s = open_session(args);
  const bool hstar = s.cfg.scaling_experiment == "hstar_sweep";
  const ScalingReport rep =
      hstar ? scaling_experiment(s.model, s.rc, s.cfg.H_star_list, s.cfg.gamma, s.cfg.L)
            : classical_averaging_experiment(s.model, s.rc, s.cfg.epsilon_list, s.cfg.L);

  CsvTable table;
  table.header = {hstar ? "H_star" : "epsilon", "t_star", "window",
                  hstar ? "sup_err_xz" : "sup_err_yz"};
  for (std::size_t i = 0; i < rep.H_star_values.size(); ++i) {
    table.rows.push_back(
        {rep.H_star_values[i], rep.t_stars[i], rep.runs[i].window, rep.sup_errors[i]});
  }
  write_csv(s.out_dir / "scaling.csv", table);

  std::string text = "model " + s.model.name + " " + rep.experiment + " (" +
                     std::to_string(rep.H_star_values.size()) + " levels, L = " + fmt(rep.L);
  if (hstar) text += ", gamma = " + fmt(rep.gamma);
  text += ")\n";
  text += "fitted exponent      = " + fmt(rep.fitted_exponent) + "\n";
  text += "theoretical exponent = " + fmt(rep.theoretical_exponent) + "\n";
  text += "max log-log fit deviation = " + fmt(rep.fit_residual) + "\n";
  text += std::string("verdict: ") + (rep.pass ? "PASS" : "FAIL") +
          " (require fitted >= theoretical - 0.15)\n";
  emit_summary(s, "scaling", text);
  return rep.pass ? kExitPass : kExitFail;
}

int cmd_bound_check(const CliArgs& args) {
  const Session s = open_session(args);
  const ComparisonRun run = run_selected_comparison(s);
  const GronwallBound bound = make_bound(s, run);
  const BoundCheckReport rep = gronwall_check(run, bound, s.cfg.noise_floor);

  CsvTable table;
  table.header = {"t", "err_xy", "bound"};
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    table.rows.push_back({run.times[i], run.err_xy[i], rep.bound_values[i]});
  }
  write_csv(s.out_dir / "bound_check.csv", table);

  std::string text = "model " + s.model.name + " truncation error bound check\n";
  text += describe_window(run);
  text += "sup_f1 = " + fmt(bound.sup_f1) + ", sup_f2 = " + fmt(bound.sup_f2) +
          ", c_L = " + fmt(bound.c_L) + (s.cfg.c_L ? "" : " (estimated)") + "\n";
  text += "noise floor = " + fmt(rep.noise_floor) + "\n";
  text += "violations: " + std::to_string(rep.violations) + " of " +
          std::to_string(run.times.size()) + " samples, max err/bound ratio = " +
          fmt(rep.max_ratio) + "\n";
  text += std::string("verdict: ") + (rep.pass ? "PASS" : "FAIL") +
          " (require err_xy <= bound + noise floor at every sample)\n";
  emit_summary(s, "bound_check", text);
  return rep.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal averaging diagnostics for oscillatory systems with a decaying drive"};
  app.require_subcommand(1);

  CliArgs args;
  auto add_common = [&args](CLI::App* sub) {
    sub->add_option("-c,--config", args.config_path, "experiment configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", args.output_dir, "override output.dir from the config");
    sub->add_flag("-v,--verbose", args.verbose, "echo the configuration and progress to stderr");
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate the full system and dump the trajectory");
  CLI::App* cmp = app.add_subcommand("compare",
                                     "compare full, truncated, and averaged systems on a window");
  CLI::App* sca = app.add_subcommand("scaling", "sweep drive levels and fit the error exponent");
  CLI::App* bnd = app.add_subcommand("bound-check",
                                     "check the a priori truncation bound against measured error");
  for (CLI::App* sub : {sim, cmp, sca, bnd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(args);
    if (cmp->parsed()) return cmd_compare(args);
    if (sca->parsed()) return cmd_scaling(args);
    return cmd_bound_check(args);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
