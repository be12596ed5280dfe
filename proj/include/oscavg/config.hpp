#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oscavg/analysis.hpp"
#include "oscavg/averaging.hpp"
#include "oscavg/core.hpp"
#include "oscavg/integrate.hpp"

namespace oscavg {

/// Experiment description, read from a plain-text file of dotted
/// `key = value` lines (# starts a comment, blank lines ignored).  Unknown
/// or duplicate keys are errors; parse(serialize()) reproduces the
/// configuration exactly.
struct ExperimentConfig {
  std::string model = "bianchi3";

  double initial_t = 0.0;
  std::optional<double> initial_H;              ///< model default when absent
  std::optional<std::vector<double>> initial_x; ///< model default when absent

  double simulate_t_end = 50.0;

  double gamma = 0.5;
  double L = 1.0;
  std::size_t window_samples = 256;

  std::optional<double> compare_H_star;  ///< freeze where H reaches this
  std::optional<double> compare_t_star;  ///< or freeze at this time

  std::string scaling_experiment = "hstar_sweep";  ///< or "epsilon_sweep"
  std::vector<double> H_star_list = {0.2, 0.1, 0.05, 0.025};
  std::vector<double> epsilon_list = {0.2, 0.1, 0.05, 0.025};

  IntegratorConfig integrator;
  QuadratureConfig quadrature;

  std::optional<double> sup_f1;  ///< bound overrides; model analytic values when absent
  std::optional<double> sup_f2;
  std::optional<double> c_L;     ///< estimated by sampling when absent
  double noise_floor = 1e-9;

  std::size_t lipschitz_samples = 4096;
  std::uint64_t seed = 20250817;

  int threads = 0;              ///< 0: runtime default
  std::string exec = "parallel";  ///< or "serial"

  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig parse_file(const std::filesystem::path& path);

  /// Canonical text form; parse(serialize()) == *this.
  [[nodiscard]] std::string serialize() const;

  /// Range and consistency checks beyond per-key parsing.  Throws
  /// ConfigError.
  void validate() const;

  [[nodiscard]] OscillatoryModel make_model() const;
  [[nodiscard]] SystemState make_initial(const OscillatoryModel& m) const;
  [[nodiscard]] RunConfig make_run_config(const OscillatoryModel& m) const;
};

}  // namespace oscavg
