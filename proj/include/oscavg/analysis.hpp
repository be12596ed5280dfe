#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oscavg/averaging.hpp"
#include "oscavg/core.hpp"
#include "oscavg/integrate.hpp"
#include "oscavg/parallel.hpp"

namespace oscavg {

/// Shared knobs for building and comparing the full (x), truncated (y)
/// and averaged (z) systems.
struct RunConfig {
  SystemState initial;  ///< full-system initial data
  IntegratorConfig integrator;
  QuadratureConfig quadrature;
  /// Uniformly spaced sample times across the comparison window; at least
  /// 200 are always used.
  std::size_t window_samples = 256;
  Exec exec = Exec::parallel;
};

/// Error series of one three-way comparison on the window
/// [t_star, t_star + L * H_star^(-gamma)].
struct ComparisonRun {
  double t_star = 0.0;
  double H_star = 0.0;
  double gamma = 0.0;
  double L = 0.0;
  double window = 0.0;  ///< L * H_star^(-gamma)

  std::vector<double> times;   ///< uniform over the window, first == t_star
  std::vector<double> err_xy;  ///< l1 distance x(t) vs y(t)
  std::vector<double> err_xz;  ///< l1 distance x(t) vs z(t)
  std::vector<double> err_yz;  ///< l1 distance y(t) vs z(t)

  /// True when y or z left the admissible region (or violated H > 0)
  /// before the window end; the series then stop at the last reachable
  /// sample time.
  bool window_truncated = false;
  std::string truncation_reason;

  [[nodiscard]] double sup_err_xy() const;
  [[nodiscard]] double sup_err_xz() const;
  [[nodiscard]] double sup_err_yz() const;

  /// max over samples of err_xz - err_xy - err_yz (triangle inequality
  /// puts this at or below rounding noise).
  [[nodiscard]] double max_triangle_violation() const;
};

/// Integrates the full system from cfg.initial past t_star, freezes at
/// t_star, and compares the three systems across the window.  t_star must
/// lie at or after cfg.initial.t.
[[nodiscard]] ComparisonRun compare(const OscillatoryModel& model, const RunConfig& cfg,
                                    double t_star, double gamma, double L);

/// Comparison against an already computed full-system trajectory.  The
/// trajectory must cover [t_star, t_star + window]; RangeError otherwise.
[[nodiscard]] ComparisonRun compare_on(const OscillatoryModel& model, const RunConfig& cfg,
                                       const Trajectory& full, double t_star, double gamma,
                                       double L);

/// Integrates the full system until H decays to H_target, locates the
/// crossing time, and runs the comparison there.  Requires a strictly
/// decreasing H (so f2 < 0 along the run).
[[nodiscard]] ComparisonRun compare_at_H(const OscillatoryModel& model, const RunConfig& cfg,
                                         double H_target, double gamma, double L);

/// The a priori truncation error bound
///
///     bound(dt) = (dt^2 / 2) * H_star^2 * sup_f2 * sup_f1 * exp(H_star * c_L * dt)
///
/// dominating ||x - y|| at time t_star + dt.  sup_f2 = 0 is meaningful
/// (a drive that never decays gives x == y); the other inputs must be
/// positive.
struct GronwallBound {
  double H_star = 0.0;
  double c_L = 0.0;     ///< Lipschitz constant of f1 in x, l1 norm
  double sup_f1 = 0.0;  ///< bound on l1 norm of f1
  double sup_f2 = 0.0;  ///< bound on |f2|

  [[nodiscard]] double operator()(double dt) const;

  /// Throws ConfigError unless H_star, c_L, sup_f1 > 0 and sup_f2 >= 0.
  void validate() const;
};

struct BoundCheckReport {
  bool pass = false;      ///< err_xy <= bound + noise_floor at every sample
  double max_ratio = 0.0; ///< max err_xy / bound; 0 where both vanish
  std::size_t violations = 0;
  double noise_floor = 0.0;
  std::vector<double> bound_values;  ///< aligned with run.times
};

/// Checks the bound against the measured err_xy series of a run.  The
/// noise floor absorbs integrator round-off where the analytic bound is
/// at or near zero; the dt = 0 sample has ratio 0 by convention.
[[nodiscard]] BoundCheckReport gronwall_check(const ComparisonRun& run, const GronwallBound& bound,
                                              double noise_floor = 1e-9);

/// Monte-Carlo estimate of the l1 Lipschitz constant of f1 in x over a
/// box: max finite-difference ratio over sample pairs, times a 1.5 safety
/// factor.  Deterministic for a fixed seed; slot-parallel over pairs.
[[nodiscard]] double estimate_lipschitz(const OscillatoryModel& model, const Box& region,
                                        std::size_t samples, std::uint64_t seed,
                                        Exec exec = Exec::parallel);

struct PowerLawFit {
  double exponent = 0.0;
  double residual = 0.0;  ///< max absolute log-log fit deviation
};

/// Least-squares slope of log(err) against log(h).  Needs at least 4
/// points with positive h and err (DegenerateDataError otherwise).
[[nodiscard]] PowerLawFit fit_scaling_exponent(std::span<const double> h,
                                               std::span<const double> err);

/// One comparison sweep across drive levels.
struct ScalingReport {
  std::string experiment;  ///< "hstar_sweep" or "epsilon_sweep"
  double gamma = 0.0;      ///< hstar_sweep only; NaN for epsilon_sweep
  double L = 0.0;
  std::vector<double> H_star_values;  ///< sweep parameter (epsilon for epsilon_sweep)
  std::vector<double> t_stars;
  std::vector<double> sup_errors;
  double fitted_exponent = 0.0;
  double theoretical_exponent = 0.0;
  double fit_residual = 0.0;
  bool pass = false;  ///< fitted >= theoretical - 0.15
  std::vector<ComparisonRun> runs;
};

/// Decaying-drive sweep: integrates one full trajectory from cfg.initial
/// until H falls past the smallest target, locates each H_star on it, and
/// compares the three systems on each window [t_star, t_star +
/// L * H_star^(-gamma)].  sup ||x - z|| per window is fitted against
/// H_star; the theoretical exponent is min(1, 2 - 2 gamma).
/// H_star_list must be strictly decreasing, positive, and have at least 4
/// entries.  Runs are slot-parallel.
[[nodiscard]] ScalingReport scaling_experiment(const OscillatoryModel& model, const RunConfig& cfg,
                                               std::span<const double> H_star_list, double gamma,
                                               double L);

/// Constant-drive sweep for models whose drive does not decay (f2 == 0):
/// for each epsilon the full system with H == epsilon is compared against
/// its averaged system on [t0, t0 + L / epsilon], and sup ||y - z|| is
/// fitted against epsilon; the theoretical exponent is 1.  With f2 == 0
/// the full and truncated systems coincide, so err_xy vanishes and
/// sup ||y - z|| equals sup ||x - z||.
[[nodiscard]] ScalingReport classical_averaging_experiment(const OscillatoryModel& model,
                                                           const RunConfig& cfg,
                                                           std::span<const double> epsilon_list,
                                                           double L);

}  // namespace oscavg
