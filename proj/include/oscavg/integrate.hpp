#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "oscavg/core.hpp"

namespace oscavg {

enum class Method { fixed_rk4, adaptive_embedded_45 };

struct IntegratorConfig {
  Method method = Method::adaptive_embedded_45;
  double step = 1e-2;      ///< fixed_rk4 step size
  double abs_tol = 1e-10;  ///< adaptive absolute tolerance (l1)
  double rel_tol = 1e-10;  ///< adaptive relative tolerance (l1)
  std::size_t max_steps = 5'000'000;
  /// Abort when the H channel (component 0) leaves (0, inf).  Disable for
  /// integrating plain ODEs with no drive semantics.
  bool enforce_positive_H = true;

  bool operator==(const IntegratorConfig&) const = default;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Flat right-hand side dy/dt = rhs(t, y); channel 0 is H by convention.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// Non-ok statuses end the run with the trajectory intact.  The adaptive
/// method treats H_nonpositive, nonfinite_derivative and inadmissible as
/// step rejections first, shrinking until the exit point is resolved to
/// the minimum step, so the final sample sits against the actual crossing
/// rather than wherever a long step first probed outside.  fixed_rk4
/// flags them where they occur.
enum class IntegrationStatus {
  ok,
  H_nonpositive,          ///< H channel hit <= 0 (hypothesis violation, flagged not thrown)
  step_underflow,         ///< adaptive step shrank below resolvable size
  max_steps_exceeded,
  nonfinite_derivative,   ///< rhs produced NaN/inf
  inadmissible,           ///< model admissibility check failed mid-run
};

[[nodiscard]] const char* to_string(IntegrationStatus s);

/// Outcome of advancing a trajectory.  On a non-ok status the trajectory
/// holds all samples accepted before the failure.
struct StepOutcome {
  IntegrationStatus status = IntegrationStatus::ok;
  std::size_t steps = 0;    ///< accepted steps
  std::string message;      ///< diagnostic for non-ok status
  [[nodiscard]] bool ok() const { return status == IntegrationStatus::ok; }
};

struct IntegrationResult {
  Trajectory trajectory;
  IntegrationStatus status = IntegrationStatus::ok;
  std::size_t steps = 0;
  std::string message;
  [[nodiscard]] bool ok() const { return status == IntegrationStatus::ok; }
};

/// Integrates dy/dt = rhs(t, y) from s0 (flattened as [H, x...]) to t_end,
/// recording every accepted step in a dense trajectory.  Requires
/// t_end > s0.t.  AdmissibilityError / EvaluationError thrown by the rhs
/// become flagged statuses; other exceptions propagate.
[[nodiscard]] IntegrationResult integrate(const Rhs& rhs, const SystemState& s0, double t_end,
                                          const IntegratorConfig& cfg);

/// Continues an existing trajectory to t_end, appending samples in place.
StepOutcome extend(const Rhs& rhs, Trajectory& traj, double t_end, const IntegratorConfig& cfg);

/// Integrates until the H channel first reaches H_floor or below, then
/// stops at the end of that step (the trajectory overshoots the crossing
/// by at most one step), or until t_max.  Requires 0 < H_floor < s0.H.
[[nodiscard]] IntegrationResult integrate_until_H(const Rhs& rhs, const SystemState& s0,
                                                  double H_floor, double t_max,
                                                  const IntegratorConfig& cfg);

/// Time at which the dense H channel crosses H_target, found by bisection
/// on the Hermite interpolant to absolute precision 1e-12 in t.  Requires
/// the sampled H channel to be strictly decreasing (HypothesisError
/// otherwise) and H_target within its sampled range (RangeError).
[[nodiscard]] double locate_H_crossing(const Trajectory& traj, double H_target);

/// Flat rhs of the full slow-drive system for a model:
/// dy[0] = y[0]^2 f2, dy[1..] = y[0] f1.  Throws AdmissibilityError /
/// EvaluationError from inside, which integrate converts to statuses.
[[nodiscard]] Rhs full_system_rhs(const OscillatoryModel& model);

}  // namespace oscavg
