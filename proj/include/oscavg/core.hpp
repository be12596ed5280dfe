#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscavg/errors.hpp"

namespace oscavg {

/// Discrete l1 norm, sum_i |u_i|.  All error measurements and integrator
/// error controls in this library use this norm.
[[nodiscard]] double l1_norm(std::span<const double> u);

/// l1 distance between equal-length vectors.  Throws RangeError on a
/// length mismatch.
[[nodiscard]] double l1_distance(std::span<const double> a, std::span<const double> b);

/// Instantaneous state of a driven system: the time t, the drive
/// parameter H, and the oscillatory variables x.
struct SystemState {
  double t = 0.0;
  double H = 0.0;
  std::vector<double> x;
};

/// Oscillatory part of a vector field: out = f(x, t), out.size() == x.size().
using VectorField = std::function<void(std::span<const double> x, double t, std::span<double> out)>;

/// Scalar coefficient field, f(x, t).
using ScalarField = std::function<double(std::span<const double> x, double t)>;

/// Throws AdmissibilityError when x lies outside the model's admissible
/// region, naming the violated condition.
using AdmissibilityCheck = std::function<void(std::span<const double> x)>;

/// Axis-aligned box in x-space, used as a sampling region.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// A time-periodic system in slow-drive form,
///
///     dH/dt = H^2 f2(x, t),      dx/dt = H f1(x, t),
///
/// with f1 and f2 periodic in t with the stated period.  H > 0 scales the
/// oscillatory dynamics; f2 describes the (slower, quadratic in H) decay
/// of the drive itself.
struct OscillatoryModel {
  std::string name;
  std::size_t dimension = 0;  ///< size of x
  double period = 0.0;        ///< period of f1, f2 in t
  VectorField f1;
  ScalarField f2;

  /// Closed-form period average of f1, when one is known: out = fbar(z).
  /// Absent, the averaged system falls back to quadrature.
  std::optional<VectorField> closed_form_average;

  /// Analytic bound on the l1 norm of f1 over the admissible region.
  std::optional<double> sup_f1;
  /// Analytic bound on |f2| over the admissible region.
  std::optional<double> sup_f2;

  /// Throws when x is outside the admissible region; empty means all of
  /// R^dimension is admissible.
  AdmissibilityCheck admissible;

  std::vector<std::string> component_names;  ///< CSV column names for x
  SystemState default_initial;
  Box default_lipschitz_region;  ///< sampling box for Lipschitz estimation

  void check_admissible(std::span<const double> x) const {
    if (admissible) admissible(x);
  }
};

/// Right-hand side of the full system at a state.
struct FullRhs {
  double dH = 0.0;
  std::vector<double> dx;
};

/// Evaluates the full slow-drive system at s: dH = H^2 f2(x, t),
/// dx = H f1(x, t).  Checks admissibility first and throws
/// EvaluationError if any component comes back non-finite.
FullRhs eval_full_rhs(const OscillatoryModel& model, const SystemState& s);

/// Dense ODE solution.  Stores accepted samples of the flat state
/// y = [H, x...] together with the derivative at each sample; between
/// samples it evaluates the cubic Hermite interpolant, which reproduces
/// stored samples bitwise at the nodes.
class Trajectory {
 public:
  /// dim is the flat state size (1 + dimension of x).
  explicit Trajectory(std::size_t dim);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return times_.size(); }
  [[nodiscard]] bool empty() const { return times_.empty(); }

  [[nodiscard]] double front_time() const;
  [[nodiscard]] double back_time() const;
  [[nodiscard]] double time(std::size_t i) const { return times_[i]; }

  [[nodiscard]] std::span<const double> values(std::size_t i) const;
  [[nodiscard]] std::span<const double> derivs(std::size_t i) const;
  [[nodiscard]] std::span<const double> back_values() const;

  /// Appends a sample.  Sample times must be strictly increasing.
  void push_back(double t, std::span<const double> y, std::span<const double> dy);

  /// Hermite interpolation of the full state into out (size dim).
  /// Throws RangeError outside [front_time, back_time].
  void interpolate(double t, std::span<double> out) const;

  /// Hermite interpolation of a single component.
  [[nodiscard]] double interpolate_component(double t, std::size_t c) const;

  /// Structured view of sample i: H = y[0], x = y[1..].
  [[nodiscard]] SystemState state(std::size_t i) const;

 private:
  std::size_t dim_;
  std::vector<double> times_;
  std::vector<double> values_;  // size() * dim_, row-major
  std::vector<double> derivs_;  // same layout

  [[nodiscard]] std::size_t segment_index(double t) const;
};

/// Hermite-interpolated state at time t.  Exact at sample nodes, including
/// the first: sample_at(traj, front_time()) returns the stored initial
/// state bitwise.
[[nodiscard]] SystemState sample_at(const Trajectory& traj, double t);

}  // namespace oscavg
