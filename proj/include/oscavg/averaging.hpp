#pragma once

#include <cstddef>
#include <vector>

#include "oscavg/core.hpp"
#include "oscavg/integrate.hpp"
#include "oscavg/parallel.hpp"

namespace oscavg {

enum class QuadratureRule { composite_simpson, gauss_legendre };

struct QuadratureConfig {
  QuadratureRule rule = QuadratureRule::composite_simpson;
  /// Subinterval count (Simpson, rounded up to even) or point count
  /// (Gauss-Legendre).  Minimum 8.
  std::size_t nodes = 256;
  /// l1 tolerance for the node-doubling convergence check.
  double check_tol = 1e-8;

  bool operator==(const QuadratureConfig&) const = default;

  void validate() const;
};

/// Period average of the oscillatory field at frozen x = z:
///
///     fbar(z) = (1/T) * integral over [t_start, t_start + T] of f1(z, s) ds.
///
/// Computed at the configured node count and once more at double the
/// nodes; throws QuadratureError if the two disagree beyond check_tol in
/// l1, otherwise returns the refined value.  For a T-periodic field the
/// result is independent of t_start up to quadrature error.
[[nodiscard]] std::vector<double> period_average(const OscillatoryModel& model,
                                                 std::span<const double> z, double t_start,
                                                 const QuadratureConfig& quad);

/// period_average at many points.  points is row-major with
/// model.dimension columns.  Slot-parallel over points; serial and
/// parallel produce bitwise identical results.
[[nodiscard]] std::vector<std::vector<double>> period_average_batch(
    const OscillatoryModel& model, const std::vector<std::vector<double>>& points, double t_start,
    const QuadratureConfig& quad, Exec exec = Exec::parallel);

/// The y-system: the drive frozen at H_star, oscillatory field unchanged,
///
///     dH/dt = 0,    dy/dt = H_star f1(y, t).
///
/// The model must outlive the system.
struct TruncatedSystem {
  const OscillatoryModel* model = nullptr;
  double H_star = 0.0;
  double t_star = 0.0;

  [[nodiscard]] Rhs rhs() const;
};

/// The z-system: drive frozen and the field replaced by its period
/// average,
///
///     dH/dt = 0,    dz/dt = H_star fbar(z).
///
/// fbar is the model's closed-form average when present, else a
/// quadrature-backed evaluation (computed fresh at every rhs call).
struct AveragedSystem {
  const OscillatoryModel* model = nullptr;
  double H_star = 0.0;
  double t_star = 0.0;
  VectorField fbar;

  [[nodiscard]] Rhs rhs() const;
};

struct TruncatedBuild {
  TruncatedSystem system;
  SystemState initial;  ///< bitwise copy of the full state at t_star
};

struct AveragedBuild {
  AveragedSystem system;
  SystemState initial;  ///< bitwise copy of the full state at t_star
};

/// Freezes the drive of a full-system trajectory at t_star:
/// H_star = H(t_star) and the initial y is the interpolated x(t_star),
/// both taken bitwise from the dense trajectory.
[[nodiscard]] TruncatedBuild build_truncated(const OscillatoryModel& model, const Trajectory& full,
                                             double t_star);

/// Same freeze plus field averaging.  quad configures the fallback
/// quadrature when the model has no closed-form average.
[[nodiscard]] AveragedBuild build_averaged(const OscillatoryModel& model, const Trajectory& full,
                                           double t_star, const QuadratureConfig& quad);

}  // namespace oscavg
