#include "oscavg/averaging.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace oscavg {

namespace {

void check_finite_field(const OscillatoryModel& model, std::span<const double> v, double t) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw EvaluationError("model '" + model.name + "': non-finite f1 value at t = " +
                            std::to_string(t));
    }
  }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.  Symmetric pairs share one iteration.
void legendre_nodes(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double xi = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                         (static_cast<double>(n) + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p_prev = 0.0, p = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double jd = static_cast<double>(j);
        const double p_next = ((2.0 * jd + 1.0) * xi * p - jd * p_prev) / (jd + 1.0);
        p_prev = p;
        p = p_next;
      }
      deriv = static_cast<double>(n) * (xi * p - p_prev) / (xi * xi - 1.0);
      const double dx = p / deriv;
      xi -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    x[i] = xi;
    x[n - 1 - i] = -xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * deriv * deriv);
    w[n - 1 - i] = w[i];
  }
}

std::vector<double> average_at_nodes(const OscillatoryModel& model, std::span<const double> z,
                                     double t_start, QuadratureRule rule, std::size_t nodes) {
  const std::size_t dim = model.dimension;
  const double T = model.period;
  std::vector<double> acc(dim, 0.0), f(dim, 0.0);

  if (rule == QuadratureRule::composite_simpson) {
    std::size_t n = nodes + (nodes % 2);  // even subinterval count
    for (std::size_t j = 0; j <= n; ++j) {
      const double t = t_start + T * static_cast<double>(j) / static_cast<double>(n);
      model.f1(z, t, f);
      check_finite_field(model, f, t);
      const double coeff = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      for (std::size_t c = 0; c < dim; ++c) acc[c] += coeff * f[c];
    }
    const double norm = 3.0 * static_cast<double>(n);  // (h/3)/T = 1/(3n)
    for (double& v : acc) v /= norm;
    return acc;
  }

  std::vector<double> xs, ws;
  legendre_nodes(nodes, xs, ws);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double t = t_start + 0.5 * T * (xs[j] + 1.0);
    model.f1(z, t, f);
    check_finite_field(model, f, t);
    for (std::size_t c = 0; c < dim; ++c) acc[c] += ws[j] * f[c];
  }
  for (double& v : acc) v *= 0.5;  // sum of weights is 2
  return acc;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (nodes < 8) throw ConfigError("quadrature.nodes must be at least 8");
  if (!(check_tol > 0.0)) throw ConfigError("quadrature.check_tol must be positive");
}

std::vector<double> period_average(const OscillatoryModel& model, std::span<const double> z,
                                   double t_start, const QuadratureConfig& quad) {
  quad.validate();
  if (z.size() != model.dimension) {
    throw RangeError("period_average: point dimension mismatch for model '" + model.name + "'");
  }
  model.check_admissible(z);

  std::vector<double> coarse = average_at_nodes(model, z, t_start, quad.rule, quad.nodes);
  std::vector<double> fine = average_at_nodes(model, z, t_start, quad.rule, 2 * quad.nodes);
  const double diff = l1_distance(coarse, fine);
  if (diff > quad.check_tol) {
    throw QuadratureError("period_average: node doubling moved the result by " +
                          std::to_string(diff) + " (tolerance " + std::to_string(quad.check_tol) +
                          "); increase quadrature.nodes");
  }
  return fine;
}

std::vector<std::vector<double>> period_average_batch(const OscillatoryModel& model,
                                                      const std::vector<std::vector<double>>& points,
                                                      double t_start, const QuadratureConfig& quad,
                                                      Exec exec) {
  std::vector<std::vector<double>> out(points.size());
  for_each_index(exec, static_cast<std::ptrdiff_t>(points.size()), [&](std::ptrdiff_t i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = period_average(model, p, t_start, quad);
  });
  return out;
}

Rhs TruncatedSystem::rhs() const {
  const OscillatoryModel* m = model;
  const double Hs = H_star;
  return [m, Hs](double t, std::span<const double> y, std::span<double> dy) {
    auto x = y.subspan(1);
    m->check_admissible(x);
    m->f1(x, t, dy.subspan(1));
    for (std::size_t c = 1; c < dy.size(); ++c) {
      if (!std::isfinite(dy[c])) {
        throw EvaluationError("model '" + m->name + "': non-finite f1 component " +
                              std::to_string(c - 1) + " at t = " + std::to_string(t));
      }
      dy[c] *= Hs;
    }
    dy[0] = 0.0;  // the drive is frozen
  };
}

Rhs AveragedSystem::rhs() const {
  const OscillatoryModel* m = model;
  const double Hs = H_star;
  const VectorField f = fbar;
  return [m, Hs, f](double t, std::span<const double> y, std::span<double> dy) {
    auto x = y.subspan(1);
    m->check_admissible(x);
    f(x, t, dy.subspan(1));
    for (std::size_t c = 1; c < dy.size(); ++c) {
      if (!std::isfinite(dy[c])) {
        throw EvaluationError("model '" + m->name + "': non-finite averaged component " +
                              std::to_string(c - 1) + " at t = " + std::to_string(t));
      }
      dy[c] *= Hs;
    }
    dy[0] = 0.0;
  };
}

namespace {

SystemState freeze_state(const Trajectory& full, double t_star) {
  return sample_at(full, t_star);
}

}  // namespace

TruncatedBuild build_truncated(const OscillatoryModel& model, const Trajectory& full,
                               double t_star) {
  if (full.dim() != model.dimension + 1) {
    throw RangeError("build_truncated: trajectory dimension does not match model '" + model.name +
                     "'");
  }
  SystemState s = freeze_state(full, t_star);
  if (!(s.H > 0.0)) {
    throw HypothesisError("build_truncated: H(t_star) = " + std::to_string(s.H) +
                          " is not positive");
  }
  TruncatedBuild b;
  b.system = {&model, s.H, t_star};
  b.initial = std::move(s);
  return b;
}

AveragedBuild build_averaged(const OscillatoryModel& model, const Trajectory& full, double t_star,
                             const QuadratureConfig& quad) {
  if (full.dim() != model.dimension + 1) {
    throw RangeError("build_averaged: trajectory dimension does not match model '" + model.name +
                     "'");
  }
  quad.validate();
  SystemState s = freeze_state(full, t_star);
  if (!(s.H > 0.0)) {
    throw HypothesisError("build_averaged: H(t_star) = " + std::to_string(s.H) +
                          " is not positive");
  }
  AveragedBuild b;
  b.system.model = &model;
  b.system.H_star = s.H;
  b.system.t_star = t_star;
  if (model.closed_form_average) {
    b.system.fbar = *model.closed_form_average;
  } else {
    const OscillatoryModel* m = &model;
    const QuadratureConfig q = quad;
    const double ts = t_star;
    b.system.fbar = [m, q, ts](std::span<const double> z, double, std::span<double> out) {
      std::vector<double> avg = period_average(*m, z, ts, q);
      std::copy(avg.begin(), avg.end(), out.begin());
    };
  }
  b.initial = std::move(s);
  return b;
}

}  // namespace oscavg
