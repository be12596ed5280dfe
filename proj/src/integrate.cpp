#include "oscavg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <vector>

namespace oscavg {

namespace {

// Dormand-Prince 5(4) tableau.  The first row of e gives the difference
// between the 5th and embedded 4th order weights; stage 7 is FSAL.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,     0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84,  0.0};
constexpr double kErr[7] = {71.0 / 57600,       0.0,          -71.0 / 16695, 71.0 / 1920,
                            -17253.0 / 339200, 22.0 / 525,   -1.0 / 40};

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double min_resolvable_step(double t) { return 1e-14 * std::max(1.0, std::fabs(t)); }

std::string at_time_message(const char* what, double t) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s at t = %.17g", what, t);
  return buf;
}

/// Advances traj to t_end.  The trajectory must hold at least one sample
/// whose stored derivative equals rhs at that node.  H_stop, when set,
/// ends the run (status ok) at the first accepted sample with
/// y[0] <= *H_stop.
StepOutcome advance(const Rhs& rhs, Trajectory& traj, double t_end, const IntegratorConfig& cfg,
                    const std::optional<double>& H_stop) {
  cfg.validate();
  const std::size_t dim = traj.dim();
  StepOutcome out;

  double t = traj.back_time();
  if (!(t_end > t)) {
    throw RangeError(at_time_message("extend: t_end must exceed the trajectory end", t));
  }

  std::vector<double> y(traj.back_values().begin(), traj.back_values().end());
  std::vector<double> k1(traj.derivs(traj.size() - 1).begin(), traj.derivs(traj.size() - 1).end());
  std::vector<double> k[7];
  for (auto& s : k) s.assign(dim, 0.0);
  std::vector<double> y_stage(dim), y_new(dim), d_new(dim);

  const bool adaptive = cfg.method == Method::adaptive_embedded_45;
  double h = adaptive ? std::min(0.1, (t_end - t) / 10.0) : cfg.step;

  auto eval = [&](double ts, const std::vector<double>& ys, std::vector<double>& ks) -> bool {
    try {
      rhs(ts, ys, ks);
    } catch (const AdmissibilityError& e) {
      out.status = IntegrationStatus::inadmissible;
      out.message = e.what();
      return false;
    } catch (const EvaluationError& e) {
      out.status = IntegrationStatus::nonfinite_derivative;
      out.message = e.what();
      return false;
    }
    if (!all_finite(ks)) {
      out.status = IntegrationStatus::nonfinite_derivative;
      out.message = at_time_message("non-finite derivative", ts);
      return false;
    }
    return true;
  };

  while (t < t_end) {
    if (out.steps >= cfg.max_steps) {
      out.status = IntegrationStatus::max_steps_exceeded;
      out.message = at_time_message("step budget exhausted", t);
      return out;
    }
    bool last = h >= t_end - t;
    if (last) h = t_end - t;
    if (!last && h < min_resolvable_step(t)) {
      out.status = IntegrationStatus::step_underflow;
      out.message = at_time_message("step size underflow", t);
      return out;
    }
    const double t_new = last ? t_end : t + h;

    double err_ratio = 0.0;
    if (adaptive) {
      k[0] = k1;
      bool stage_failed = false;
      for (int s = 1; s < 7; ++s) {
        for (std::size_t c = 0; c < dim; ++c) {
          double acc = 0.0;
          for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][c];
          y_stage[c] = y[c] + h * acc;
        }
        if (!eval(t + kC[s] * h, y_stage, k[s])) {
          stage_failed = true;
          break;
        }
      }
      if (stage_failed) {
        // The failure sits somewhere inside this step's probe, not at the
        // accepted state.  Shrink to localize it; flag only once the step
        // cannot be resolved, so the run ends at the actual exit point
        // rather than wherever a long probe first poked outside.
        ++out.steps;
        h *= 0.5;
        if (h < min_resolvable_step(t)) return out;
        out.status = IntegrationStatus::ok;
        out.message.clear();
        continue;
      }
      // Stage 6 state is the 5th order solution (FSAL); k[6] its derivative.
      y_new = y_stage;
      d_new = k[6];
      double err = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        double acc = 0.0;
        for (int s = 0; s < 7; ++s) acc += kErr[s] * k[s][c];
        err += std::fabs(h * acc);
      }
      const double scale = cfg.abs_tol + cfg.rel_tol * l1_norm(y);
      err_ratio = err / scale;
      if (!std::isfinite(err_ratio)) {
        out.status = IntegrationStatus::nonfinite_derivative;
        out.message = at_time_message("non-finite error estimate", t);
        return out;
      }
    } else {
      k[0] = k1;
      for (std::size_t c = 0; c < dim; ++c) y_stage[c] = y[c] + 0.5 * h * k[0][c];
      if (!eval(t + 0.5 * h, y_stage, k[1])) return out;
      for (std::size_t c = 0; c < dim; ++c) y_stage[c] = y[c] + 0.5 * h * k[1][c];
      if (!eval(t + 0.5 * h, y_stage, k[2])) return out;
      for (std::size_t c = 0; c < dim; ++c) y_stage[c] = y[c] + h * k[2][c];
      if (!eval(t + h, y_stage, k[3])) return out;
      for (std::size_t c = 0; c < dim; ++c) {
        y_new[c] = y[c] + (h / 6.0) * (k[0][c] + 2.0 * k[1][c] + 2.0 * k[2][c] + k[3][c]);
      }
      if (!eval(t_new, y_new, d_new)) return out;
    }

    ++out.steps;
    if (adaptive && err_ratio > 1.0) {
      h *= std::clamp(0.9 * std::pow(err_ratio, -0.2), 0.2, 5.0);
      continue;
    }
    if (!all_finite(y_new)) {
      out.status = IntegrationStatus::nonfinite_derivative;
      out.message = at_time_message("non-finite state", t_new);
      return out;
    }
    if (cfg.enforce_positive_H && !(y_new[0] > 0.0)) {
      if (adaptive) {
        h *= 0.5;
        if (h >= min_resolvable_step(t)) continue;
      }
      out.status = IntegrationStatus::H_nonpositive;
      out.message = at_time_message("drive H left (0, inf)", t_new);
      return out;
    }
    traj.push_back(t_new, y_new, d_new);
    t = t_new;
    y = y_new;
    k1 = d_new;
    if (H_stop && y[0] <= *H_stop) return out;
    if (adaptive) {
      const double grow =
          err_ratio > 0.0 ? std::clamp(0.9 * std::pow(err_ratio, -0.2), 0.2, 5.0) : 5.0;
      h *= grow;
    }
  }
  return out;
}

Trajectory seed_trajectory(const Rhs& rhs, const SystemState& s0) {
  const std::size_t dim = 1 + s0.x.size();
  std::vector<double> y(dim);
  y[0] = s0.H;
  std::copy(s0.x.begin(), s0.x.end(), y.begin() + 1);
  std::vector<double> dy(dim);
  rhs(s0.t, y, dy);
  if (!all_finite(dy)) {
    throw EvaluationError(at_time_message("non-finite derivative at initial state", s0.t));
  }
  Trajectory traj(dim);
  traj.push_back(s0.t, y, dy);
  return traj;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (method == Method::fixed_rk4) {
    if (!(step > 0.0) || !std::isfinite(step)) {
      throw ConfigError("integrator.step must be positive and finite");
    }
  } else {
    auto check_tol = [](const char* name, double v) {
      if (!(v >= 1e-14 && v <= 1e-2)) {
        throw ConfigError(std::string("integrator.") + name + " must lie in [1e-14, 1e-2]");
      }
    };
    check_tol("abs_tol", abs_tol);
    check_tol("rel_tol", rel_tol);
  }
  if (max_steps == 0) throw ConfigError("integrator.max_steps must be positive");
}

const char* to_string(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::ok: return "ok";
    case IntegrationStatus::H_nonpositive: return "H_nonpositive";
    case IntegrationStatus::step_underflow: return "step_underflow";
    case IntegrationStatus::max_steps_exceeded: return "max_steps_exceeded";
    case IntegrationStatus::nonfinite_derivative: return "nonfinite_derivative";
    case IntegrationStatus::inadmissible: return "inadmissible";
  }
  return "unknown";
}

IntegrationResult integrate(const Rhs& rhs, const SystemState& s0, double t_end,
                            const IntegratorConfig& cfg) {
  cfg.validate();
  if (cfg.enforce_positive_H && !(s0.H > 0.0)) {
    throw HypothesisError("integrate: initial H must be positive");
  }
  IntegrationResult res{seed_trajectory(rhs, s0), IntegrationStatus::ok, 0, {}};
  StepOutcome o = advance(rhs, res.trajectory, t_end, cfg, std::nullopt);
  res.status = o.status;
  res.steps = o.steps;
  res.message = std::move(o.message);
  return res;
}

StepOutcome extend(const Rhs& rhs, Trajectory& traj, double t_end, const IntegratorConfig& cfg) {
  if (traj.empty()) throw RangeError("extend: trajectory is empty");
  return advance(rhs, traj, t_end, cfg, std::nullopt);
}

IntegrationResult integrate_until_H(const Rhs& rhs, const SystemState& s0, double H_floor,
                                    double t_max, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!(H_floor > 0.0)) throw RangeError("integrate_until_H: H_floor must be positive");
  if (!(s0.H > H_floor)) {
    throw RangeError("integrate_until_H: initial H must exceed H_floor");
  }
  if (!(t_max > s0.t)) throw RangeError("integrate_until_H: t_max must exceed the initial time");
  IntegrationResult res{seed_trajectory(rhs, s0), IntegrationStatus::ok, 0, {}};
  StepOutcome o = advance(rhs, res.trajectory, t_max, cfg, H_floor);
  res.status = o.status;
  res.steps = o.steps;
  res.message = std::move(o.message);
  return res;
}

double locate_H_crossing(const Trajectory& traj, double H_target) {
  if (traj.empty()) throw RangeError("locate_H_crossing: trajectory is empty");
  const std::size_t n = traj.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(traj.values(i + 1)[0] < traj.values(i)[0])) {
      throw HypothesisError(
          at_time_message("locate_H_crossing: sampled H is not strictly decreasing",
                          traj.time(i + 1)));
    }
  }
  const double H_first = traj.values(0)[0];
  const double H_last = traj.values(n - 1)[0];
  if (H_target > H_first) {
    throw RangeError("locate_H_crossing: target " + std::to_string(H_target) +
                     " is above the initial H " + std::to_string(H_first));
  }
  if (H_target < H_last) {
    throw RangeError("locate_H_crossing: target " + std::to_string(H_target) +
                     " is below the final sampled H " + std::to_string(H_last));
  }
  if (H_target == H_first) return traj.time(0);

  // Bracketing segment: sampled H is strictly decreasing, so binary search
  // for the first sample at or below the target.
  std::size_t lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (traj.values(mid)[0] <= H_target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (traj.values(hi)[0] == H_target) return traj.time(hi);

  double ta = traj.time(lo), tb = traj.time(hi);
  for (int it = 0; it < 40; ++it) {
    const double tm = 0.5 * (ta + tb);
    if (traj.interpolate_component(tm, 0) > H_target) {
      ta = tm;
    } else {
      tb = tm;
    }
  }
  return 0.5 * (ta + tb);
}

Rhs full_system_rhs(const OscillatoryModel& model) {
  const OscillatoryModel* m = &model;
  return [m](double t, std::span<const double> y, std::span<double> dy) {
    auto x = y.subspan(1);
    m->check_admissible(x);
    m->f1(x, t, dy.subspan(1));
    const double f2 = m->f2 ? m->f2(x, t) : 0.0;
    const double H = y[0];
    for (std::size_t c = 1; c < dy.size(); ++c) {
      if (!std::isfinite(dy[c])) {
        throw EvaluationError("model '" + m->name + "': non-finite f1 component " +
                              std::to_string(c - 1) + " at t = " + std::to_string(t));
      }
      dy[c] *= H;
    }
    dy[0] = H * H * f2;
    if (!std::isfinite(dy[0])) {
      throw EvaluationError("model '" + m->name + "': non-finite dH at t = " + std::to_string(t));
    }
  };
}

}  // namespace oscavg
