#include "oscavg/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace oscavg {

double l1_norm(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += std::fabs(v);
  return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw RangeError("l1_distance: length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

FullRhs eval_full_rhs(const OscillatoryModel& model, const SystemState& s) {
  if (s.x.size() != model.dimension) {
    throw RangeError("eval_full_rhs: state dimension " + std::to_string(s.x.size()) +
                     " does not match model '" + model.name + "' dimension " +
                     std::to_string(model.dimension));
  }
  model.check_admissible(s.x);

  FullRhs out;
  out.dx.assign(model.dimension, 0.0);
  model.f1(s.x, s.t, out.dx);
  const double f2 = model.f2 ? model.f2(s.x, s.t) : 0.0;
  out.dH = s.H * s.H * f2;
  for (double v : out.dx) {
    if (!std::isfinite(v)) {
      throw EvaluationError("eval_full_rhs: non-finite f1 component for model '" + model.name +
                            "' at t = " + std::to_string(s.t));
    }
  }
  if (!std::isfinite(out.dH)) {
    throw EvaluationError("eval_full_rhs: non-finite dH for model '" + model.name + "' at t = " +
                          std::to_string(s.t));
  }
  for (double& v : out.dx) v *= s.H;
  return out;
}

Trajectory::Trajectory(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw RangeError("Trajectory: dimension must be positive");
}

double Trajectory::front_time() const {
  if (empty()) throw RangeError("Trajectory: empty");
  return times_.front();
}

double Trajectory::back_time() const {
  if (empty()) throw RangeError("Trajectory: empty");
  return times_.back();
}

std::span<const double> Trajectory::values(std::size_t i) const {
  if (i >= size()) throw RangeError("Trajectory: sample index out of range");
  return {values_.data() + i * dim_, dim_};
}

std::span<const double> Trajectory::derivs(std::size_t i) const {
  if (i >= size()) throw RangeError("Trajectory: sample index out of range");
  return {derivs_.data() + i * dim_, dim_};
}

std::span<const double> Trajectory::back_values() const { return values(size() - 1); }

void Trajectory::push_back(double t, std::span<const double> y, std::span<const double> dy) {
  if (y.size() != dim_ || dy.size() != dim_) {
    throw RangeError("Trajectory: sample dimension mismatch");
  }
  if (!std::isfinite(t)) throw RangeError("Trajectory: non-finite sample time");
  if (!empty() && t <= times_.back()) {
    throw RangeError("Trajectory: sample times must be strictly increasing (" +
                     std::to_string(t) + " after " + std::to_string(times_.back()) + ")");
  }
  times_.push_back(t);
  values_.insert(values_.end(), y.begin(), y.end());
  derivs_.insert(derivs_.end(), dy.begin(), dy.end());
}

std::size_t Trajectory::segment_index(double t) const {
  if (empty()) throw RangeError("Trajectory: empty");
  if (t < times_.front() || t > times_.back()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "Trajectory: time %.17g outside stored range [%.17g, %.17g]", t,
                  times_.front(), times_.back());
    throw RangeError(buf);
  }
  // Index of the last sample time <= t, capped so a segment follows it.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  if (i > 0) --i;
  if (i + 1 >= size()) i = size() - 2;
  return i;
}

void Trajectory::interpolate(double t, std::span<double> out) const {
  if (out.size() != dim_) throw RangeError("Trajectory: output dimension mismatch");
  // Exact node hits return stored values bitwise, single samples included.
  auto exact = std::lower_bound(times_.begin(), times_.end(), t);
  if (exact != times_.end() && *exact == t) {
    auto v = values(static_cast<std::size_t>(exact - times_.begin()));
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  if (size() == 1) {
    throw RangeError("Trajectory: single-sample trajectory queried off its node");
  }
  const std::size_t i = segment_index(t);
  const double t0 = times_[i], t1 = times_[i + 1];
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double* y0 = values_.data() + i * dim_;
  const double* y1 = values_.data() + (i + 1) * dim_;
  const double* d0 = derivs_.data() + i * dim_;
  const double* d1 = derivs_.data() + (i + 1) * dim_;
  for (std::size_t c = 0; c < dim_; ++c) {
    out[c] = h00 * y0[c] + h10 * h * d0[c] + h01 * y1[c] + h11 * h * d1[c];
  }
}

double Trajectory::interpolate_component(double t, std::size_t c) const {
  if (c >= dim_) throw RangeError("Trajectory: component index out of range");
  auto exact = std::lower_bound(times_.begin(), times_.end(), t);
  if (exact != times_.end() && *exact == t) {
    return values_[static_cast<std::size_t>(exact - times_.begin()) * dim_ + c];
  }
  if (size() == 1) {
    throw RangeError("Trajectory: single-sample trajectory queried off its node");
  }
  const std::size_t i = segment_index(t);
  const double t0 = times_[i], t1 = times_[i + 1];
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * values_[i * dim_ + c] + h10 * h * derivs_[i * dim_ + c] +
         h01 * values_[(i + 1) * dim_ + c] + h11 * h * derivs_[(i + 1) * dim_ + c];
}

SystemState Trajectory::state(std::size_t i) const {
  auto v = values(i);
  SystemState s;
  s.t = times_[i];
  s.H = v[0];
  s.x.assign(v.begin() + 1, v.end());
  return s;
}

SystemState sample_at(const Trajectory& traj, double t) {
  std::vector<double> y(traj.dim());
  traj.interpolate(t, y);
  SystemState s;
  s.t = t;
  s.H = y[0];
  s.x.assign(y.begin() + 1, y.end());
  return s;
}

}  // namespace oscavg
