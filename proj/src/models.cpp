#include "oscavg/models.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace oscavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to (-pi, pi].
double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

}  // namespace

AmplitudePhase amplitude_phase_forward(double phi, double phi_dot, double t) {
  AmplitudePhase out;
  out.r = std::hypot(phi, phi_dot);
  if (out.r == 0.0) {
    out.psi = 0.0;
    out.degenerate = true;
    return out;
  }
  // phi = r sin(t - psi), phi_dot = r cos(t - psi)  =>  t - psi = atan2(phi, phi_dot).
  out.psi = wrap_angle(t - std::atan2(phi, phi_dot));
  return out;
}

PhasePlanePoint amplitude_phase_inverse(double r, double psi, double t) {
  const double theta = t - psi;
  return {r * std::sin(theta), r * std::cos(theta)};
}

void vdp_f1(std::span<const double> x, double t, std::span<double> out) {
  const double theta = t - x[1];
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  out[0] = -3.0 * x[0] * c * c;
  out[1] = -3.0 * s * c;
}

double bianchi_q(std::span<const double> x, double t) {
  const double sigma = x[0], omega = x[1];
  const double c = std::cos(t - x[2]);
  return 2.0 * sigma * sigma + omega * (3.0 * c * c - 1.0);
}

void bianchi_f1(std::span<const double> x, double t, std::span<double> out) {
  const double sigma = x[0], omega = x[1];
  const double theta = t - x[2];
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double q = 2.0 * sigma * sigma + omega * (3.0 * c * c - 1.0);
  out[0] = -(2.0 - q) * sigma + 1.0 - sigma * sigma - omega;
  out[1] = 2.0 * omega * (1.0 + q - 3.0 * c * c);
  out[2] = -3.0 * s * c;
}

double bianchi_f2(std::span<const double> x, double t) { return -(1.0 + bianchi_q(x, t)); }

OscillatoryModel make_vdp_model(Damping damping, double r_max) {
  if (!(r_max > 0.0)) throw ConfigError("make_vdp_model: r_max must be positive");
  OscillatoryModel m;
  m.name = "vdp";
  m.dimension = 2;
  m.period = kTwoPi;
  m.f1 = [damping = std::move(damping)](std::span<const double> x, double t,
                                        std::span<double> out) {
    const double theta = t - x[1];
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double g = damping(x[0] * s, x[0] * c);
    out[0] = g * c;
    out[1] = x[0] != 0.0 ? g * s / x[0] : 0.0;
  };
  m.f2 = [](std::span<const double>, double) { return 0.0; };
  m.admissible = [r_max](std::span<const double> x) {
    if (!(x[0] > 0.0)) {
      throw AdmissibilityError("vdp: amplitude r = " + std::to_string(x[0]) +
                               " is not positive (phase undefined)");
    }
    if (!(x[0] < r_max)) {
      throw AdmissibilityError("vdp: amplitude r = " + std::to_string(x[0]) +
                               " reached the cap r_max = " + std::to_string(r_max));
    }
  };
  m.component_names = {"r", "psi"};
  m.default_initial = {0.0, 0.1, {1.0, 0.0}};
  m.default_lipschitz_region = {{0.1, 0.0}, {0.95 * r_max, kTwoPi}};
  return m;
}

OscillatoryModel make_vdp_model() {
  const double r_max = 2.0;
  OscillatoryModel m = make_vdp_model([](double, double phi_dot) { return -3.0 * phi_dot; }, r_max);
  // Specializations valid for the linear damping only.
  m.f1 = vdp_f1;
  m.closed_form_average = [](std::span<const double> z, double, std::span<double> out) {
    out[0] = -1.5 * z[0];
    out[1] = 0.0;
  };
  m.sup_f1 = 3.0 * r_max + 1.5;  // |f1_r| <= 3 r_max, |f1_psi| <= 3/2
  m.sup_f2 = 0.0;                // the drive never decays
  return m;
}

OscillatoryModel make_bianchi3_model() {
  OscillatoryModel m;
  m.name = "bianchi3";
  m.dimension = 3;
  m.period = kTwoPi;
  m.f1 = bianchi_f1;
  m.f2 = bianchi_f2;
  m.closed_form_average = [](std::span<const double> z, double, std::span<double> out) {
    const double sigma = z[0], omega = z[1];
    const double qbar = 2.0 * sigma * sigma + 0.5 * omega;
    out[0] = -(2.0 - qbar) * sigma + 1.0 - sigma * sigma - omega;
    out[1] = 2.0 * omega * (qbar - 0.5);
    out[2] = 0.0;
  };
  // Over the admissible region q is confined to (-1, 2); per component
  // |f1_Sigma| < 4, |f1_Omega| < 6, |f1_psi| <= 3/2, and |f2| = |1 + q| < 3.
  m.sup_f1 = 11.5;
  m.sup_f2 = 3.0;
  m.admissible = [](std::span<const double> x) {
    const double sigma = x[0], omega = x[1];
    if (!(omega > 0.0 && omega < 1.0)) {
      throw AdmissibilityError("bianchi3: Omega = " + std::to_string(omega) +
                               " outside (0, 1)");
    }
    if (!(sigma > -1.0 && sigma < 1.0)) {
      throw AdmissibilityError("bianchi3: Sigma = " + std::to_string(sigma) +
                               " outside (-1, 1)");
    }
    const double c = 1.0 - sigma * sigma - omega;
    if (!(c > 0.0)) {
      throw AdmissibilityError("bianchi3: constraint 1 - Sigma^2 - Omega = " +
                               std::to_string(c) + " is not positive");
    }
  };
  m.component_names = {"Sigma_plus", "Omega", "psi"};
  m.default_initial = {0.0, 1.0, {0.2, 0.5, 0.0}};
  m.default_lipschitz_region = {{-0.6, 0.05, 0.0}, {0.6, 0.6, kTwoPi}};
  return m;
}

OscillatoryModel make_zero_model(std::size_t dimension) {
  if (dimension == 0) throw ConfigError("make_zero_model: dimension must be positive");
  OscillatoryModel m;
  m.name = "zero";
  m.dimension = dimension;
  m.period = kTwoPi;
  m.f1 = [](std::span<const double>, double, std::span<double> out) {
    for (double& v : out) v = 0.0;
  };
  m.f2 = [](std::span<const double>, double) { return 0.0; };
  m.closed_form_average = [](std::span<const double>, double, std::span<double> out) {
    for (double& v : out) v = 0.0;
  };
  for (std::size_t i = 0; i < dimension; ++i) m.component_names.push_back("x" + std::to_string(i));
  m.default_initial = {0.0, 1.0, std::vector<double>(dimension, 0.0)};
  m.default_lipschitz_region = {std::vector<double>(dimension, -1.0),
                                std::vector<double>(dimension, 1.0)};
  return m;
}

OscillatoryModel model_by_name(const std::string& name) {
  if (name == "vdp") return make_vdp_model();
  if (name == "bianchi3") return make_bianchi3_model();
  if (name == "zero") return make_zero_model(2);
  throw ConfigError("unknown model '" + name + "' (expected vdp, bianchi3 or zero)");
}

}  // namespace oscavg
