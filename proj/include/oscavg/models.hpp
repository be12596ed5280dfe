#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "oscavg/core.hpp"

namespace oscavg {

/// Result of the amplitude-phase change of variables.
struct AmplitudePhase {
  double r = 0.0;
  double psi = 0.0;
  bool degenerate = false;  ///< r == 0, phase undefined (psi reported as 0)
};

struct PhasePlanePoint {
  double phi = 0.0;
  double phi_dot = 0.0;
};

/// (phi, phi_dot) at time t -> (r, psi) with
///   phi = r sin(t - psi),   phi_dot = r cos(t - psi).
/// psi is reduced to (-pi, pi].  At the origin the phase is undefined;
/// the degenerate flag is set and psi = 0.
[[nodiscard]] AmplitudePhase amplitude_phase_forward(double phi, double phi_dot, double t);

/// Inverse of the forward map.  Exact round trip for r > 0.
[[nodiscard]] PhasePlanePoint amplitude_phase_inverse(double r, double psi, double t);

/// Oscillator damping term g(phi, phi_dot) for phi'' + phi = eps * g.
using Damping = std::function<double(double phi, double phi_dot)>;

/// Weak-damping oscillator f1 in (r, psi) coordinates for the default
/// linear damping g = -3 phi_dot:
///   dr   = -3 r cos^2(t - psi),
///   dpsi = -3 sin(t - psi) cos(t - psi).
void vdp_f1(std::span<const double> x, double t, std::span<double> out);

/// Deceleration-like scalar q = 2 Sigma^2 + Omega (3 cos^2(t - psi) - 1)
/// for x = (Sigma, Omega, psi).
[[nodiscard]] double bianchi_q(std::span<const double> x, double t);

/// Anisotropic-cosmology f1 for x = (Sigma, Omega, psi):
///   dSigma = -(2 - q) Sigma + 1 - Sigma^2 - Omega,
///   dOmega = 2 Omega (1 + q - 3 cos^2(t - psi)),
///   dpsi   = -3 sin(t - psi) cos(t - psi).
void bianchi_f1(std::span<const double> x, double t, std::span<double> out);

/// Drive decay coefficient for the same system, f2 = -(1 + q).
[[nodiscard]] double bianchi_f2(std::span<const double> x, double t);

/// Oscillator model with the default damping -3 phi_dot.  f2 == 0: the
/// drive stays constant.  Amplitudes are admissible for r < r_max = 2.
[[nodiscard]] OscillatoryModel make_vdp_model();

/// Same structure with a caller-supplied damping term and amplitude cap.
/// No closed-form average or analytic bounds are attached; averaging then
/// goes through quadrature.
[[nodiscard]] OscillatoryModel make_vdp_model(Damping damping, double r_max);

/// Anisotropic cosmology model, x = (Sigma, Omega, psi), admissible when
/// Omega in (0, 1), |Sigma| < 1 and 1 - Sigma^2 - Omega > 0.
[[nodiscard]] OscillatoryModel make_bianchi3_model();

/// f1 == 0, f2 == 0 in the given dimension.  Every trajectory is constant;
/// useful for exercising plumbing end to end.
[[nodiscard]] OscillatoryModel make_zero_model(std::size_t dimension);

/// Resolves "vdp", "bianchi3" or "zero".  Throws ConfigError otherwise.
[[nodiscard]] OscillatoryModel model_by_name(const std::string& name);

}  // namespace oscavg
