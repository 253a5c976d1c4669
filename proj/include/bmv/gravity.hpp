#pragma once

#include <complex>

#include "bmv/constants.hpp"

// Gravitational phase accumulation between two probes in spatial superposition,
// the mode-sum recovery of the Newtonian interaction rate, and the
// Casimir-Polder feasibility gate on the closest branch distance.

namespace bmv {

// Collinear splitting along the probe separation axis: each probe's arms sit
// s/2 either side of its center, so the three distinct pair distances are
// d1 = d - s (closest arms), d2 = d + s (farthest arms), d3 = d (same-side arms).
struct BranchGeometry {
  double d;  // center separation (m)
  double s;  // arm separation of each superposition (m)

  BranchGeometry(double d_, double s_);
  double d1() const { return d - s; }
  double d2() const { return d + s; }
  double d3() const { return d; }
};

// Per-branch phases after time t and the two relative phases that survive in
// the joint state. dphi1 > 0 > dphi2 for any valid geometry.
struct PhaseSet {
  double phi1;
  double phi2;
  double phi3;
  double dphi1;  // phi1 - phi3
  double dphi2;  // phi2 - phi3
};

// Single mode of the linearized field coupled to a probe of mass m.
struct ModeCoupling {
  double k;        // wavenumber (1/m)
  double omega_k;  // mode angular frequency (rad/s)
  double g_k;      // matter-field coupling (rad/s)
  double volume;   // quantization volume (m^3)
  double mass;     // probe mass (kg)

  // omega = c*k and the coupling g_k = m c sqrt(2 pi G / (hbar omega V))
  static ModeCoupling from_wavenumber(double k, double volume, double mass);
};

// G m^2 t / (hbar d). Accepts t = 0 (zero phase).
double pairwise_phase(double mass, double distance, double time);

PhaseSet phase_set(const BranchGeometry& geom, double mass, double time);

// Displaced-field amplitude of one mode for sources at xA and xB:
// (g_k/omega_k) (e^{-i k xA} + e^{i k xB}).
std::complex<double> field_displacement(const ModeCoupling& mode, double x_a, double x_b);

// Continuum mode integral for the interaction rate at separation dx:
// (G m^2/hbar) (2/pi) \int_0^Lambda sinc(k dx) dk, evaluated by composite
// midpoint quadrature with the running integral Cesaro-averaged over the last
// sinc oscillation period to suppress the ~1/(Lambda dx) truncation ripple.
// Approaches G m^2/(hbar dx) as Lambda grows. If rel_tol > 0, fails fast when
// the truncation bound 1/(Lambda dx) exceeds it.
double newtonian_from_modes(double mass, double dx, double lambda_max, long n_points,
                            double rel_tol = 0.0);

// Minimum closest-arm distance keeping the Casimir-Polder coupling an order of
// magnitude below gravity for nanodiamond densities.
inline constexpr double kCasimirMinDistance = 200e-6;  // m

struct CasimirVerdict {
  bool pass;
  double margin;  // d1 - threshold (m)
};

CasimirVerdict casimir_gate(double d1);

}  // namespace bmv
