#include "bmv/gravity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bmv {

BranchGeometry::BranchGeometry(double d_, double s_) : d(d_), s(s_) {
  if (!(d > 0.0)) throw std::invalid_argument("BranchGeometry: d must be > 0");
  if (!(s > 0.0 && s < d)) throw std::invalid_argument("BranchGeometry: requires 0 < s < d");
}

ModeCoupling ModeCoupling::from_wavenumber(double k, double volume, double mass) {
  if (!(k > 0.0)) throw std::invalid_argument("ModeCoupling: k must be > 0");
  if (!(volume > 0.0)) throw std::invalid_argument("ModeCoupling: volume must be > 0");
  if (!(mass > 0.0)) throw std::invalid_argument("ModeCoupling: mass must be > 0");
  const double omega = constants::c * k;
  const double g = mass * constants::c *
                   std::sqrt(2.0 * std::numbers::pi * constants::G /
                             (constants::hbar * omega * volume));
  return {k, omega, g, volume, mass};
}

double pairwise_phase(double mass, double distance, double time) {
  if (!(mass > 0.0)) throw std::invalid_argument("pairwise_phase: mass must be > 0");
  if (!(distance > 0.0)) throw std::invalid_argument("pairwise_phase: distance must be > 0");
  if (!(time >= 0.0)) throw std::invalid_argument("pairwise_phase: time must be >= 0");
  return constants::G * mass * mass * time / (constants::hbar * distance);
}

PhaseSet phase_set(const BranchGeometry& geom, double mass, double time) {
  PhaseSet p{};
  p.phi1 = pairwise_phase(mass, geom.d1(), time);
  p.phi2 = pairwise_phase(mass, geom.d2(), time);
  p.phi3 = pairwise_phase(mass, geom.d3(), time);
  p.dphi1 = p.phi1 - p.phi3;
  p.dphi2 = p.phi2 - p.phi3;
  return p;
}

std::complex<double> field_displacement(const ModeCoupling& mode, double x_a, double x_b) {
  if (mode.omega_k == 0.0) throw std::invalid_argument("field_displacement: omega_k is zero");
  const std::complex<double> i(0.0, 1.0);
  return (mode.g_k / mode.omega_k) *
         (std::exp(-i * mode.k * x_a) + std::exp(i * mode.k * x_b));
}

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

double newtonian_from_modes(double mass, double dx, double lambda_max, long n_points,
                            double rel_tol) {
  if (!(mass > 0.0)) throw std::invalid_argument("newtonian_from_modes: mass must be > 0");
  if (!(dx > 0.0)) throw std::invalid_argument("newtonian_from_modes: dx must be > 0");
  if (!(lambda_max * dx >= 50.0))
    throw std::invalid_argument("newtonian_from_modes: cutoff too small (need lambda*dx >= 50)");
  if (n_points < 10000)
    throw std::invalid_argument("newtonian_from_modes: need n_points >= 10000");
  if (rel_tol > 0.0 && 1.0 / (lambda_max * dx) > rel_tol)
    throw std::invalid_argument(
        "newtonian_from_modes: cutoff too small for requested tolerance");

  const double h = lambda_max / static_cast<double>(n_points);
  const double tail_start = lambda_max - 2.0 * std::numbers::pi / dx;

  double running = 0.0;      // midpoint prefix integral of sinc(k dx)
  double tail_sum = 0.0;     // Cesaro accumulator over the last oscillation period
  long tail_count = 0;
  for (long i = 0; i < n_points; ++i) {
    const double k = (static_cast<double>(i) + 0.5) * h;
    running += h * sinc(k * dx);
    if ((static_cast<double>(i) + 1.0) * h >= tail_start) {
      tail_sum += running;
      ++tail_count;
    }
  }
  const double averaged = tail_sum / static_cast<double>(tail_count);
  return (constants::G * mass * mass / constants::hbar) * (2.0 / std::numbers::pi) * averaged;
}

CasimirVerdict casimir_gate(double d1) {
  if (!(d1 > 0.0)) throw std::invalid_argument("casimir_gate: d1 must be > 0");
  // one-ulp slack so geometries that land exactly on the threshold pass
  const bool pass = d1 >= kCasimirMinDistance * (1.0 - 1e-12);
  return {pass, d1 - kCasimirMinDistance};
}

}  // namespace bmv
