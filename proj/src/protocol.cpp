#include "bmv/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bmv {

TrapParams::TrapParams(double b_prime_, double b0_, double chi_, double rho_nd_)
    : b_prime(b_prime_), b0(b0_), chi(chi_), rho_nd(rho_nd_) {
  if (!(b_prime > 0.0)) throw std::invalid_argument("TrapParams: b_prime must be > 0");
  if (!(rho_nd > 0.0)) throw std::invalid_argument("TrapParams: rho_nd must be > 0");
  if (chi == 0.0) throw std::invalid_argument("TrapParams: chi must be nonzero");
}

TrapFrequency trap_frequency(const TrapParams& trap) {
  const bool flipped = trap.chi < 0.0;
  const double omega =
      trap.b_prime * std::sqrt(std::abs(trap.chi) / (constants::mu0 * trap.rho_nd));
  return {omega, flipped};
}

double split_time(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("split_time: omega must be > 0");
  return std::numbers::pi / omega;
}

std::vector<DDPulse> dd_schedule(int n, double omega, double duration) {
  if (n < 1) throw std::invalid_argument("dd_schedule: need n >= 1");
  if (!(omega > 0.0)) throw std::invalid_argument("dd_schedule: omega must be > 0");
  if (!(duration > 0.0)) throw std::invalid_argument("dd_schedule: duration must be > 0");
  const double spacing = 2.0 * std::numbers::pi / (static_cast<double>(n) * omega);
  std::vector<DDPulse> pulses;
  for (long k = 0;; ++k) {
    if ((static_cast<double>(k) + 1.0) * spacing > duration) break;
    pulses.push_back({(static_cast<double>(k) + 0.5) * spacing, true});
  }
  if (pulses.empty()) throw std::invalid_argument("dd_schedule: zero pulses fit in duration");
  return pulses;
}

void ProtocolConfig::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("ProtocolConfig: mass must be > 0");
  if (!(t_grav >= 0.0)) throw std::invalid_argument("ProtocolConfig: t_grav must be >= 0");
  if (!(t2_path >= 0.0)) throw std::invalid_argument("ProtocolConfig: t2_path must be >= 0");
  if (n_dd < 0) throw std::invalid_argument("ProtocolConfig: n_dd must be >= 0");
  if (shots < 1) throw std::invalid_argument("ProtocolConfig: shots must be >= 1");
}

Matrix split_unitary(int control_spin) {
  if (control_spin != 0 && control_spin != 1)
    throw std::invalid_argument("split_unitary: control_spin must be 0 or 1");
  Matrix u = Matrix::Zero(4, 4);
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < 2; ++p) {
      const int p_out = (s == control_spin) ? 1 - p : p;
      u(2 * s + p_out, 2 * s + p) = 1.0;
    }
  return u;
}

Matrix phase_unitary(double dphi1, double dphi2, bool pi_on_both_inner) {
  const cxd i(0.0, 1.0);
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(i * dphi1);
  u(2, 2) = std::exp(i * dphi2);
  u(3, 3) = pi_on_both_inner ? cxd(-1.0, 0.0) : cxd(1.0, 0.0);
  return u;
}

DensityMatrix dephase_paths(const DensityMatrix& rho, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("dephase_paths: gamma in [0,1]");
  Matrix out = rho.mat;
  const std::size_t n = static_cast<std::size_t>(rho.dim());
  for (std::size_t r = 0; r < n; ++r) {
    const std::vector<int> dr = decompose_index(rho.dims, r);
    for (std::size_t c = 0; c < n; ++c) {
      const std::vector<int> dc = decompose_index(rho.dims, c);
      double f = 1.0;
      if (dr[kPathA] != dc[kPathA]) f *= gamma;
      if (dr[kPathB] != dc[kPathB]) f *= gamma;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *= f;
    }
  }
  return DensityMatrix(std::move(out), rho.dims);
}

PureState prepared_state() {
  PureState psi = basis_state({2, 2, 2, 2}, {0, 0, 0, 0});
  psi = apply_unitary(psi, hadamard(), {kSpinA});
  psi = apply_unitary(psi, hadamard(), {kSpinB});
  return psi;
}

namespace {

ProtocolRun run_pipeline(const ProtocolConfig& config, const PhaseSet& phases) {
  config.validate();

  StageLog log;
  const CasimirVerdict gate = casimir_gate(config.geometry.d1());
  if (!gate.pass)
    log.warnings.push_back("casimir gate failed: d1 below the minimum branch distance");
  const TrapFrequency trap = trap_frequency(config.trap);
  if (trap.used_abs_chi) log.warnings.push_back("chi < 0: trap frequency uses |chi|");
  const double t_split = split_time(trap.omega);

  double clock = 0.0;
  auto record = [&](const std::string& name, double duration, const DensityMatrix& rho) {
    log.records.push_back({name, clock, duration, rho.mat.trace().real()});
    clock += duration;
  };

  // (1) spin preparation
  DensityMatrix rho = to_density(prepared_state());
  record("prepare", 0.0, rho);

  // (2) spin-conditioned splitting on each probe
  const Matrix splitter = split_unitary(0);
  rho = apply_unitary(rho, splitter, {kSpinA, kPathA});
  rho = apply_unitary(rho, splitter, {kSpinB, kPathB});
  record("split", t_split, rho);

  // (3) gravitational stage: relative phases on the path pair, DD pulse train
  // as paired spin flips (they commute with the path-diagonal phase)
  rho = apply_unitary(rho,
                      phase_unitary(phases.dphi1, phases.dphi2,
                                    config.convention == PhaseConvention::eq5),
                      {kPathA, kPathB});
  if (config.n_dd > 0) {
    const auto pulses = dd_schedule(config.n_dd, trap.omega, config.t_grav);
    const Matrix flip = pauli_x();
    for (std::size_t i = 0; i < pulses.size(); ++i) {
      rho = apply_unitary(rho, flip, {kSpinA});
      rho = apply_unitary(rho, flip, {kSpinB});
    }
    log.dd_pulse_count = static_cast<int>(pulses.size());
    log.residual_spin_flip = (pulses.size() % 2) != 0;
  }
  record("gravity", config.t_grav, rho);

  // (4) phenomenological dephasing of the path coherences
  double gamma = 1.0;
  if (config.t_grav > 0.0)
    gamma = std::isinf(config.t2_path)
                ? 1.0
                : (config.t2_path == 0.0 ? 0.0 : std::exp(-config.t_grav / config.t2_path));
  rho = dephase_paths(rho, gamma);
  record("dephase", 0.0, rho);

  const DensityMatrix pre_recombination = rho;

  // (5) recombination inverts the splitting; an odd number of gradient flips
  // leaves B' inverted, so the closing splitter is conditioned on the other spin
  const Matrix recombiner = split_unitary(log.residual_spin_flip ? 1 : 0);
  rho = apply_unitary(rho, recombiner, {kSpinA, kPathA});
  rho = apply_unitary(rho, recombiner, {kSpinB, kPathB});
  record("recombine", t_split, rho);

  return ProtocolRun{config, phases, pre_recombination, rho, log};
}

}  // namespace

ProtocolRun run_protocol(const ProtocolConfig& config) {
  return run_pipeline(config, phase_set(config.geometry, config.mass, config.t_grav));
}

ProtocolRun run_with_phases(const ProtocolConfig& config, double dphi1, double dphi2) {
  PhaseSet phases{dphi1, dphi2, 0.0, dphi1, dphi2};
  return run_pipeline(config, phases);
}

}  // namespace bmv
