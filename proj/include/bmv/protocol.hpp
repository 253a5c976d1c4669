#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmv/gravity.hpp"
#include "bmv/qstate.hpp"

// Stage machine for the full interferometric protocol on two spin-carrying
// probes: spin preparation, spin-conditioned path splitting, gravitational
// phase accumulation with dynamical-decoupling pulses, phenomenological path
// dephasing, and recombination.
//
// The joint state lives on four qubits in the fixed order
//   index 0: spin_A    index 1: path_A    index 2: spin_B    index 3: path_B
// (see qstate.hpp). The splitter sends spin-up down path 1.

namespace bmv {

inline constexpr int kSpinA = 0;
inline constexpr int kPathA = 1;
inline constexpr int kSpinB = 2;
inline constexpr int kPathB = 3;

struct TrapParams {
  double b_prime;  // magnetic field gradient (T/m)
  double b0;       // bias field (T)
  double chi;      // volume magnetic susceptibility (dimensionless)
  double rho_nd;   // nanodiamond density (kg/m^3)

  TrapParams(double b_prime_, double b0_, double chi_, double rho_nd_);
};

struct TrapFrequency {
  double omega;       // rad/s
  bool used_abs_chi;  // set when chi < 0 was folded to |chi|
};

// omega = B' sqrt(chi / (mu0 rho))
TrapFrequency trap_frequency(const TrapParams& trap);

// Half oscillation period: arms launched from rest reach maximal separation
// with zero velocity at pi/omega, the moment to switch the gradient off.
double split_time(double omega);

struct DDPulse {
  double time;         // seconds from the start of the decoupled stage
  bool gradient_flip;  // simultaneous B' sign flip scheduled with the pulse
};

// Train of pi pulses at omega_dd = n * omega: spacing 2*pi/(n*omega), first
// pulse half a spacing in, and a pulse is scheduled only when its full
// spacing window fits inside the duration (count = floor(duration n omega / 2 pi)).
std::vector<DDPulse> dd_schedule(int n, double omega, double duration);

enum class PhaseConvention { eq1, eq5 };

struct ProtocolConfig {
  double mass;              // kg
  BranchGeometry geometry;
  TrapParams trap;
  double t_grav;            // gravitational stage duration (s)
  int n_dd;                 // DD pulse train parameter (0 disables DD)
  double t2_path;           // path coherence time (s); +inf = no dephasing
  long long shots;          // measurement budget carried to the witness stage
  std::uint64_t seed;
  PhaseConvention convention = PhaseConvention::eq1;

  void validate() const;
};

struct StageRecord {
  std::string name;
  double start;     // s
  double duration;  // s
  double trace;     // state trace after the stage
};

struct StageLog {
  std::vector<StageRecord> records;
  std::vector<std::string> warnings;
  int dd_pulse_count = 0;
  bool residual_spin_flip = false;  // odd pulse count leaves both spins flipped
};

struct ProtocolRun {
  ProtocolConfig config;
  PhaseSet phases;
  DensityMatrix pre_recombination;  // snapshot with the paths still split
  DensityMatrix final_state;
  StageLog log;
};

ProtocolRun run_protocol(const ProtocolConfig& config);

// Same pipeline with the two relative phases injected directly instead of
// derived from geometry and t_grav. Used for phase-space scans that geometry
// alone cannot reach.
ProtocolRun run_with_phases(const ProtocolConfig& config, double dphi1, double dphi2);

// --- stage building blocks (exposed for tests and the witness module) ------

// conditional path flip on one probe's (spin, path) pair: flips the path arm
// when the spin equals control_spin; self-inverse
Matrix split_unitary(int control_spin = 0);

// diagonal phase on (path_A, path_B): diag(1, e^{i dphi1}, e^{i dphi2}, e^{i pi flag})
Matrix phase_unitary(double dphi1, double dphi2, bool pi_on_both_inner);

// both probes' path coherences damped by gamma (independent local channels)
DensityMatrix dephase_paths(const DensityMatrix& rho, double gamma);

// |up,0,up,0> prepared into (|up>+|down>)/sqrt(2) on each spin
PureState prepared_state();

}  // namespace bmv
