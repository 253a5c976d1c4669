#pragma once

#include <cstdint>
#include <optional>

#include "bmv/qstate.hpp"

// Numerical check of the general witness theorem at the level of the
// classical-mediator state family on two probe qubits A, B and a binary
// mediator M carrying a single variable (sigma_z):
//
//   rho = (1/8) (I + r_A.q^A + r_B.q^B + s_z q_z^M + t_A.q^A q_z^M + t_B.q^B q_z^M)
//
// with q^A = sigma on A, q^B = sigma on B, q_z^M = sigma_z on M. Every
// positive member of this family reduces to a separable probe pair; adding a
// direct q^A q^B coupling term breaks that.

namespace bmv {

struct MediatorParams {
  Eigen::Vector3d r_a;
  Eigen::Vector3d r_b;
  Eigen::Vector3d t_a;
  Eigen::Vector3d t_b;
  double s_z;
};

struct MediatorBuild {
  std::optional<DensityMatrix> state;  // empty on positivity violation
  double min_eigenvalue;
};

MediatorBuild build_mediator_state(const MediatorParams& params);

// Exact minimum eigenvalue from the sigma_z^M block structure:
// min over e = +-1 of (1/8)(1 + e s_z - |r_A + e t_A| - |r_B + e t_B|).
double mediator_min_eigenvalue(const MediatorParams& params);

// Partial trace over M.
DensityMatrix probe_reduction(const DensityMatrix& rho8);

struct GwtScanReport {
  long long n;          // requested accepted-sample count
  long long samples;    // candidates drawn (including rejected)
  long long accepted;
  double max_negativity;
  std::uint64_t seed;
};

// Rejection-samples `n_accepted` positive states with all parameters uniform
// in [-1, 1], reduces each over M and records the largest probe negativity
// seen. Work is spread over a fixed shard count so the report only depends on
// the seed.
GwtScanReport gwt_scan(long long n_accepted, std::uint64_t seed, int threads = 0);

struct DirectCouplingCounterexample {
  DensityMatrix state;
  double negativity;
};

// (1/8)(I + sum_k c_k sigma_k sigma_k I) with c = (1, -1, 1): a valid state
// outside the mediated family whose probe reduction is a Bell state.
DirectCouplingCounterexample direct_coupling_counterexample();

}  // namespace bmv
