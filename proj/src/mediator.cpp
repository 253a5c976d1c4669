#include "bmv/mediator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bmv {

namespace {

const std::vector<int> kDims{2, 2, 2};

Matrix mediator_matrix(const MediatorParams& p) {
  const Matrix sig[3] = {pauli_x(), pauli_y(), pauli_z()};
  const Matrix i2 = identity(2);
  Matrix m = Matrix::Identity(8, 8);
  for (int k = 0; k < 3; ++k) {
    m += p.r_a(k) * kron(kron(sig[k], i2), i2);
    m += p.r_b(k) * kron(kron(i2, sig[k]), i2);
    m += p.t_a(k) * kron(kron(sig[k], i2), pauli_z());
    m += p.t_b(k) * kron(kron(i2, sig[k]), pauli_z());
  }
  m += p.s_z * kron(kron(i2, i2), pauli_z());
  return m / 8.0;
}

}  // namespace

double mediator_min_eigenvalue(const MediatorParams& p) {
  double lowest = 1.0;
  for (int e : {+1, -1}) {
    const double ed = static_cast<double>(e);
    const double v = 1.0 + ed * p.s_z - (p.r_a + ed * p.t_a).norm() - (p.r_b + ed * p.t_b).norm();
    lowest = std::min(lowest, v);
  }
  return lowest / 8.0;
}

MediatorBuild build_mediator_state(const MediatorParams& params) {
  Matrix m = mediator_matrix(params);
  const double lambda_min = min_eigenvalue(m);
  if (lambda_min < kPositivityFloor) return {std::nullopt, lambda_min};
  return {DensityMatrix(std::move(m), kDims), lambda_min};
}

DensityMatrix probe_reduction(const DensityMatrix& rho8) {
  if (rho8.dims != kDims) throw std::invalid_argument("probe_reduction expects a 2x2x2 state");
  return partial_trace(rho8, {0, 1});
}

namespace {

// Scan family: the seven parameters (r_A, r_B, s_z) uniform in [-1, 1]^7.
// The t vectors never survive the reduction over M (sigma_z is traceless), so
// scanning them would only thin the acceptance rate; their contribution is
// covered exactly by the reduction-identity tests.
MediatorParams sample_params(SplitMix64& rng) {
  MediatorParams p;
  p.t_a.setZero();
  p.t_b.setZero();
  for (int k = 0; k < 3; ++k) {
    p.r_a(k) = rng.uniform(-1.0, 1.0);
    p.r_b(k) = rng.uniform(-1.0, 1.0);
  }
  p.s_z = rng.uniform(-1.0, 1.0);
  return p;
}

struct ShardResult {
  long long samples = 0;
  double max_negativity = 0.0;
};

ShardResult scan_shard(long long quota, std::uint64_t shard_seed) {
  SplitMix64 rng(shard_seed);
  ShardResult res;
  long long accepted = 0;
  while (accepted < quota) {
    ++res.samples;
    const MediatorParams p = sample_params(rng);
    // exact block minimum prefilters; the dense build below re-verifies
    if (mediator_min_eigenvalue(p) < kPositivityFloor) continue;
    const MediatorBuild built = build_mediator_state(p);
    if (!built.state) continue;
    ++accepted;
    res.max_negativity = std::max(res.max_negativity, negativity(probe_reduction(*built.state)));
  }
  return res;
}

}  // namespace

GwtScanReport gwt_scan(long long n_accepted, std::uint64_t seed, int threads) {
  if (n_accepted < 1) throw std::invalid_argument("gwt_scan: need n >= 1");
  constexpr int kShards = 8;  // fixed so the report depends only on the seed
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, kShards);

  long long quota[kShards];
  for (int i = 0; i < kShards; ++i)
    quota[i] = n_accepted / kShards + (i < n_accepted % kShards ? 1 : 0);

  ShardResult results[kShards];
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < kShards; i += threads) {
        if (quota[i] > 0) results[i] = scan_shard(quota[i], seed ^ static_cast<std::uint64_t>(i));
      }
    });
  for (auto& th : pool) th.join();

  GwtScanReport report{n_accepted, 0, n_accepted, 0.0, seed};
  for (const ShardResult& r : results) {
    report.samples += r.samples;
    report.max_negativity = std::max(report.max_negativity, r.max_negativity);
  }
  return report;
}

DirectCouplingCounterexample direct_coupling_counterexample() {
  const Matrix sig[3] = {pauli_x(), pauli_y(), pauli_z()};
  const double c[3] = {1.0, -1.0, 1.0};
  Matrix m = Matrix::Identity(8, 8);
  for (int k = 0; k < 3; ++k) m += c[k] * kron(kron(sig[k], sig[k]), identity(2));
  m /= 8.0;
  DensityMatrix state(std::move(m), kDims);
  const double neg = negativity(probe_reduction(state));
  return {std::move(state), neg};
}

}  // namespace bmv
