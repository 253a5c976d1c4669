#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "bmv/protocol.hpp"
#include "bmv/qstate.hpp"
#include "bmv/rng.hpp"

// Shared generators and independent oracles for the test suites. Oracles here
// deliberately avoid the library's own evaluation paths.

namespace bmv::testing {

inline PureState random_pure(SplitMix64& rng, const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = cxd(rng.normal(), rng.normal());
  v /= v.norm();
  return PureState(std::move(v), dims);
}

inline PureState random_product_pure(SplitMix64& rng) {
  return tensor(random_pure(rng, {2}), random_pure(rng, {2}));
}

inline DensityMatrix random_density(SplitMix64& rng, const std::vector<int>& dims, int rank) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(rank));
  for (double& x : w) {
    x = rng.uniform() + 1e-3;
    total += x;
  }
  for (int k = 0; k < rank; ++k) {
    const PureState psi = random_pure(rng, dims);
    m += (w[static_cast<std::size_t>(k)] / total) * (psi.amps * psi.amps.adjoint());
  }
  m = (m + m.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(m), dims);
}

// convex mixture of product states: separable by construction
inline DensityMatrix random_separable(SplitMix64& rng, int terms) {
  Matrix m = Matrix::Zero(4, 4);
  double total = 0.0;
  std::vector<double> w(static_cast<std::size_t>(terms));
  for (double& x : w) {
    x = rng.uniform() + 1e-3;
    total += x;
  }
  for (int k = 0; k < terms; ++k) {
    const PureState p = random_product_pure(rng);
    m += (w[static_cast<std::size_t>(k)] / total) * (p.amps * p.amps.adjoint());
  }
  m = (m + m.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(m), {2, 2});
}

inline Matrix random_unitary(SplitMix64& rng, int n) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cxd(rng.normal(), rng.normal());
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const cxd d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

// plain-loop expectation, independent of the Eigen product path
inline cxd expectation_bruteforce(const Vector& psi, const Matrix& op) {
  cxd acc = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    for (Eigen::Index j = 0; j < psi.size(); ++j)
      acc += std::conj(psi(i)) * op(i, j) * psi(j);
  return acc;
}

// Maximally entangled split state, written with the spin-up/path-0 pairing:
// (1/2)[ |u 0>_A (|u 0> + |d 1>)_B + |d 1>_A (|u 0> - |d 1>)_B ]
inline PureState phi_state() {
  const std::vector<int> dims{2, 2, 2, 2};
  Vector v = Vector::Zero(16);
  v(static_cast<Eigen::Index>(compose_index(dims, {0, 0, 0, 0}))) = 0.5;
  v(static_cast<Eigen::Index>(compose_index(dims, {0, 0, 1, 1}))) = 0.5;
  v(static_cast<Eigen::Index>(compose_index(dims, {1, 1, 0, 0}))) = 0.5;
  v(static_cast<Eigen::Index>(compose_index(dims, {1, 1, 1, 1}))) = -0.5;
  return PureState(std::move(v), dims);
}

// Its recombined form: spins entangled, both paths back in |0>
inline PureState phi_prime_state() {
  const std::vector<int> dims{2, 2, 2, 2};
  Vector v = Vector::Zero(16);
  v(static_cast<Eigen::Index>(compose_index(dims, {0, 0, 0, 0}))) = 0.5;
  v(static_cast<Eigen::Index>(compose_index(dims, {0, 0, 1, 0}))) = 0.5;
  v(static_cast<Eigen::Index>(compose_index(dims, {1, 0, 0, 0}))) = 0.5;
  v(static_cast<Eigen::Index>(compose_index(dims, {1, 0, 1, 0}))) = -0.5;
  return PureState(std::move(v), dims);
}

// path pair of Eq-1 form: (1/2)(|00> + e^{i a}|01> + e^{i b}|10> + |11>)
inline PureState eq1_path_state(double a, double b) {
  const cxd i(0.0, 1.0);
  Vector v(4);
  v << 0.5, 0.5 * std::exp(i * a), 0.5 * std::exp(i * b), 0.5;
  return PureState(std::move(v), {2, 2});
}

inline ProtocolConfig default_config(double t_grav = 0.0,
                                     PhaseConvention convention = PhaseConvention::eq1) {
  ProtocolConfig cfg{1e-14,
                     BranchGeometry(300e-6, 100e-6),
                     TrapParams(10.0, 0.0, 2.2e-5, 3500.0),
                     t_grav,
                     0,
                     std::numeric_limits<double>::infinity(),
                     10000,
                     42,
                     convention};
  return cfg;
}

}  // namespace bmv::testing
