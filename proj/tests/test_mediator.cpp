#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bmv/mediator.hpp"
#include "bmv/rng.hpp"

using namespace bmv;

namespace {

MediatorParams zero_params() {
  return {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
          Eigen::Vector3d::Zero(), 0.0};
}

MediatorParams random_params(SplitMix64& rng) {
  MediatorParams p = zero_params();
  for (int k = 0; k < 3; ++k) {
    p.r_a(k) = rng.uniform(-1.0, 1.0);
    p.r_b(k) = rng.uniform(-1.0, 1.0);
    p.t_a(k) = rng.uniform(-1.0, 1.0);
    p.t_b(k) = rng.uniform(-1.0, 1.0);
  }
  p.s_z = rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace

TEST_CASE("all parameters zero gives the maximally mixed state") {
  const MediatorBuild built = build_mediator_state(zero_params());
  REQUIRE(built.state.has_value());
  CHECK((built.state->mat - Matrix::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(negativity(probe_reduction(*built.state)) == 0.0);
}

TEST_CASE("a pure z polarization on A is a product state") {
  MediatorParams p = zero_params();
  p.r_a = Eigen::Vector3d(0.0, 0.0, 1.0);
  const MediatorBuild built = build_mediator_state(p);
  REQUIRE(built.state.has_value());

  Matrix zero_proj = Matrix::Zero(2, 2);
  zero_proj(0, 0) = 1.0;
  const Matrix expected = kron(kron(zero_proj, identity(2) / 2.0), identity(2) / 2.0);
  CHECK((built.state->mat - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(negativity(probe_reduction(*built.state)) == 0.0);
}

TEST_CASE("overlong polarization vectors violate positivity") {
  MediatorParams p = zero_params();
  p.r_a = Eigen::Vector3d(0.0, 0.0, 2.0);
  const MediatorBuild built = build_mediator_state(p);
  CHECK_FALSE(built.state.has_value());
  CHECK(built.min_eigenvalue == doctest::Approx(-1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("closed-form minimum eigenvalue matches the dense solver") {
  SplitMix64 rng(401);
  for (int trial = 0; trial < 300; ++trial) {
    const MediatorParams p = random_params(rng);
    const double closed = mediator_min_eigenvalue(p);
    const MediatorBuild built = build_mediator_state(p);
    CHECK(closed == doctest::Approx(built.min_eigenvalue).epsilon(1e-10));
    CHECK(built.state.has_value() == (closed >= kPositivityFloor));
  }
}

TEST_CASE("probe reduction kills every mediator-correlated term") {
  SplitMix64 rng(409);
  const Matrix sig[3] = {pauli_x(), pauli_y(), pauli_z()};
  int accepted = 0;
  for (int trial = 0; trial < 2000 && accepted < 50; ++trial) {
    MediatorParams p = random_params(rng);
    // shrink toward positivity so the family is sampled with t-terms present
    p.r_a *= 0.3;
    p.r_b *= 0.3;
    p.t_a *= 0.3;
    p.t_b *= 0.3;
    p.s_z *= 0.3;
    const MediatorBuild built = build_mediator_state(p);
    if (!built.state) continue;
    ++accepted;
    const DensityMatrix red = probe_reduction(*built.state);
    Matrix expected = Matrix::Identity(4, 4);
    for (int k = 0; k < 3; ++k) {
      expected += p.r_a(k) * kron(sig[k], identity(2));
      expected += p.r_b(k) * kron(identity(2), sig[k]);
    }
    expected /= 4.0;
    CHECK((red.mat - expected).cwiseAbs().maxCoeff() < 1e-12);

    // rebuilding from the extracted polarizations round-trips exactly
    Eigen::Vector3d ra, rb;
    for (int k = 0; k < 3; ++k) {
      ra(k) = (red.mat * kron(sig[k], identity(2))).trace().real();
      rb(k) = (red.mat * kron(identity(2), sig[k])).trace().real();
    }
    Matrix rebuilt = Matrix::Identity(4, 4);
    for (int k = 0; k < 3; ++k) {
      rebuilt += ra(k) * kron(sig[k], identity(2));
      rebuilt += rb(k) * kron(identity(2), sig[k]);
    }
    rebuilt /= 4.0;
    CHECK((red.mat - rebuilt).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(accepted == 50);
}

TEST_CASE("probe reduction of the maximally mixed state") {
  const DensityMatrix mixed(Matrix::Identity(8, 8) / 8.0, {2, 2, 2});
  CHECK((probe_reduction(mixed).mat - Matrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() <
        1e-15);
  CHECK_THROWS_AS(probe_reduction(DensityMatrix(identity(4) / 4.0, {2, 2})),
                  std::invalid_argument);
}

TEST_CASE("scan finds no entanglement in the mediated family") {
  const GwtScanReport report = gwt_scan(2000, 99);
  CHECK(report.accepted == 2000);
  CHECK(report.n == 2000);
  CHECK(report.samples > report.accepted);  // rejection rate strictly positive
  CHECK(report.max_negativity <= 1e-9);
  CHECK(report.seed == 99);
}

TEST_CASE("scan reports are reproducible and thread-count independent") {
  const GwtScanReport a = gwt_scan(500, 7, 1);
  const GwtScanReport b = gwt_scan(500, 7, 2);
  CHECK(a.samples == b.samples);
  CHECK(a.max_negativity == b.max_negativity);
  const GwtScanReport c = gwt_scan(500, 8, 2);
  CHECK(c.samples != a.samples);  // different seed walks a different stream
}

TEST_CASE("direct coupling breaks separability") {
  const DirectCouplingCounterexample cx = direct_coupling_counterexample();
  CHECK(cx.negativity == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(min_eigenvalue(cx.state.mat) >= -1e-12);

  // dropping the cross-term falls back to the mediated family: separable
  const DensityMatrix mixed(Matrix::Identity(8, 8) / 8.0, {2, 2, 2});
  CHECK(negativity(probe_reduction(mixed)) == 0.0);
}
