#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bmv/witness.hpp"
#include "test_util.hpp"

using namespace bmv;
using namespace bmv::testing;

TEST_CASE("witness operator spectrum and square") {
  const ObservableMatrix w = witness_operator();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w.mat);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double ev = solver.eigenvalues()(i);
    const double dist =
        std::min({std::abs(ev + 2.0), std::abs(ev), std::abs(ev - 2.0)});
    CHECK(dist < 1e-10);
  }
  // W^2 = 2 I + 2 Y (x) Y
  const Matrix expected = 2.0 * identity(4) + 2.0 * kron(pauli_y(), pauli_y());
  CHECK((w.mat * w.mat - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("witness reaches 2 on the maximally entangled state") {
  CHECK(witness_exact(phi_state()).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(witness_exact(phi_prime_state()).value == doctest::Approx(2.0).epsilon(1e-12));
  const WitnessEstimate exact = witness_exact(phi_state());
  CHECK(exact.std_error == 0.0);
  CHECK(exact.strategy == Strategy::exact);
}

TEST_CASE("witness vanishes identically on the plain split-state family") {
  SplitMix64 rng(301);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double b = rng.uniform(0.0, 2.0 * std::numbers::pi);
    // (cos b - cos a)/2 + (cos a - cos b)/2 = 0 for every phase pair
    const WitnessTerms terms = witness_exact_terms(to_density(eq1_path_state(a, b)));
    CHECK(terms.xa_zb == doctest::Approx(0.5 * (std::cos(b) - std::cos(a))).epsilon(1e-10));
    CHECK(terms.za_xb == doctest::Approx(0.5 * (std::cos(a) - std::cos(b))).epsilon(1e-10));
    CHECK(std::abs(terms.sum()) < 1e-12);
  }
  CHECK(witness_exact(DensityMatrix(identity(4) / 4.0, {2, 2})).value ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("separable states never exceed 1") {
  SplitMix64 rng(303);
  double max_abs = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int terms = 1 + static_cast<int>(rng.next_u64() % 4);
    const double w = witness_exact(random_separable(rng, terms)).value;
    max_abs = std::max(max_abs, std::abs(w));
  }
  CHECK(max_abs <= 1.0 + 1e-9);
}

TEST_CASE("relative states after a spin readout") {
  const PureState phi = phi_state();
  const PureState phi_b_up =
      PureState((Vector(4) << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)).finished(), {2, 2});
  const PureState phi_b_down =
      PureState((Vector(4) << 1 / std::sqrt(2.0), 0, 0, -1 / std::sqrt(2.0)).finished(), {2, 2});

  // measured spin drops out; its partner path factor stays |0> or |1>
  const PureState up = relative_state(phi, kSpinA, 0);
  const PureState expected_up = tensor(basis_state({2}, {0}), phi_b_up);
  CHECK((up.amps - expected_up.amps).norm() < 1e-12);

  const PureState down = relative_state(phi, kSpinA, 1);
  const PureState expected_down = tensor(basis_state({2}, {1}), phi_b_down);
  CHECK((down.amps - expected_down.amps).norm() < 1e-12);

  // conditioning a product state leaves the partner untouched
  SplitMix64 rng(307);
  const PureState a = random_pure(rng, {2});
  const PureState b = random_pure(rng, {2});
  const PureState cond = relative_state(tensor(a, b), 0, 0);
  const cxd phase_fix = b.amps(0) / cond.amps(0);
  CHECK((cond.amps * phase_fix - b.amps).norm() < 1e-12);

  // zero-probability branch
  const PureState zz = basis_state({2, 2}, {0, 0});
  CHECK_THROWS_AS(relative_state(zz, 0, 1), std::invalid_argument);
}

TEST_CASE("strategy 1 conditional readout matches the relative-state picture") {
  const DensityMatrix phi = to_density(phi_state());
  // observing spin-up on A leaves B in (|u 0> + |d 1>)/sqrt(2); closing B's
  // interferometer turns that into |+> (x) |0>, so the x readout is +1
  DensityMatrix cond = relative_state(phi, kSpinA, 0);    // dims (path_A, spin_B, path_B)
  cond = apply_unitary(cond, split_unitary(1), {1, 2});   // B rides path 1 when spin-down
  const auto probs = outcome_probabilities(cond, x_projectors(), {1});
  CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("strategy 1 on the maximally entangled state") {
  SplitMix64 rng(311);
  std::vector<MeasurementRecord> records;
  const WitnessEstimate est =
      sample_strategy1(to_density(phi_state()), 10000, rng, 1.0, &records);
  CHECK(std::abs(est.value - 2.0) <= 5.0 * est.std_error + 1e-12);
  CHECK(est.value == doctest::Approx(2.0).epsilon(1e-12));  // every shot is deterministic
  CHECK(est.std_error == doctest::Approx(1.0 / 10000.0).epsilon(1e-12));
  CHECK(records.size() == 10000);
  for (const MeasurementRecord& r : records) CHECK(r.product == 1);
}

TEST_CASE("strategy 1 on a product state sees no correlations") {
  const ProtocolRun run = run_protocol(default_config(0.0));
  SplitMix64 rng(313);
  const WitnessEstimate est = run_strategy1(run, 20000, rng);
  CHECK(std::abs(est.value) <= 5.0 * est.std_error);
  CHECK(est.std_error > 1e-3);  // genuinely random products
}

TEST_CASE("strategy 2 needs recombined paths") {
  const DensityMatrix split = to_density(phi_state());
  SplitMix64 rng(317);
  CHECK_THROWS_AS(sample_strategy2(split, 100, rng), std::invalid_argument);

  const WitnessEstimate est = sample_strategy2(to_density(phi_prime_state()), 10000, rng);
  CHECK(est.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("strategies agree with each other and the exact value") {
  ProtocolConfig cfg = default_config(1.0, PhaseConvention::eq5);
  cfg.t2_path = 2.0;  // partial dephasing keeps the sampling noisy
  const ProtocolRun run = run_protocol(cfg);
  const double exact = witness_exact_terms(run.pre_recombination).sum();

  SplitMix64 rng(331);
  const WitnessEstimate s1 = run_strategy1(run, 100000, rng);
  const WitnessEstimate s2 = run_strategy2(run, 100000, rng);
  const double combined = std::hypot(s1.std_error, s2.std_error);
  CHECK(std::abs(s1.value - s2.value) <= 5.0 * combined);
  CHECK(std::abs(s1.value - exact) <= 5.0 * s1.std_error);
  CHECK(std::abs(s2.value - exact) <= 5.0 * s2.std_error);

  // a plain spin-z reading of the recombined state flips both Z signs under
  // the protocol's up/path-1 wiring; the magnitude is preserved
  CHECK(witness_exact(run.final_state).value == doctest::Approx(-exact).epsilon(1e-10));
}

TEST_CASE("strategies survive an odd DD train flipping the wiring") {
  // one pulse fits at t_grav = 9 s: spins flip after splitting, so spin-down
  // rides path 1 and both strategies must remap their Z attributions
  ProtocolConfig cfg = default_config(9.0, PhaseConvention::eq5);
  cfg.n_dd = 1;
  const ProtocolRun run = run_protocol(cfg);
  REQUIRE(run.log.residual_spin_flip);

  const SpinPathCorrelation corr = detect_correlation(run.pre_recombination);
  CHECK(corr.spin_for_path1_a == 1);
  CHECK(corr.spin_for_path1_b == 1);

  const double exact = witness_exact_terms(run.pre_recombination).sum();
  ProtocolConfig plain_cfg = cfg;
  plain_cfg.n_dd = 0;
  const ProtocolRun plain = run_protocol(plain_cfg);
  CHECK(exact ==
        doctest::Approx(witness_exact_terms(plain.pre_recombination).sum()).epsilon(1e-10));

  SplitMix64 rng(373);
  const WitnessEstimate s1 = run_strategy1(run, 100000, rng);
  const WitnessEstimate s2 = run_strategy2(run, 100000, rng);
  CHECK(std::abs(s1.value - exact) <= 5.0 * s1.std_error + 1e-9);
  CHECK(std::abs(s2.value - exact) <= 5.0 * s2.std_error + 1e-9);
}

TEST_CASE("witness rejects foreign dimensions") {
  CHECK_THROWS_AS(witness_exact(DensityMatrix(Matrix::Identity(8, 8) / 8.0, {2, 2, 2})),
                  std::invalid_argument);
}

TEST_CASE("strategy estimators are unbiased") {
  ProtocolConfig cfg = default_config(1.0, PhaseConvention::eq5);
  cfg.t2_path = 2.0;
  const ProtocolRun run = run_protocol(cfg);
  const double exact = witness_exact_terms(run.pre_recombination).sum();

  SplitMix64 rng(337);
  const int reps = 100;
  const long long shots = 10000;
  double mean = 0.0, var_acc = 0.0;
  std::vector<double> values;
  for (int r = 0; r < reps; ++r) {
    const WitnessEstimate est = run_strategy2(run, shots, rng);
    values.push_back(est.value);
    mean += est.value;
  }
  mean /= reps;
  for (double v : values) var_acc += (v - mean) * (v - mean);
  const double sem = std::sqrt(var_acc / (reps - 1)) / std::sqrt(static_cast<double>(reps));
  CHECK(std::abs(mean - exact) <= 5.0 * sem);
}

TEST_CASE("standard error scales as 1/sqrt(shots)") {
  ProtocolConfig cfg = default_config(1.0, PhaseConvention::eq5);
  cfg.t2_path = 2.0;
  const ProtocolRun run = run_protocol(cfg);

  SplitMix64 rng(347);
  auto mean_stderr = [&](long long shots, int reps) {
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) acc += run_strategy2(run, shots, rng).std_error;
    return acc / reps;
  };
  const double base = mean_stderr(100000, 10) * std::sqrt(100000.0);
  for (long long shots : {100LL, 1000LL, 10000LL}) {
    const double scaled = mean_stderr(shots, 40) * std::sqrt(static_cast<double>(shots));
    CHECK(std::abs(scaled - base) / base < 0.10);
  }
}

TEST_CASE("dephasing pulls the witness below the separable bound") {
  ProtocolConfig cfg = default_config(1.0, PhaseConvention::eq5);
  cfg.t2_path = cfg.t_grav / 10.0;
  const ProtocolRun run = run_protocol(cfg);
  const double value = witness_exact_terms(run.pre_recombination).sum();
  CHECK(value < 1.0);

  // oracle: damp the ideal path pair by hand and take the expectation directly
  const double gamma = std::exp(-10.0);
  const cxd i(0.0, 1.0);
  Vector psi(4);
  psi << 0.5, 0.5 * std::exp(i * run.phases.dphi1), 0.5 * std::exp(i * run.phases.dphi2), -0.5;
  Matrix damped = psi * psi.adjoint();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      double f = 1.0;
      if ((r >> 1) != (c >> 1)) f *= gamma;
      if ((r & 1) != (c & 1)) f *= gamma;
      damped(r, c) *= f;
    }
  const Matrix w = kron(pauli_x(), pauli_z()) + kron(pauli_z(), pauli_x());
  cxd oracle = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) oracle += w(r, c) * damped(c, r);
  CHECK(value == doctest::Approx(oracle.real()).epsilon(1e-10));
}

TEST_CASE("measurement records export as csv") {
  SplitMix64 rng(353);
  std::vector<MeasurementRecord> records;
  sample_strategy2(to_density(phi_prime_state()), 50, rng, 1.0, &records);
  std::ostringstream out;
  write_records_csv(out, records);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "shot,strategy,term,outcome_A,outcome_B,product");
  int count = 0;
  while (std::getline(in, line)) ++count;
  CHECK(count == 50);
}

TEST_CASE("readout infidelity shrinks the estimate") {
  SplitMix64 rng(359);
  const DensityMatrix phi = to_density(phi_state());
  const WitnessEstimate noisy = sample_strategy1(phi, 50000, rng, 0.9);
  // independent flips on both outcomes scale each product mean by (2f - 1)^2
  const double expected = 2.0 * (2.0 * 0.9 - 1.0) * (2.0 * 0.9 - 1.0);
  CHECK(std::abs(noisy.value - expected) <= 5.0 * noisy.std_error);
  CHECK_THROWS_AS(sample_strategy1(phi, 100, rng, 1.5), std::invalid_argument);
}

TEST_CASE("sampling requires at least two shots") {
  SplitMix64 rng(367);
  CHECK_THROWS_AS(sample_strategy1(to_density(phi_state()), 1, rng), std::invalid_argument);
}
