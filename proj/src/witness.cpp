#include "bmv/witness.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace bmv {

namespace {

constexpr double kSupportTol = 1e-8;

const std::vector<int> kPairDims{2, 2};

double population(const DensityMatrix& rho, int subsystem, int value) {
  double p = 0.0;
  const std::size_t n = static_cast<std::size_t>(rho.dim());
  for (std::size_t i = 0; i < n; ++i) {
    if (decompose_index(rho.dims, i)[static_cast<std::size_t>(subsystem)] == value)
      p += rho.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return p;
}

void check_protocol_dims(const DensityMatrix& rho) {
  if (rho.dims != std::vector<int>{2, 2, 2, 2})
    throw std::invalid_argument("expected a four-qubit (spin, path, spin, path) state");
}

// joint population of one probe's (spin, path) pair
double pair_population(const DensityMatrix& rho, int spin_idx, int path_idx, int s, int p) {
  double out = 0.0;
  const std::size_t n = static_cast<std::size_t>(rho.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const auto digits = decompose_index(rho.dims, i);
    if (digits[static_cast<std::size_t>(spin_idx)] == s &&
        digits[static_cast<std::size_t>(path_idx)] == p)
      out += rho.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return out;
}

int detect_probe_correlation(const DensityMatrix& rho, int spin_idx, int path_idx) {
  double pop[2][2];
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < 2; ++p) pop[s][p] = pair_population(rho, spin_idx, path_idx, s, p);
  const double path1 = pop[0][1] + pop[1][1];
  const double path0 = pop[0][0] + pop[1][0];
  if (path1 < 1e-12 || path0 < 1e-12)
    throw std::invalid_argument("state is not path-split: one arm carries no weight");
  const int s1 = pop[0][1] >= pop[1][1] ? 0 : 1;
  const int s0 = pop[0][0] >= pop[1][0] ? 0 : 1;
  if (s0 == s1 || pop[1 - s1][1] > kSupportTol || pop[1 - s0][0] > kSupportTol)
    throw std::invalid_argument("state has weight outside the spin-path correlated subspace");
  return s1;
}

}  // namespace

ObservableMatrix witness_operator() {
  return ObservableMatrix(kron(pauli_x(), pauli_z()) + kron(pauli_z(), pauli_x()), kPairDims);
}

SpinPathCorrelation detect_correlation(const DensityMatrix& state16) {
  check_protocol_dims(state16);
  return {detect_probe_correlation(state16, kSpinA, kPathA),
          detect_probe_correlation(state16, kSpinB, kPathB)};
}

bool paths_recombined(const DensityMatrix& state16) {
  check_protocol_dims(state16);
  return population(state16, kPathA, 1) <= kSupportTol &&
         population(state16, kPathB, 1) <= kSupportTol;
}

DensityMatrix extract_path_state(const DensityMatrix& state16) {
  const SpinPathCorrelation corr = detect_correlation(state16);
  const auto spin_for = [&](int probe, int path) {
    const int s1 = probe == 0 ? corr.spin_for_path1_a : corr.spin_for_path1_b;
    return path == 1 ? s1 : 1 - s1;
  };
  Matrix out(4, 4);
  for (int pa = 0; pa < 2; ++pa)
    for (int pb = 0; pb < 2; ++pb)
      for (int qa = 0; qa < 2; ++qa)
        for (int qb = 0; qb < 2; ++qb) {
          const std::size_t row =
              compose_index(state16.dims, {spin_for(0, pa), pa, spin_for(1, pb), pb});
          const std::size_t col =
              compose_index(state16.dims, {spin_for(0, qa), qa, spin_for(1, qb), qb});
          out(2 * pa + pb, 2 * qa + qb) = state16.mat(static_cast<Eigen::Index>(row),
                                                      static_cast<Eigen::Index>(col));
        }
  out /= out.trace().real();
  out = (out + out.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(out), kPairDims);
}

WitnessTerms witness_exact_terms(const DensityMatrix& state) {
  DensityMatrix pair = [&] {
    if (state.dims == kPairDims) return state;
    check_protocol_dims(state);
    if (paths_recombined(state)) return partial_trace(state, {kSpinA, kSpinB});
    return extract_path_state(state);
  }();
  const ObservableMatrix xz(kron(pauli_x(), pauli_z()), kPairDims);
  const ObservableMatrix zx(kron(pauli_z(), pauli_x()), kPairDims);
  return {expectation(pair, xz), expectation(pair, zx)};
}

namespace {

WitnessEstimate make_estimate(double value, double std_error, long long shots,
                              Strategy strategy) {
  if (std::abs(value) > 2.0 + 5.0 * std_error + 1e-9)
    throw std::runtime_error("witness estimate outside the operator range");
  return {value, std_error, shots, strategy};
}

}  // namespace

WitnessEstimate witness_exact(const DensityMatrix& state) {
  return make_estimate(witness_exact_terms(state).sum(), 0.0, 0, Strategy::exact);
}

WitnessEstimate witness_exact(const PureState& state) { return witness_exact(to_density(state)); }

// ---------------------------------------------------------------------------
// Shot sampling
// ---------------------------------------------------------------------------

namespace {

struct TermDistribution {
  // joint[first][second]: first index is the z-proxy outcome on the probe
  // measured first, second the x outcome on the partner
  double joint[2][2];
  int z_value[2];  // Z eigenvalue attributed to the first probe's outcome
};

DensityMatrix collapse(const DensityMatrix& rho, const Matrix& projector_full, double prob) {
  Matrix post = projector_full * rho.mat * projector_full / prob;
  post = (post + post.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(post), rho.dims);
}

// Strategy 1 term: spin z readout on `first` (the path proxy), then the
// partner's paths are closed with its own recombiner and its spin read along x.
TermDistribution strategy1_term(const DensityMatrix& rho, int first,
                                const SpinPathCorrelation& corr) {
  const int first_spin = first == 0 ? kSpinA : kSpinB;
  const int other_spin = first == 0 ? kSpinB : kSpinA;
  const int other_path = first == 0 ? kPathB : kPathA;
  const int first_s1 = first == 0 ? corr.spin_for_path1_a : corr.spin_for_path1_b;
  const int other_s1 = first == 0 ? corr.spin_for_path1_b : corr.spin_for_path1_a;

  TermDistribution dist{};
  const auto zs = z_projectors();
  const auto probs = outcome_probabilities(rho, zs, {first_spin});
  for (int s = 0; s < 2; ++s) {
    // spin s rode path 1 iff s == spin_for_path1; path 0 carries Z = +1
    dist.z_value[s] = (s == first_s1) ? -1 : +1;
    if (probs[static_cast<std::size_t>(s)] < 1e-15) continue;
    DensityMatrix cond = collapse(rho, embed_on_targets(zs[static_cast<std::size_t>(s)],
                                                        {first_spin}, rho.dims),
                                  probs[static_cast<std::size_t>(s)]);
    cond = apply_unitary(cond, split_unitary(other_s1), {other_spin, other_path});
    const auto xprobs = outcome_probabilities(cond, x_projectors(), {other_spin});
    for (int x = 0; x < 2; ++x)
      dist.joint[s][x] = probs[static_cast<std::size_t>(s)] * xprobs[static_cast<std::size_t>(x)];
  }
  return dist;
}

// Strategy 2 term: both probes already recombined, Z and X are spin
// observables. The z outcome is attributed to the path the spin rode before
// recombination: the first_s1 spin value carried path 1, hence Z = -1. The x
// readout is pairing-independent ((|s0> + |s1>)/sqrt2 is symmetric).
TermDistribution strategy2_term(const DensityMatrix& rho, int first, int first_s1) {
  const int first_spin = first == 0 ? kSpinA : kSpinB;
  const int other_spin = first == 0 ? kSpinB : kSpinA;

  TermDistribution dist{};
  const auto zs = z_projectors();
  const auto probs = outcome_probabilities(rho, zs, {first_spin});
  for (int s = 0; s < 2; ++s) {
    dist.z_value[s] = (s == first_s1) ? -1 : +1;
    if (probs[static_cast<std::size_t>(s)] < 1e-15) continue;
    const DensityMatrix cond =
        collapse(rho, embed_on_targets(zs[static_cast<std::size_t>(s)], {first_spin}, rho.dims),
                 probs[static_cast<std::size_t>(s)]);
    const auto xprobs = outcome_probabilities(cond, x_projectors(), {other_spin});
    for (int x = 0; x < 2; ++x)
      dist.joint[s][x] = probs[static_cast<std::size_t>(s)] * xprobs[static_cast<std::size_t>(x)];
  }
  return dist;
}

struct TermAccumulator {
  long long n = 0;
  long long sum = 0;
  void add(int product) {
    ++n;
    sum += product;
  }
  double mean() const { return n > 0 ? static_cast<double>(sum) / static_cast<double>(n) : 0.0; }
  // unbiased sample variance of +-1 outcomes
  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    return static_cast<double>(n) * (1.0 - m * m) / static_cast<double>(n - 1);
  }
};

WitnessEstimate sample_terms(const TermDistribution& za_xb, const TermDistribution& xa_zb,
                             long long shots, SplitMix64& rng, double readout_fidelity,
                             Strategy strategy, std::vector<MeasurementRecord>* records) {
  if (shots < 2) throw std::invalid_argument("witness sampling needs at least 2 shots");
  if (!(readout_fidelity >= 0.0 && readout_fidelity <= 1.0))
    throw std::invalid_argument("readout fidelity must lie in [0, 1]");

  TermAccumulator acc[2];
  for (long long shot = 0; shot < shots; ++shot) {
    const int term = static_cast<int>(shot % 2);  // 0: Z_A X_B, 1: X_A Z_B
    const TermDistribution& dist = term == 0 ? za_xb : xa_zb;
    const double weights[4] = {dist.joint[0][0], dist.joint[0][1], dist.joint[1][0],
                               dist.joint[1][1]};
    const int pick = rng.pick(weights);
    const int s = pick / 2;
    const int x = pick % 2;
    int first = dist.z_value[s];
    int second = x == 0 ? +1 : -1;
    if (readout_fidelity < 1.0) {
      if (rng.bernoulli(1.0 - readout_fidelity)) first = -first;
      if (rng.bernoulli(1.0 - readout_fidelity)) second = -second;
    }
    // term 0 measures A first, term 1 measures B first
    const int outcome_a = term == 0 ? first : second;
    const int outcome_b = term == 0 ? second : first;
    const int product = outcome_a * outcome_b;
    acc[term].add(product);
    if (records) records->push_back({shot, strategy, term, outcome_a, outcome_b, product});
  }

  const double value = acc[0].mean() + acc[1].mean();
  double std_error = std::sqrt(acc[0].variance() / static_cast<double>(std::max<long long>(acc[0].n, 1)) +
                               acc[1].variance() / static_cast<double>(std::max<long long>(acc[1].n, 1)));
  // resolution floor of an n-shot +-1 estimator
  std_error = std::max(std_error, 1.0 / static_cast<double>(shots));
  return make_estimate(value, std_error, shots, strategy);
}

}  // namespace

WitnessEstimate sample_strategy1(const DensityMatrix& pre_recombination, long long shots,
                                 SplitMix64& rng, double readout_fidelity,
                                 std::vector<MeasurementRecord>* records) {
  const SpinPathCorrelation corr = detect_correlation(pre_recombination);
  const TermDistribution za_xb = strategy1_term(pre_recombination, 0, corr);
  const TermDistribution xa_zb = strategy1_term(pre_recombination, 1, corr);
  return sample_terms(za_xb, xa_zb, shots, rng, readout_fidelity, Strategy::strategy1, records);
}

WitnessEstimate sample_strategy2(const DensityMatrix& recombined, long long shots,
                                 SplitMix64& rng, double readout_fidelity,
                                 std::vector<MeasurementRecord>* records,
                                 SpinPathCorrelation pairing) {
  check_protocol_dims(recombined);
  if (!paths_recombined(recombined))
    throw std::invalid_argument("strategy 2 requires both paths recombined into |0>");
  const TermDistribution za_xb = strategy2_term(recombined, 0, pairing.spin_for_path1_a);
  const TermDistribution xa_zb = strategy2_term(recombined, 1, pairing.spin_for_path1_b);
  return sample_terms(za_xb, xa_zb, shots, rng, readout_fidelity, Strategy::strategy2, records);
}

WitnessEstimate run_strategy1(const ProtocolRun& run, long long shots, SplitMix64& rng,
                              double readout_fidelity, std::vector<MeasurementRecord>* records) {
  return sample_strategy1(run.pre_recombination, shots, rng, readout_fidelity, records);
}

WitnessEstimate run_strategy2(const ProtocolRun& run, long long shots, SplitMix64& rng,
                              double readout_fidelity, std::vector<MeasurementRecord>* records) {
  // the pre-recombination snapshot still knows which spin rode which path
  const SpinPathCorrelation pairing = detect_correlation(run.pre_recombination);
  return sample_strategy2(run.final_state, shots, rng, readout_fidelity, records, pairing);
}

// ---------------------------------------------------------------------------
// Relative states
// ---------------------------------------------------------------------------

namespace {

std::vector<int> dims_without(const std::vector<int>& dims, int subsystem) {
  if (subsystem < 0 || static_cast<std::size_t>(subsystem) >= dims.size())
    throw std::invalid_argument("relative_state: subsystem index out of range");
  if (dims.size() < 2)
    throw std::invalid_argument("relative_state: cannot drop the only subsystem");
  std::vector<int> rest;
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (static_cast<int>(i) != subsystem) rest.push_back(dims[i]);
  return rest;
}

}  // namespace

PureState relative_state(const PureState& state, int subsystem, int outcome) {
  const std::vector<int> rest = dims_without(state.dims, subsystem);
  std::size_t nr = 1;
  for (int d : rest) nr *= static_cast<std::size_t>(d);
  Vector block(static_cast<Eigen::Index>(nr));
  for (std::size_t j = 0; j < nr; ++j) {
    std::vector<int> digits = decompose_index(rest, j);
    digits.insert(digits.begin() + subsystem, outcome);
    block(static_cast<Eigen::Index>(j)) =
        state.amps(static_cast<Eigen::Index>(compose_index(state.dims, digits)));
  }
  const double prob = block.squaredNorm();
  if (prob <= 1e-12) throw std::invalid_argument("relative_state: zero-probability outcome");
  return PureState(block / std::sqrt(prob), rest);
}

DensityMatrix relative_state(const DensityMatrix& state, int subsystem, int outcome) {
  const std::vector<int> rest = dims_without(state.dims, subsystem);
  std::size_t nr = 1;
  for (int d : rest) nr *= static_cast<std::size_t>(d);
  Matrix block(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nr));
  for (std::size_t r = 0; r < nr; ++r) {
    std::vector<int> dr = decompose_index(rest, r);
    dr.insert(dr.begin() + subsystem, outcome);
    for (std::size_t c = 0; c < nr; ++c) {
      std::vector<int> dc = decompose_index(rest, c);
      dc.insert(dc.begin() + subsystem, outcome);
      block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          state.mat(static_cast<Eigen::Index>(compose_index(state.dims, dr)),
                    static_cast<Eigen::Index>(compose_index(state.dims, dc)));
    }
  }
  const double prob = block.trace().real();
  if (prob <= 1e-12) throw std::invalid_argument("relative_state: zero-probability outcome");
  block /= prob;
  block = (block + block.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(block), rest);
}

void write_records_csv(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << "shot,strategy,term,outcome_A,outcome_B,product\n";
  for (const MeasurementRecord& r : records) {
    out << r.shot << ',' << (r.strategy == Strategy::strategy1 ? "strategy1" : "strategy2") << ','
        << (r.term == 0 ? "ZaXb" : "XaZb") << ',' << r.outcome_a << ',' << r.outcome_b << ','
        << r.product << '\n';
  }
}

}  // namespace bmv
