#include "bmv/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bmv {

namespace {

std::size_t checked_product(const std::vector<int>& dims) {
  if (dims.empty()) throw std::invalid_argument("subsystem dimension list is empty");
  std::size_t n = 1;
  for (int d : dims) {
    if (d < 2) throw std::invalid_argument("subsystem dimension must be >= 2");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

void check_targets(const std::vector<int>& targets, std::size_t n_subsystems) {
  if (targets.empty()) throw std::invalid_argument("target subsystem list is empty");
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= n_subsystems)
      throw std::invalid_argument("target subsystem index out of range");
  }
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j]) throw std::invalid_argument("duplicate target subsystem");
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

PureState::PureState(Vector a, std::vector<int> d) : amps(std::move(a)), dims(std::move(d)) {
  if (checked_product(dims) != static_cast<std::size_t>(amps.size()))
    throw std::invalid_argument("amplitude count does not match product of dims");
  if (std::abs(amps.norm() - 1.0) > kNormTol)
    throw std::invalid_argument("pure state is not normalized");
}

DensityMatrix::DensityMatrix(Matrix m, std::vector<int> d) : mat(std::move(m)), dims(std::move(d)) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("density matrix must be square");
  if (checked_product(dims) != static_cast<std::size_t>(mat.rows()))
    throw std::invalid_argument("matrix size does not match product of dims");
  if (!is_hermitian(mat, kHermTol)) throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(mat.trace().real() - 1.0) > kNormTol || std::abs(mat.trace().imag()) > kNormTol)
    throw std::invalid_argument("density matrix trace is not 1");
  if (min_eigenvalue(mat) < kPositivityFloor)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

ObservableMatrix::ObservableMatrix(Matrix m, std::vector<int> d)
    : mat(std::move(m)), dims(std::move(d)) {
  if (mat.rows() != mat.cols()) throw std::invalid_argument("observable must be square");
  if (checked_product(dims) != static_cast<std::size_t>(mat.rows()))
    throw std::invalid_argument("matrix size does not match product of dims");
  if (!is_hermitian(mat, kHermTol)) throw std::invalid_argument("observable is not Hermitian");
}

// ---------------------------------------------------------------------------
// Elementary matrices and states
// ---------------------------------------------------------------------------

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  m << s, s, s, -s;
  return m;
}

Matrix identity(int n) { return Matrix::Identity(n, n); }

PureState basis_state(const std::vector<int>& dims, const std::vector<int>& digits) {
  const std::size_t n = checked_product(dims);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  v(static_cast<Eigen::Index>(compose_index(dims, digits))) = 1.0;
  return PureState(std::move(v), dims);
}

PureState plus_state() {
  Vector v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return PureState(std::move(v), {2});
}

DensityMatrix to_density(const PureState& psi) {
  return DensityMatrix(psi.amps * psi.amps.adjoint(), psi.dims);
}

// ---------------------------------------------------------------------------
// Index bookkeeping
// ---------------------------------------------------------------------------

std::size_t compose_index(const std::vector<int>& dims, const std::vector<int>& digits) {
  if (digits.size() != dims.size()) throw std::invalid_argument("digit count != subsystem count");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims[i]) throw std::invalid_argument("digit out of range");
    idx = idx * static_cast<std::size_t>(dims[i]) + static_cast<std::size_t>(digits[i]);
  }
  return idx;
}

std::vector<int> decompose_index(const std::vector<int>& dims, std::size_t index) {
  std::vector<int> digits(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % static_cast<std::size_t>(dims[i]));
    index /= static_cast<std::size_t>(dims[i]);
  }
  return digits;
}

// ---------------------------------------------------------------------------
// Structure checks
// ---------------------------------------------------------------------------

bool is_hermitian(const Matrix& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Tensor products and embedding
// ---------------------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

std::vector<int> concat_dims(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> dims = a;
  dims.insert(dims.end(), b.begin(), b.end());
  return dims;
}

}  // namespace

PureState tensor(const PureState& a, const PureState& b) {
  Vector v(a.amps.size() * b.amps.size());
  for (Eigen::Index i = 0; i < a.amps.size(); ++i)
    v.segment(i * b.amps.size(), b.amps.size()) = a.amps(i) * b.amps;
  return PureState(std::move(v), concat_dims(a.dims, b.dims));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.mat, b.mat), concat_dims(a.dims, b.dims));
}

ObservableMatrix tensor(const ObservableMatrix& a, const ObservableMatrix& b) {
  return ObservableMatrix(kron(a.mat, b.mat), concat_dims(a.dims, b.dims));
}

Matrix embed_on_targets(const Matrix& op, const std::vector<int>& targets,
                        const std::vector<int>& dims) {
  check_targets(targets, dims.size());
  std::size_t target_dim = 1;
  std::vector<int> tdims(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    tdims[i] = dims[static_cast<std::size_t>(targets[i])];
    target_dim *= static_cast<std::size_t>(tdims[i]);
  }
  if (static_cast<std::size_t>(op.rows()) != target_dim ||
      static_cast<std::size_t>(op.cols()) != target_dim)
    throw std::invalid_argument("operator size does not match product of target dims");

  const std::size_t n = checked_product(dims);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<int> digits = decompose_index(dims, col);
    std::vector<int> tcol(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
      tcol[i] = digits[static_cast<std::size_t>(targets[i])];
    const std::size_t tcol_lin = compose_index(tdims, tcol);
    for (std::size_t trow_lin = 0; trow_lin < target_dim; ++trow_lin) {
      const cxd v = op(static_cast<Eigen::Index>(trow_lin), static_cast<Eigen::Index>(tcol_lin));
      if (v == cxd(0, 0)) continue;
      std::vector<int> trow = decompose_index(tdims, trow_lin);
      std::vector<int> row_digits = digits;
      for (std::size_t i = 0; i < targets.size(); ++i)
        row_digits[static_cast<std::size_t>(targets[i])] = trow[i];
      out(static_cast<Eigen::Index>(compose_index(dims, row_digits)),
          static_cast<Eigen::Index>(col)) = v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unitary application and expectation
// ---------------------------------------------------------------------------

namespace {

Matrix checked_embedded_unitary(const Matrix& u, const std::vector<int>& targets,
                                const std::vector<int>& dims) {
  if (!is_unitary(u, kUnitaryTol)) throw std::invalid_argument("matrix is not unitary");
  return embed_on_targets(u, targets, dims);
}

}  // namespace

PureState apply_unitary(const PureState& psi, const Matrix& u, const std::vector<int>& targets) {
  const Matrix full = checked_embedded_unitary(u, targets, psi.dims);
  return PureState(full * psi.amps, psi.dims);
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& targets) {
  const Matrix full = checked_embedded_unitary(u, targets, rho.dims);
  return DensityMatrix(full * rho.mat * full.adjoint(), rho.dims);
}

namespace {

double checked_real(cxd value, const char* what) {
  if (std::abs(value.imag()) > 1e-10)
    throw std::runtime_error(std::string(what) + ": imaginary residue above tolerance");
  return value.real();
}

}  // namespace

double expectation(const PureState& psi, const ObservableMatrix& obs) {
  if (obs.dim() != psi.dim()) throw std::invalid_argument("observable/state dimension mismatch");
  return checked_real(psi.amps.adjoint() * (obs.mat * psi.amps), "expectation");
}

double expectation(const DensityMatrix& rho, const ObservableMatrix& obs) {
  if (obs.dim() != rho.dim()) throw std::invalid_argument("observable/state dimension mismatch");
  return checked_real((rho.mat * obs.mat).trace(), "expectation");
}

// ---------------------------------------------------------------------------
// Partial trace / transpose
// ---------------------------------------------------------------------------

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  check_targets(keep, rho.dims.size());

  std::vector<int> traced;
  for (std::size_t i = 0; i < rho.dims.size(); ++i)
    if (std::find(keep.begin(), keep.end(), static_cast<int>(i)) == keep.end())
      traced.push_back(static_cast<int>(i));

  std::vector<int> kdims, trdims;
  for (int k : keep) kdims.push_back(rho.dims[static_cast<std::size_t>(k)]);
  for (int t : traced) trdims.push_back(rho.dims[static_cast<std::size_t>(t)]);

  const std::size_t nk = checked_product(kdims);
  std::size_t nt = 1;
  for (int d : trdims) nt *= static_cast<std::size_t>(d);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
  std::vector<int> digits_row(rho.dims.size()), digits_col(rho.dims.size());
  for (std::size_t r = 0; r < nk; ++r) {
    const std::vector<int> rk = decompose_index(kdims, r);
    for (std::size_t c = 0; c < nk; ++c) {
      const std::vector<int> ck = decompose_index(kdims, c);
      cxd sum = 0;
      for (std::size_t t = 0; t < nt; ++t) {
        const std::vector<int> tt = trdims.empty() ? std::vector<int>{} : decompose_index(trdims, t);
        for (std::size_t i = 0; i < keep.size(); ++i) {
          digits_row[static_cast<std::size_t>(keep[i])] = rk[i];
          digits_col[static_cast<std::size_t>(keep[i])] = ck[i];
        }
        for (std::size_t i = 0; i < traced.size(); ++i) {
          digits_row[static_cast<std::size_t>(traced[i])] = tt[i];
          digits_col[static_cast<std::size_t>(traced[i])] = tt[i];
        }
        sum += rho.mat(static_cast<Eigen::Index>(compose_index(rho.dims, digits_row)),
                       static_cast<Eigen::Index>(compose_index(rho.dims, digits_col)));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
    }
  }
  // re-symmetrize roundoff before the constructor's Hermiticity check
  out = (out + out.adjoint().eval()) / 2.0;
  return DensityMatrix(std::move(out), kdims);
}

DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep) {
  return partial_trace(to_density(psi), keep);
}

Matrix partial_transpose(const DensityMatrix& rho, int subsystem) {
  if (subsystem < 0 || static_cast<std::size_t>(subsystem) >= rho.dims.size())
    throw std::invalid_argument("subsystem index out of range");
  const std::size_t n = static_cast<std::size_t>(rho.dim());
  Matrix out(rho.mat.rows(), rho.mat.cols());
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<int> dr = decompose_index(rho.dims, r);
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<int> dc = decompose_index(rho.dims, c);
      std::swap(dr[static_cast<std::size_t>(subsystem)], dc[static_cast<std::size_t>(subsystem)]);
      out(static_cast<Eigen::Index>(compose_index(rho.dims, dr)),
          static_cast<Eigen::Index>(compose_index(rho.dims, dc))) =
          rho.mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      std::swap(dr[static_cast<std::size_t>(subsystem)], dc[static_cast<std::size_t>(subsystem)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entanglement monotones
// ---------------------------------------------------------------------------

namespace {

void check_two_qubit(const DensityMatrix& rho, const char* what) {
  if (rho.dims != std::vector<int>{2, 2})
    throw std::invalid_argument(std::string(what) + " requires a two-qubit state");
}

}  // namespace

double negativity(const DensityMatrix& rho) {
  check_two_qubit(rho, "negativity");
  const Matrix pt = partial_transpose(rho, 1);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(pt, Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double ev = solver.eigenvalues()(i);
    if (ev < 0.0) sum -= ev;
  }
  return sum;
}

double concurrence(const DensityMatrix& rho) {
  check_two_qubit(rho, "concurrence");
  // The Wootters lambdas are the singular values of L^T (Y x Y) L with
  // rho = L L^+. Unlike eigenvalues of rho*rho_tilde, singular values carry no
  // sqrt amplification of roundoff, so near-zero lambdas come out at machine
  // precision and pure states match 2|ad - bc| to ~1e-15.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.mat);
  Matrix l = eig.eigenvectors();
  for (Eigen::Index i = 0; i < 4; ++i)
    l.col(i) *= std::sqrt(std::max(0.0, eig.eigenvalues()(i)));
  const Matrix yy = kron(pauli_y(), pauli_y());
  const Matrix m = l.transpose() * yy * l;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& lambdas = svd.singularValues();
  return std::max(0.0, lambdas(0) - lambdas(1) - lambdas(2) - lambdas(3));
}

// ---------------------------------------------------------------------------
// Projective measurement
// ---------------------------------------------------------------------------

namespace {

void check_projector_set(const std::vector<Matrix>& projectors) {
  if (projectors.empty()) throw std::invalid_argument("projector set is empty");
  const Eigen::Index n = projectors.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  for (const Matrix& p : projectors) {
    if (p.rows() != n || p.cols() != n)
      throw std::invalid_argument("projectors have mismatched sizes");
    if ((p * p - p).cwiseAbs().maxCoeff() > kProjectorTol)
      throw std::invalid_argument("projector set contains a non-idempotent element");
    sum += p;
  }
  if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kProjectorTol)
    throw std::invalid_argument("projector set is not complete");
  for (std::size_t i = 0; i < projectors.size(); ++i)
    for (std::size_t j = i + 1; j < projectors.size(); ++j)
      if ((projectors[i] * projectors[j]).cwiseAbs().maxCoeff() > kProjectorTol)
        throw std::invalid_argument("projector set is not orthogonal");
}

std::vector<Matrix> embedded_projectors(const std::vector<Matrix>& projectors,
                                        const std::vector<int>& targets,
                                        const std::vector<int>& dims) {
  check_projector_set(projectors);
  std::vector<Matrix> full;
  full.reserve(projectors.size());
  for (const Matrix& p : projectors) full.push_back(embed_on_targets(p, targets, dims));
  return full;
}

}  // namespace

std::vector<double> outcome_probabilities(const DensityMatrix& rho,
                                          const std::vector<Matrix>& projectors,
                                          const std::vector<int>& targets) {
  const auto full = embedded_projectors(projectors, targets, rho.dims);
  std::vector<double> probs;
  probs.reserve(full.size());
  for (const Matrix& p : full) probs.push_back(std::max(0.0, (p * rho.mat).trace().real()));
  return probs;
}

std::vector<double> outcome_probabilities(const PureState& psi,
                                          const std::vector<Matrix>& projectors,
                                          const std::vector<int>& targets) {
  const auto full = embedded_projectors(projectors, targets, psi.dims);
  std::vector<double> probs;
  probs.reserve(full.size());
  for (const Matrix& p : full) probs.push_back((p * psi.amps).squaredNorm());
  return probs;
}

MeasuredPure measure_projective(const PureState& psi, const std::vector<Matrix>& projectors,
                                const std::vector<int>& targets, SplitMix64& rng) {
  const auto full = embedded_projectors(projectors, targets, psi.dims);
  std::vector<double> probs;
  for (const Matrix& p : full) probs.push_back((p * psi.amps).squaredNorm());
  const int outcome = rng.pick(probs);
  const double prob = probs[static_cast<std::size_t>(outcome)];
  if (prob <= 1e-300) throw std::runtime_error("sampled a zero-probability outcome");
  Vector post = full[static_cast<std::size_t>(outcome)] * psi.amps;
  post /= post.norm();
  return {outcome, PureState(std::move(post), psi.dims), prob};
}

MeasuredMixed measure_projective(const DensityMatrix& rho, const std::vector<Matrix>& projectors,
                                 const std::vector<int>& targets, SplitMix64& rng) {
  const auto full = embedded_projectors(projectors, targets, rho.dims);
  std::vector<double> probs;
  for (const Matrix& p : full) probs.push_back(std::max(0.0, (p * rho.mat).trace().real()));
  const int outcome = rng.pick(probs);
  const double prob = probs[static_cast<std::size_t>(outcome)];
  if (prob <= 1e-300) throw std::runtime_error("sampled a zero-probability outcome");
  const Matrix& p = full[static_cast<std::size_t>(outcome)];
  Matrix post = p * rho.mat * p / prob;
  post = (post + post.adjoint().eval()) / 2.0;
  return {outcome, DensityMatrix(std::move(post), rho.dims), prob};
}

std::vector<Matrix> z_projectors() {
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return {p0, p1};
}

std::vector<Matrix> x_projectors() {
  Matrix plus(2, 2), minus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  return {plus, minus};
}

}  // namespace bmv
