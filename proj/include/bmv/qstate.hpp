#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bmv/rng.hpp"

// Dense complex linear algebra for pure states and density matrices on small
// composite Hilbert spaces (total dimension <= 16 in this project), plus the
// two-qubit entanglement quantifiers and projective measurement sampling.
//
// Subsystem ordering convention: dims[0] is the leftmost (most significant)
// tensor factor. Protocol states use the fixed order
//   (spin_A, path_A, spin_B, path_B)
// with spin index 0 = |up>, 1 = |down> and path index 0/1 = interferometer arm.

namespace bmv {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPositivityFloor = -1e-10;  // dense-eigensolver noise floor
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kProjectorTol = 1e-10;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct PureState {
  Vector amps;
  std::vector<int> dims;

  PureState(Vector a, std::vector<int> d);
  int dim() const { return static_cast<int>(amps.size()); }
};

struct DensityMatrix {
  Matrix mat;
  std::vector<int> dims;

  DensityMatrix(Matrix m, std::vector<int> d);
  int dim() const { return static_cast<int>(mat.rows()); }
  double purity() const { return (mat * mat).trace().real(); }
};

struct ObservableMatrix {
  Matrix mat;
  std::vector<int> dims;

  ObservableMatrix(Matrix m, std::vector<int> d);
  int dim() const { return static_cast<int>(mat.rows()); }
};

// ---------------------------------------------------------------------------
// Elementary matrices and states
// ---------------------------------------------------------------------------

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix hadamard();
Matrix identity(int n);

// |digits> on the given subsystem dimensions
PureState basis_state(const std::vector<int>& dims, const std::vector<int>& digits);
// (|0> + |1>)/sqrt(2)
PureState plus_state();

DensityMatrix to_density(const PureState& psi);

// ---------------------------------------------------------------------------
// Index bookkeeping
// ---------------------------------------------------------------------------

std::size_t compose_index(const std::vector<int>& dims, const std::vector<int>& digits);
std::vector<int> decompose_index(const std::vector<int>& dims, std::size_t index);

// ---------------------------------------------------------------------------
// Structure checks
// ---------------------------------------------------------------------------

bool is_hermitian(const Matrix& m, double tol);
bool is_unitary(const Matrix& m, double tol);
double min_eigenvalue(const Matrix& hermitian);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);

PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
ObservableMatrix tensor(const ObservableMatrix& a, const ObservableMatrix& b);

// op acting on the listed target subsystems (in the listed order), identity
// elsewhere; targets need not be adjacent
Matrix embed_on_targets(const Matrix& op, const std::vector<int>& targets,
                        const std::vector<int>& dims);

PureState apply_unitary(const PureState& psi, const Matrix& u, const std::vector<int>& targets);
DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& u,
                            const std::vector<int>& targets);

double expectation(const PureState& psi, const ObservableMatrix& obs);
double expectation(const DensityMatrix& rho, const ObservableMatrix& obs);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
DensityMatrix partial_trace(const PureState& psi, const std::vector<int>& keep);

// Transpose of the chosen subsystem factor; output is Hermitian but in
// general indefinite, hence a plain matrix.
Matrix partial_transpose(const DensityMatrix& rho, int subsystem);

// Two-qubit monotones. Zero exactly on separable states.
double negativity(const DensityMatrix& rho);
double concurrence(const DensityMatrix& rho);

// ---------------------------------------------------------------------------
// Projective measurement
// ---------------------------------------------------------------------------

// Born probabilities of a complete orthogonal projector set given on the
// target subsystems. Validates completeness and orthogonality.
std::vector<double> outcome_probabilities(const DensityMatrix& rho,
                                          const std::vector<Matrix>& projectors,
                                          const std::vector<int>& targets);
std::vector<double> outcome_probabilities(const PureState& psi,
                                          const std::vector<Matrix>& projectors,
                                          const std::vector<int>& targets);

struct MeasuredPure {
  int outcome;
  PureState post;
  double probability;
};
struct MeasuredMixed {
  int outcome;
  DensityMatrix post;
  double probability;
};

MeasuredPure measure_projective(const PureState& psi, const std::vector<Matrix>& projectors,
                                const std::vector<int>& targets, SplitMix64& rng);
MeasuredMixed measure_projective(const DensityMatrix& rho, const std::vector<Matrix>& projectors,
                                 const std::vector<int>& targets, SplitMix64& rng);

// {|0><0|, |1><1|} and the x-basis pair {|+><+|, |-><-|}
std::vector<Matrix> z_projectors();
std::vector<Matrix> x_projectors();

}  // namespace bmv
