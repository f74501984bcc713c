// Copyright 2026 The everett-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace evlab::qlin {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default relative tolerance for rank decisions, orthogonality checks and
/// type invariants. Double-precision SVD/eigensolver error at the dimensions
/// handled here (<= 4096) stays several orders of magnitude below this.
inline constexpr double kTol = 1e-10;

/// Thrown when a mathematical invariant that valid inputs cannot break is
/// violated (a bug signal, distinct from bad user input).
class invariant_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic pseudo-random source. All variates are derived from raw
/// mt19937_64 output with fixed arithmetic, so sequences are identical across
/// standard-library implementations.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal variate (Box-Muller; the paired variate is cached).
  double gaussian();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives a stream of independent seeds from a base seed (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Normalized complex amplitude vector over a labeled tensor factorization.
/// Invariants (checked at construction): product(factor_dims) equals the
/// amplitude count and the squared norm is 1 within kTol.
struct StateVector {
  Vector amplitudes;
  std::vector<Index> factor_dims;

  StateVector(Vector amps, std::vector<Index> dims);

  Index dim() const { return amplitudes.size(); }
};

/// Hermitian, trace-1 complex matrix over a labeled tensor factorization.
/// Hermiticity and unit trace are checked at construction; positive
/// semidefiniteness is O(n^3) and checked on demand via assert_psd().
struct DensityMatrix {
  Matrix matrix;
  std::vector<Index> factor_dims;

  DensityMatrix(Matrix m, std::vector<Index> dims);

  Index dim() const { return matrix.rows(); }

  /// Throws invariant_error unless every eigenvalue is >= -tol.
  void assert_psd(double tol = kTol) const;
};

/// Complex square matrix with U^dagger U = I within kTol (max-abs-element).
struct UnitaryOperator {
  Matrix matrix;
  std::vector<Index> factor_dims;

  UnitaryOperator(Matrix m, std::vector<Index> dims);

  Index dim() const { return matrix.rows(); }
};

/// Bipartite expansion psi = sum_k coefficients[k] |left_k> (x) |right_k>
/// with non-negative coefficients in descending order and orthonormal factor
/// columns. Produced by schmidt().
struct SchmidtDecomposition {
  RealVector coefficients;
  Matrix left_vectors;
  Matrix right_vectors;
};

/// Orthonormal spanning set of a subspace of a parent_dim-dimensional space,
/// stored as matrix columns. Orthonormality is checked at construction.
struct Subspace {
  Matrix basis;
  Index parent_dim;

  Subspace(Matrix b, Index parent);

  Index dimension() const { return basis.cols(); }

  /// Projector onto the subspace, basis * basis^dagger.
  Matrix projector() const { return basis * basis.adjoint(); }
};

// --- Tensor products -------------------------------------------------------
// Leftmost factor is the most significant index: element i*dim_b + j of a
// vector product is a_i * b_j, and matrices follow the same block layout.

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);
StateVector kron(const StateVector& a, const StateVector& b);
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);
UnitaryOperator kron(const UnitaryOperator& a, const UnitaryOperator& b);

/// Traces out every factor not listed in `keep`; the kept factors stay in
/// their original relative order and the trace is preserved. `keep` must be
/// a non-empty set of valid factor indices.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep);

/// Schmidt decomposition of `psi` across the contiguous bipartition putting
/// the first `left_factors` factors on the left. Computed as the SVD of the
/// amplitude matrix reshaped to dim_left x dim_right. Ties between equal
/// coefficients follow the SVD's ordering, so degenerate blocks are only
/// determined up to span.
SchmidtDecomposition schmidt(const StateVector& psi, int left_factors);

/// Number of eigenvalues strictly above tol * (largest eigenvalue).
int numerical_rank(const DensityMatrix& rho, double tol = kTol);

/// Orthonormal basis of the span of the given vectors (SVD rank with
/// relative threshold `tol`). All vectors must share one parent dimension.
Subspace span_subspace(const std::vector<StateVector>& vectors,
                       double tol = kTol);

/// Orthonormal basis of the orthogonal complement; dimensions add up to
/// parent_dim and every returned column is orthogonal to the input basis.
Subspace complement(const Subspace& sub);

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with the
/// R diagonal's phases absorbed into Q. Deterministic for a fixed seed.
UnitaryOperator random_unitary(Index dim, std::uint64_t seed);

// --- Small constructors and diagnostics ------------------------------------

/// Computational basis state |index> over the given factorization.
StateVector basis_state(std::vector<Index> dims, Index index);

/// (|0> + |1>)^n / sqrt(2^n): every amplitude equal, one factor per qubit.
StateVector plus_state(int n_qubits);

/// Haar-random pure state (normalized complex Gaussian vector).
StateVector random_state(std::vector<Index> dims, std::uint64_t seed);

/// |psi><psi| with psi's factorization.
DensityMatrix pure_density(const StateVector& psi);

/// I/dim over the given factorization.
DensityMatrix maximally_mixed(std::vector<Index> dims);

/// Eigenvalues of a Hermitian-symmetrized matrix, descending.
RealVector eigenvalues_descending(const Matrix& m);

/// (1/2) * trace norm of (a - b).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// max |(a - b)_ij|.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// True when max |(U^dagger U - I)_ij| <= tol.
bool is_unitary(const Matrix& m, double tol = kTol);

}  // namespace evlab::qlin
