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

#include "evlab/qlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace evlab::qlin {

namespace {

Index product(const std::vector<Index>& dims) {
  Index p = 1;
  for (Index d : dims) {
    if (d < 1) throw std::invalid_argument("factor dimensions must be >= 1");
    p *= d;
  }
  return p;
}

std::vector<Index> concat(const std::vector<Index>& a,
                          const std::vector<Index>& b) {
  std::vector<Index> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Flat-index offsets of a factor subset: entry t is the contribution of the
// t-th multi-index over `dims` (row-major) to the full flat index, using the
// strides of the parent factorization.
std::vector<Index> subset_offsets(const std::vector<Index>& parent_dims,
                                  const std::vector<int>& factors) {
  std::vector<Index> strides(parent_dims.size(), 1);
  for (int f = static_cast<int>(parent_dims.size()) - 2; f >= 0; --f) {
    strides[f] = strides[f + 1] * parent_dims[f + 1];
  }
  Index count = 1;
  for (int f : factors) count *= parent_dims[f];

  std::vector<Index> offsets(count, 0);
  Index repeat = count;
  for (int f : factors) {
    const Index d = parent_dims[f];
    repeat /= d;
    // digit for factor f cycles with period `repeat`, `count/(d*repeat)`
    // times.
    Index pos = 0;
    while (pos < count) {
      for (Index digit = 0; digit < d; ++digit) {
        for (Index r = 0; r < repeat; ++r) {
          offsets[pos++] += digit * strides[f];
        }
      }
    }
  }
  return offsets;
}

}  // namespace

double Prng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

StateVector::StateVector(Vector amps, std::vector<Index> dims)
    : amplitudes(std::move(amps)), factor_dims(std::move(dims)) {
  if (product(factor_dims) != amplitudes.size()) {
    throw std::invalid_argument(
        "StateVector: product of factor dims must equal amplitude count");
  }
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > kTol) {
    throw std::invalid_argument("StateVector: not normalized (|psi|^2 = " +
                                std::to_string(norm2) + ")");
  }
}

DensityMatrix::DensityMatrix(Matrix m, std::vector<Index> dims)
    : matrix(std::move(m)), factor_dims(std::move(dims)) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("DensityMatrix: matrix must be square");
  }
  if (product(factor_dims) != matrix.rows()) {
    throw std::invalid_argument(
        "DensityMatrix: product of factor dims must equal matrix dimension");
  }
  if (max_abs_diff(matrix, matrix.adjoint()) > kTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  const Complex tr = matrix.trace();
  if (std::abs(tr - 1.0) > kTol) {
    throw std::invalid_argument("DensityMatrix: trace must be 1, got " +
                                std::to_string(tr.real()));
  }
}

void DensityMatrix::assert_psd(double tol) const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix,
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) {
    throw invariant_error("DensityMatrix: negative eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()));
  }
}

UnitaryOperator::UnitaryOperator(Matrix m, std::vector<Index> dims)
    : matrix(std::move(m)), factor_dims(std::move(dims)) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("UnitaryOperator: matrix must be square");
  }
  if (product(factor_dims) != matrix.rows()) {
    throw std::invalid_argument(
        "UnitaryOperator: product of factor dims must equal matrix dimension");
  }
  if (!is_unitary(matrix)) {
    throw std::invalid_argument("UnitaryOperator: U^dagger U != I");
  }
}

Subspace::Subspace(Matrix b, Index parent) : basis(std::move(b)), parent_dim(parent) {
  if (basis.rows() != parent_dim) {
    throw std::invalid_argument("Subspace: basis rows must equal parent_dim");
  }
  if (basis.cols() > parent_dim) {
    throw std::invalid_argument("Subspace: more basis vectors than parent_dim");
  }
  if (basis.cols() > 0) {
    const Matrix gram = basis.adjoint() * basis;
    if (max_abs_diff(gram, Matrix::Identity(basis.cols(), basis.cols())) >
        kTol) {
      throw std::invalid_argument("Subspace: columns not orthonormal");
    }
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

StateVector kron(const StateVector& a, const StateVector& b) {
  return StateVector(kron(a.amplitudes, b.amplitudes),
                     concat(a.factor_dims, b.factor_dims));
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix, b.matrix),
                       concat(a.factor_dims, b.factor_dims));
}

UnitaryOperator kron(const UnitaryOperator& a, const UnitaryOperator& b) {
  return UnitaryOperator(kron(a.matrix, b.matrix),
                         concat(a.factor_dims, b.factor_dims));
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& keep) {
  const auto& dims = rho.factor_dims;
  const int n_factors = static_cast<int>(dims.size());
  if (keep.empty()) {
    throw std::invalid_argument("partial_trace: keep set must be non-empty");
  }
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw std::invalid_argument("partial_trace: duplicate factor index");
  }
  if (kept.front() < 0 || kept.back() >= n_factors) {
    throw std::invalid_argument("partial_trace: factor index out of range");
  }

  std::vector<int> traced;
  for (int f = 0; f < n_factors; ++f) {
    if (!std::binary_search(kept.begin(), kept.end(), f)) traced.push_back(f);
  }

  const std::vector<Index> kept_offsets = subset_offsets(dims, kept);
  const std::vector<Index> traced_offsets = subset_offsets(dims, traced);
  const Index dim_keep = static_cast<Index>(kept_offsets.size());

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  for (Index r = 0; r < dim_keep; ++r) {
    for (Index c = 0; c < dim_keep; ++c) {
      Complex sum = 0.0;
      for (Index t : traced_offsets) {
        sum += rho.matrix(kept_offsets[r] + t, kept_offsets[c] + t);
      }
      out(r, c) = sum;
    }
  }

  std::vector<Index> out_dims;
  for (int f : kept) out_dims.push_back(dims[f]);
  return DensityMatrix(std::move(out), std::move(out_dims));
}

SchmidtDecomposition schmidt(const StateVector& psi, int left_factors) {
  const int n_factors = static_cast<int>(psi.factor_dims.size());
  if (left_factors < 1 || left_factors >= n_factors) {
    throw std::invalid_argument(
        "schmidt: cut must leave at least one factor on each side");
  }
  Index dim_left = 1, dim_right = 1;
  for (int f = 0; f < n_factors; ++f) {
    (f < left_factors ? dim_left : dim_right) *= psi.factor_dims[f];
  }

  // amplitude(a, b) = amplitudes[a * dim_right + b]
  using RowMajor =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> amp(psi.amplitudes.data(), dim_left, dim_right);
  Eigen::JacobiSVD<Matrix> svd(Matrix(amp),
                               Eigen::ComputeThinU | Eigen::ComputeThinV);

  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left_vectors = svd.matrixU();
  // amp = U S V^dagger, so the right Schmidt vectors are conj(V) columns.
  out.right_vectors = svd.matrixV().conjugate();
  return out;
}

int numerical_rank(const DensityMatrix& rho, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("numerical_rank: tol must be > 0");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix,
                                           Eigen::EigenvaluesOnly);
  const RealVector& lambda = es.eigenvalues();  // ascending
  const double largest = lambda(lambda.size() - 1);
  if (largest <= 0.0) return 0;
  int rank = 0;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > tol * largest) ++rank;
  }
  return rank;
}

Subspace span_subspace(const std::vector<StateVector>& vectors, double tol) {
  if (vectors.empty()) {
    throw std::invalid_argument("span_subspace: empty input");
  }
  const Index parent = vectors.front().dim();
  Matrix stacked(parent, static_cast<Index>(vectors.size()));
  for (Index k = 0; k < stacked.cols(); ++k) {
    if (vectors[k].dim() != parent) {
      throw std::invalid_argument("span_subspace: mixed parent dimensions");
    }
    stacked.col(k) = vectors[k].amplitudes;
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * sv(0)) ++rank;
  }
  return Subspace(svd.matrixU().leftCols(rank), parent);
}

Subspace complement(const Subspace& sub) {
  const Index n = sub.parent_dim;
  const Index k = sub.basis.cols();
  if (k == 0) return Subspace(Matrix::Identity(n, n), n);
  // Columns are orthonormal, so every singular value is 1 and the rank is k;
  // the trailing full-U columns span the complement.
  Eigen::JacobiSVD<Matrix> svd(sub.basis, Eigen::ComputeFullU);
  return Subspace(svd.matrixU().rightCols(n - k), n);
}

UnitaryOperator random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_unitary: dim must be >= 1");
  Prng prng(seed);
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      g(i, j) = Complex(prng.gaussian(), prng.gaussian()) * M_SQRT1_2;
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Vector r_diag = qr.matrixQR().diagonal();
  // Fixing the R diagonal's phases makes the distribution Haar.
  for (Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r_diag(j));
    if (mag > 0.0) q.col(j) *= r_diag(j) / mag;
  }
  return UnitaryOperator(std::move(q), {dim});
}

StateVector basis_state(std::vector<Index> dims, Index index) {
  const Index n = product(dims);
  if (index < 0 || index >= n) {
    throw std::invalid_argument("basis_state: index out of range");
  }
  Vector amps = Vector::Zero(n);
  amps(index) = 1.0;
  return StateVector(std::move(amps), std::move(dims));
}

StateVector plus_state(int n_qubits) {
  if (n_qubits < 1) {
    throw std::invalid_argument("plus_state: need at least one qubit");
  }
  const Index n = Index{1} << n_qubits;
  Vector amps = Vector::Constant(n, Complex(1.0 / std::sqrt(double(n)), 0.0));
  return StateVector(std::move(amps), std::vector<Index>(n_qubits, 2));
}

StateVector random_state(std::vector<Index> dims, std::uint64_t seed) {
  Prng prng(seed);
  const Index n = product(dims);
  Vector amps(n);
  for (Index i = 0; i < n; ++i) {
    amps(i) = Complex(prng.gaussian(), prng.gaussian());
  }
  amps /= amps.norm();
  return StateVector(std::move(amps), std::move(dims));
}

DensityMatrix pure_density(const StateVector& psi) {
  return DensityMatrix(psi.amplitudes * psi.amplitudes.adjoint(),
                       psi.factor_dims);
}

DensityMatrix maximally_mixed(std::vector<Index> dims) {
  const Index n = product(dims);
  return DensityMatrix(Matrix::Identity(n, n) / double(n), std::move(dims));
}

RealVector eigenvalues_descending(const Matrix& m) {
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  const RealVector lambda = eigenvalues_descending(a.matrix - b.matrix);
  return 0.5 * lambda.cwiseAbs().sum();
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_diff(m.adjoint() * m, Matrix::Identity(m.rows(), m.cols())) <=
         tol;
}

}  // namespace evlab::qlin
