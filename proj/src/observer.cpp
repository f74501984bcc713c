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

#include "evlab/observer.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace evlab::observer {

using qlin::Complex;
using qlin::Index;
using qlin::Matrix;
using qlin::Vector;

std::string to_string(Kind k) {
  switch (k) {
    case Kind::toy: return "toy";
    case Kind::recording: return "recording";
    case Kind::random: return "random";
  }
  throw std::invalid_argument("unknown observer kind");
}

Kind kind_from_string(const std::string& s) {
  if (s == "toy") return Kind::toy;
  if (s == "recording") return Kind::recording;
  if (s == "random") return Kind::random;
  throw std::invalid_argument("unknown observer kind: \"" + s + "\"");
}

qlin::StateVector ObserverSpec::initial_state() const {
  if (initial_amplitudes.size() == 0) {
    return qlin::basis_state({dim}, 0);
  }
  return qlin::StateVector(initial_amplitudes, {dim});
}

ObserverSpec toy_observer() {
  ObserverSpec spec;
  spec.kind = Kind::toy;
  spec.dim = 2;
  spec.memory_qubits = 1;
  return spec;
}

ObserverSpec recording_observer(int memory_qubits) {
  if (memory_qubits < 1) {
    throw std::invalid_argument("recording observer needs memory_qubits >= 1");
  }
  ObserverSpec spec;
  spec.kind = Kind::recording;
  spec.memory_qubits = memory_qubits;
  spec.dim = Index{1} << memory_qubits;
  return spec;
}

ObserverSpec random_observer(qlin::Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("observer dim must be >= 1");
  ObserverSpec spec;
  spec.kind = Kind::random;
  spec.dim = dim;
  spec.seed = seed;
  return spec;
}

namespace {

// Signs of the four A states on their four canonical support slots
// (|000>..|011> for A_1/A_3, |100>..|111> for A_2/A_4).
qlin::StateVector toy_a_state(int i) {
  Vector amps = Vector::Zero(8);
  const Index base = (i == 1 || i == 3) ? 4 : 0;   // A_2, A_4 on the upper half
  const double sign_step = (i >= 2) ? -1.0 : 1.0;  // A_3, A_4 alternate signs
  double sign = 1.0;
  for (Index k = 0; k < 4; ++k) {
    amps(base + k) = 0.5 * sign;
    sign *= sign_step;
  }
  return qlin::StateVector(std::move(amps), {2, 2, 2});
}

qlin::StateVector toy_b_state(int i) {
  // B states: (|a0c> - |a1c>)/sqrt(2) for the four (a, c) combinations.
  const Index a = (i >= 2) ? 1 : 0;
  const Index c = (i % 2 == 1) ? 1 : 0;
  Vector amps = Vector::Zero(8);
  amps(a * 4 + 0 + c) = M_SQRT1_2;
  amps(a * 4 + 2 + c) = -M_SQRT1_2;
  return qlin::StateVector(std::move(amps), {2, 2, 2});
}

// Extends `columns` (already orthonormal) to a full orthonormal basis by
// Gram-Schmidt over candidate vectors; candidates with negligible residual
// are skipped.
Matrix complete_basis(std::vector<Vector> columns, Index dim,
                      std::uint64_t candidate_seed) {
  qlin::Prng prng(candidate_seed);
  Index candidate_index = 0;
  while (static_cast<Index>(columns.size()) < dim) {
    Vector candidate(dim);
    if (candidate_seed == 0) {
      if (candidate_index >= dim) {
        throw qlin::invariant_error("basis completion ran out of candidates");
      }
      candidate = Vector::Zero(dim);
      candidate(candidate_index++) = 1.0;
    } else {
      for (Index k = 0; k < dim; ++k) {
        candidate(k) = Complex(prng.gaussian(), prng.gaussian());
      }
    }
    // Two projection passes keep the columns orthogonal to working
    // precision even when a candidate is nearly inside the current span.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& c : columns) {
        candidate -= c.dot(candidate) * c;
      }
    }
    const double norm = candidate.norm();
    if (norm > 1e-8) {
      columns.push_back(candidate / norm);
    }
  }
  Matrix out(dim, dim);
  for (Index k = 0; k < dim; ++k) out.col(k) = columns[k];
  return out;
}

}  // namespace

std::array<qlin::StateVector, 4> toy_a_states() {
  return {toy_a_state(0), toy_a_state(1), toy_a_state(2), toy_a_state(3)};
}

std::array<qlin::StateVector, 4> toy_b_states() {
  return {toy_b_state(0), toy_b_state(1), toy_b_state(2), toy_b_state(3)};
}

InteractionUnitary make_toy_unitary(std::uint64_t completion_seed) {
  const Index dim = 16;
  const Vector plus3 = qlin::plus_state(3).amplitudes;
  const Vector psi0 = qlin::basis_state({2}, 0).amplitudes;
  const Vector psi1 = qlin::basis_state({2}, 1).amplitudes;
  const auto a = toy_a_states();

  const std::vector<Vector> ins = {qlin::kron(plus3, psi0),
                                   qlin::kron(plus3, psi1)};
  const std::vector<Vector> outs = {
      M_SQRT1_2 * (qlin::kron(a[0].amplitudes, psi0) +
                   qlin::kron(a[1].amplitudes, psi1)),
      M_SQRT1_2 * (qlin::kron(a[2].amplitudes, psi0) +
                   qlin::kron(a[3].amplitudes, psi1))};

  const Matrix in_basis = complete_basis(ins, dim, completion_seed);
  const Matrix out_basis = complete_basis(outs, dim, completion_seed);
  Matrix u = out_basis * in_basis.adjoint();
  return InteractionUnitary{qlin::UnitaryOperator(std::move(u), {8, 2}), 3};
}

InteractionUnitary make_recording_observer(int stream_qubits,
                                           int memory_qubits) {
  if (stream_qubits < 1 || memory_qubits < 1) {
    throw std::invalid_argument(
        "recording observer needs stream_qubits >= 1 and memory_qubits >= 1");
  }
  if (stream_qubits + memory_qubits > 30) {
    throw std::invalid_argument("recording observer: register too large");
  }
  const Index sdim = Index{1} << stream_qubits;
  const Index mdim = Index{1} << memory_qubits;
  const Index dim = sdim * mdim;

  // Ordered product of CNOTs, one per stream qubit, composed as an index
  // permutation: qubit k (k = 0 is the leftmost / most significant bit)
  // XORs into memory slot k mod memory_qubits.
  std::vector<Index> image(dim);
  for (Index s = 0; s < sdim; ++s) {
    Index folded = 0;
    for (int k = 0; k < stream_qubits; ++k) {
      const Index bit = (s >> (stream_qubits - 1 - k)) & 1;
      const int slot = k % memory_qubits;
      folded ^= bit << (memory_qubits - 1 - slot);
    }
    for (Index m = 0; m < mdim; ++m) {
      image[s * mdim + m] = s * mdim + (m ^ folded);
    }
  }

  Matrix u = Matrix::Zero(dim, dim);
  for (Index col = 0; col < dim; ++col) u(image[col], col) = 1.0;
  return InteractionUnitary{qlin::UnitaryOperator(std::move(u), {sdim, mdim}),
                            stream_qubits};
}

InteractionUnitary make_clocked_unitary(
    const std::vector<InteractionUnitary>& us) {
  if (us.empty()) {
    throw std::invalid_argument("make_clocked_unitary: need at least one step");
  }
  const auto& dims = us.front().u.factor_dims;
  for (const auto& step : us) {
    if (step.u.factor_dims != dims ||
        step.stream_qubits != us.front().stream_qubits) {
      throw std::invalid_argument(
          "make_clocked_unitary: mismatched step dimensions");
    }
  }
  if (us.size() == 1) return us.front();

  const Index clock_dim =
      static_cast<Index>(std::bit_ceil(us.size()));
  const Index base_dim = us.front().u.dim();
  const Index dim = base_dim * clock_dim;

  // W maps (x, c) -> (U_c x, c + 1 mod clock_dim); steps beyond the given
  // sequence are identities.
  Matrix w = Matrix::Zero(dim, dim);
  for (Index c = 0; c < clock_dim; ++c) {
    const Index next = (c + 1) % clock_dim;
    if (c < static_cast<Index>(us.size())) {
      const Matrix& step = us[static_cast<std::size_t>(c)].u.matrix;
      for (Index row = 0; row < base_dim; ++row) {
        for (Index col = 0; col < base_dim; ++col) {
          w(row * clock_dim + next, col * clock_dim + c) = step(row, col);
        }
      }
    } else {
      for (Index x = 0; x < base_dim; ++x) {
        w(x * clock_dim + next, x * clock_dim + c) = 1.0;
      }
    }
  }

  std::vector<Index> out_dims = dims;
  out_dims.push_back(clock_dim);
  return InteractionUnitary{
      qlin::UnitaryOperator(std::move(w), std::move(out_dims)),
      us.front().stream_qubits};
}

InteractionUnitary build(const ObserverSpec& spec, int stream_qubits) {
  if (stream_qubits < 1 || stream_qubits > 30) {
    throw std::invalid_argument("build: stream_qubits must be in [1, 30]");
  }
  if (spec.dim < 1) {
    throw std::invalid_argument("build: observer dim must be >= 1");
  }
  if (spec.kind == Kind::recording &&
      (spec.memory_qubits < 1 || spec.memory_qubits > 30)) {
    throw std::invalid_argument("build: memory_qubits must be in [1, 30]");
  }
  switch (spec.kind) {
    case Kind::toy:
      if (stream_qubits != 3 || spec.dim != 2) {
        throw std::invalid_argument(
            "toy observer requires 3 stream qubits and dim 2");
      }
      return make_toy_unitary();
    case Kind::recording: {
      if ((Index{1} << spec.memory_qubits) != spec.dim) {
        throw std::invalid_argument(
            "recording observer requires dim = 2^memory_qubits");
      }
      return make_recording_observer(stream_qubits, spec.memory_qubits);
    }
    case Kind::random: {
      const Index sdim = Index{1} << stream_qubits;
      qlin::UnitaryOperator u = qlin::random_unitary(sdim * spec.dim, spec.seed);
      return InteractionUnitary{
          qlin::UnitaryOperator(std::move(u.matrix), {sdim, spec.dim}),
          stream_qubits};
    }
  }
  throw std::invalid_argument("unknown observer kind");
}

}  // namespace evlab::observer
