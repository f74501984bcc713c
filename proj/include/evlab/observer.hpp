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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evlab/qlin.hpp"

namespace evlab::observer {

enum class Kind { toy, recording, random };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

/// Configuration of the measuring agent: its Hilbert dimension D, how its
/// interaction unitary is constructed, and its initial state.
struct ObserverSpec {
  Kind kind = Kind::random;
  qlin::Index dim = 2;        // D
  int memory_qubits = 1;      // recording observers have D = 2^memory_qubits
  std::uint64_t seed = 0;     // random observers
  // Empty means the first basis state of H_O.
  qlin::Vector initial_amplitudes;

  /// The observer's initial state as a validated StateVector in H_O.
  qlin::StateVector initial_state() const;
};

ObserverSpec toy_observer();
ObserverSpec recording_observer(int memory_qubits);
ObserverSpec random_observer(qlin::Index dim, std::uint64_t seed);

/// One measurement interaction: a unitary on H_S (x) H_O with the stream
/// factor first. The observer side may itself be factored (e.g. a clock
/// register appended by make_clocked_unitary).
struct InteractionUnitary {
  qlin::UnitaryOperator u;
  int stream_qubits;

  qlin::Index stream_dim() const { return u.factor_dims.front(); }
  qlin::Index observer_dim() const {
    qlin::Index d = 1;
    for (std::size_t f = 1; f < u.factor_dims.size(); ++f) {
      d *= u.factor_dims[f];
    }
    return d;
  }
};

/// The four stream states the toy interaction can emit. In the canonical
/// basis, A_1 and A_3 live on |000>..|011> and A_2 and A_4 on |100>..|111>,
/// with amplitudes +-1/2.
std::array<qlin::StateVector, 4> toy_a_states();

/// An orthonormal set the toy interaction can never populate: B_i =
/// (|0a0> - |0a1> shifted) patterns orthogonal to every A state. A uniform
/// mixture over the canonical basis assigns each of them probability 1/8.
std::array<qlin::StateVector, 4> toy_b_states();

/// Fixed 3-qubit / single-qubit-observer interaction. Its action is pinned
/// on the two product inputs (|+>^3 (x) |psi_0/1>) and completed to a full
/// 16x16 unitary by Gram-Schmidt; `completion_seed` selects the completion
/// candidates (0 = canonical basis order, otherwise random vectors). All
/// experiment inputs lie in the pinned subspace, so the completion never
/// affects stream statistics.
InteractionUnitary make_toy_unitary(std::uint64_t completion_seed = 0);

/// Finite-memory observer: an XOR shift register of `memory_qubits` qubits.
/// Stream qubit k is CNOT-ed into memory slot (k mod memory_qubits), so with
/// memory_qubits >= stream_qubits every stream qubit gets its own slot and
/// the record is perfect.
InteractionUnitary make_recording_observer(int stream_qubits,
                                           int memory_qubits);

/// Replaces a sequence of per-step unitaries with one constant unitary plus
/// a clock register of dimension 2^ceil(log2(m)) appended to the observer:
/// the composite applies us[i] controlled on clock value i, then increments
/// the clock modulo its dimension. Sequences shorter than the clock period
/// are padded with identities. For a single unitary the clock is trivial and
/// the input is returned unchanged.
InteractionUnitary make_clocked_unitary(
    const std::vector<InteractionUnitary>& us);

/// Constructs the interaction unitary for a spec. Deterministic for a fixed
/// (spec, stream_qubits) pair. The toy kind requires stream_qubits = 3 and
/// dim = 2.
InteractionUnitary build(const ObserverSpec& spec, int stream_qubits);

}  // namespace evlab::observer
