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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "evlab/observer.hpp"
#include "evlab/qlin.hpp"

namespace evlab::engine {

enum class Theory { everett, copenhagen };

std::string to_string(Theory t);
Theory theory_from_string(const std::string& s);

/// Thrown when a requested joint dimension 2^N * D exceeds the dense-matrix
/// budget (default 4096, overridable via EVERETT_LAB_MAX_DIM).
class size_guard_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximum allowed joint dimension 2^N * D. Reads EVERETT_LAB_MAX_DIM on
/// every call, so the override can be set per process.
qlin::Index max_joint_dim();

/// Experiment configuration: m streams of N qubits, each qubit prepared in
/// (|0> + |1>)/sqrt(2), measured one stream at a time by the observer.
struct Scenario {
  int stream_qubits = 3;  // N
  int streams = 1;        // m
  observer::ObserverSpec observer;
  Theory theory = Theory::everett;
  std::uint64_t seed = 0;

  qlin::Index stream_dim() const { return qlin::Index{1} << stream_qubits; }

  /// True when 2^N <= D^2, i.e. the support bound cannot separate the two
  /// theories. Recorded as a flag, never asserted.
  bool bound_vacuous() const {
    return stream_dim() <= observer.dim * observer.dim;
  }
};

/// Diagnostics for one run: the shuffled-average stream state rho_S =
/// (rho_1 + ... + rho_m)/m and its spectrum, rank, and distance from the
/// fully mixed state.
struct RunReport {
  qlin::DensityMatrix rho_S;
  std::vector<int> per_stream_ranks;
  int rank_rho_S = 0;
  int fs_dim = 0;
  qlin::RealVector eigenvalues;  // descending
  double trace_distance_to_mixed = 0.0;
  Theory theory = Theory::everett;
  qlin::Index observer_dim = 1;
  bool bound_vacuous = false;
  // Copenhagen only: the m*N seeded collapse outcomes, stream-major.
  std::vector<int> collapse_bits;
};

/// Support certificate for rho_S against a candidate stream subspace.
struct Certification {
  double max_perp_expectation = 0.0;  // max over complement basis of <chi|rho|chi>
  int rank_rho_S = 0;
  int fs_dim = 0;
  qlin::Index observer_dim_sq = 1;
  bool bound_holds = false;     // rank <= fs_dim <= D^2
  bool supported_in_fs = false; // max_perp_expectation < kTol
};

/// Per-stream reduced states under unitary (no-collapse) evolution, computed
/// by the sequential recurrence: the observer marginal threads from stream
/// to stream while each joint interaction lives on 2^N * D dimensions only.
std::vector<qlin::DensityMatrix> everett_stream_states(
    const observer::InteractionUnitary& u, const Scenario& sc);

/// No-collapse run. Returns rho_S with diagnostics; throws invariant_error
/// if the computed rank exceeds D^2 (that would be a bug, not a result).
RunReport run_everett(const Scenario& sc);

/// Collapse run: rho_S = I/2^N analytically, plus m*N seeded collapse bits
/// for the empirical path of the distinguisher.
RunReport run_copenhagen(const Scenario& sc);

/// Dispatch on sc.theory.
RunReport run(const Scenario& sc);

/// The stream subspace that supports every no-collapse rho_S for this
/// interaction: for each observer basis state e_i, Schmidt-decompose
/// U[(|+>^N) (x) e_i] across the stream/observer cut and collect the left
/// vectors with nonzero coefficients. Dimension <= D^2.
qlin::Subspace compute_F_S(const observer::InteractionUnitary& u);

/// Certifies that rho_S is (or is not) supported in `fs` and whether the
/// rank <= dim(F_S) <= D^2 chain holds.
Certification certify_support_bound(const RunReport& report,
                                    const qlin::Subspace& fs);

}  // namespace evlab::engine
