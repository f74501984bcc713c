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

#include "evlab/engine.hpp"

#include <cstdlib>
#include <string>

namespace evlab::engine {

using qlin::Complex;
using qlin::DensityMatrix;
using qlin::Index;
using qlin::Matrix;
using qlin::RealVector;

std::string to_string(Theory t) {
  switch (t) {
    case Theory::everett: return "everett";
    case Theory::copenhagen: return "copenhagen";
  }
  throw std::invalid_argument("unknown theory");
}

Theory theory_from_string(const std::string& s) {
  if (s == "everett") return Theory::everett;
  if (s == "copenhagen") return Theory::copenhagen;
  throw std::invalid_argument("unknown theory: \"" + s + "\"");
}

Index max_joint_dim() {
  constexpr Index kDefault = 4096;
  const char* env = std::getenv("EVERETT_LAB_MAX_DIM");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const long long parsed = std::strtoll(env, &end, 10);
  if (end == env || *end != '\0' || parsed < 1) {
    throw std::invalid_argument(
        "EVERETT_LAB_MAX_DIM must be a positive integer, got \"" +
        std::string(env) + "\"");
  }
  return static_cast<Index>(parsed);
}

namespace {

void validate(const Scenario& sc) {
  if (sc.stream_qubits < 1 || sc.stream_qubits > 30) {
    throw std::invalid_argument("scenario: stream_qubits must be in [1, 30]");
  }
  if (sc.streams < 1) {
    throw std::invalid_argument("scenario: streams must be >= 1");
  }
  if (sc.observer.dim < 1) {
    throw std::invalid_argument("scenario: observer dim must be >= 1");
  }
  const Index joint = sc.stream_dim() * sc.observer.dim;
  const Index limit = max_joint_dim();
  if (joint > limit) {
    throw size_guard_error(
        "joint dimension 2^" + std::to_string(sc.stream_qubits) + " * " +
        std::to_string(sc.observer.dim) + " = " + std::to_string(joint) +
        " exceeds the limit " + std::to_string(limit) +
        " (set EVERETT_LAB_MAX_DIM to override)");
  }
}

RealVector uniform_spectrum(Index dim) {
  return RealVector::Constant(dim, 1.0 / double(dim));
}

}  // namespace

std::vector<DensityMatrix> everett_stream_states(
    const observer::InteractionUnitary& u, const Scenario& sc) {
  validate(sc);
  const Index sdim = sc.stream_dim();
  if (u.stream_dim() != sdim || u.observer_dim() != sc.observer.dim) {
    throw std::invalid_argument(
        "everett_stream_states: interaction does not match scenario dims");
  }

  const DensityMatrix stream_input =
      qlin::pure_density(qlin::StateVector(qlin::plus_state(sc.stream_qubits)
                                               .amplitudes,
                                           {sdim}));
  DensityMatrix observer_state = qlin::pure_density(sc.observer.initial_state());

  const Matrix& um = u.u.matrix;
  std::vector<DensityMatrix> per_stream;
  per_stream.reserve(static_cast<std::size_t>(sc.streams));
  for (int i = 0; i < sc.streams; ++i) {
    // Later interactions act on disjoint factors, so rho_i is final once
    // stream i has been traversed.
    const Matrix joint_matrix =
        um * qlin::kron(stream_input.matrix, observer_state.matrix) *
        um.adjoint();
    const DensityMatrix joint(joint_matrix, {sdim, sc.observer.dim});
    per_stream.push_back(qlin::partial_trace(joint, {0}));
    observer_state = qlin::partial_trace(joint, {1});
  }
  return per_stream;
}

RunReport run_everett(const Scenario& sc) {
  if (sc.theory != Theory::everett) {
    throw std::invalid_argument("run_everett: scenario theory mismatch");
  }
  validate(sc);
  const observer::InteractionUnitary u =
      observer::build(sc.observer, sc.stream_qubits);
  const std::vector<DensityMatrix> per_stream = everett_stream_states(u, sc);

  const Index sdim = sc.stream_dim();
  Matrix sum = Matrix::Zero(sdim, sdim);
  std::vector<int> ranks;
  ranks.reserve(per_stream.size());
  for (const DensityMatrix& rho_i : per_stream) {
    sum += rho_i.matrix;
    ranks.push_back(qlin::numerical_rank(rho_i));
  }

  RunReport report{
      DensityMatrix(sum / double(sc.streams), {sdim}),
      std::move(ranks),
      0,
      0,
      RealVector(),
      0.0,
      Theory::everett,
      sc.observer.dim,
      sc.bound_vacuous(),
      {}};
  report.rank_rho_S = qlin::numerical_rank(report.rho_S);
  report.fs_dim = static_cast<int>(compute_F_S(u).dimension());
  report.eigenvalues = qlin::eigenvalues_descending(report.rho_S.matrix);
  report.trace_distance_to_mixed =
      qlin::trace_distance(report.rho_S, qlin::maximally_mixed({sdim}));

  report.rho_S.assert_psd();
  if (report.rank_rho_S > sc.observer.dim * sc.observer.dim) {
    throw qlin::invariant_error(
        "support bound violated: rank " + std::to_string(report.rank_rho_S) +
        " > D^2 = " + std::to_string(sc.observer.dim * sc.observer.dim));
  }
  return report;
}

RunReport run_copenhagen(const Scenario& sc) {
  if (sc.theory != Theory::copenhagen) {
    throw std::invalid_argument("run_copenhagen: scenario theory mismatch");
  }
  validate(sc);
  const Index sdim = sc.stream_dim();

  RunReport report{
      qlin::maximally_mixed({sdim}),
      std::vector<int>(static_cast<std::size_t>(sc.streams),
                       static_cast<int>(sdim)),
      static_cast<int>(sdim),
      0,
      uniform_spectrum(sdim),
      0.0,
      Theory::copenhagen,
      sc.observer.dim,
      sc.bound_vacuous(),
      {}};

  // F_S of the configured interaction, reported for comparison with the
  // no-collapse run of the same scenario.
  report.fs_dim = static_cast<int>(
      compute_F_S(observer::build(sc.observer, sc.stream_qubits)).dimension());

  // Each qubit collapses to |0> or |1> with probability 1/2.
  qlin::Prng prng(sc.seed);
  report.collapse_bits.reserve(
      static_cast<std::size_t>(sc.streams) * sc.stream_qubits);
  for (int i = 0; i < sc.streams * sc.stream_qubits; ++i) {
    report.collapse_bits.push_back(prng.uniform() < 0.5 ? 0 : 1);
  }
  return report;
}

RunReport run(const Scenario& sc) {
  return sc.theory == Theory::everett ? run_everett(sc) : run_copenhagen(sc);
}

qlin::Subspace compute_F_S(const observer::InteractionUnitary& u) {
  const Index sdim = u.stream_dim();
  const Index odim = u.observer_dim();
  const qlin::Vector plus = qlin::plus_state(u.stream_qubits).amplitudes;

  std::vector<qlin::StateVector> left_vectors;
  for (Index i = 0; i < odim; ++i) {
    const qlin::Vector in =
        qlin::kron(plus, qlin::basis_state({odim}, i).amplitudes);
    const qlin::StateVector out(u.u.matrix * in, {sdim, odim});
    const qlin::SchmidtDecomposition sd = qlin::schmidt(out, 1);
    const double largest = sd.coefficients(0);
    for (Index k = 0; k < sd.coefficients.size(); ++k) {
      if (sd.coefficients(k) > qlin::kTol * largest) {
        left_vectors.emplace_back(sd.left_vectors.col(k),
                                  std::vector<Index>{sdim});
      }
    }
  }
  return qlin::span_subspace(left_vectors);
}

Certification certify_support_bound(const RunReport& report,
                                    const qlin::Subspace& fs) {
  if (fs.parent_dim != report.rho_S.dim()) {
    throw std::invalid_argument(
        "certify_support_bound: subspace and rho_S dimensions differ");
  }
  const qlin::Subspace perp = qlin::complement(fs);

  double max_perp = 0.0;
  for (Index k = 0; k < perp.basis.cols(); ++k) {
    const qlin::Vector chi = perp.basis.col(k);
    const double expectation =
        std::real(chi.dot(report.rho_S.matrix * chi));
    if (expectation > max_perp) max_perp = expectation;
  }

  Certification cert;
  cert.max_perp_expectation = max_perp;
  cert.rank_rho_S = report.rank_rho_S;
  cert.fs_dim = static_cast<int>(fs.dimension());
  cert.observer_dim_sq = report.observer_dim * report.observer_dim;
  cert.bound_holds = report.rank_rho_S <= cert.fs_dim &&
                     cert.fs_dim <= cert.observer_dim_sq;
  cert.supported_in_fs = max_perp < qlin::kTol;
  return cert;
}

}  // namespace evlab::engine
