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
#include <set>
#include <string>
#include <vector>

#include "evlab/engine.hpp"
#include "evlab/qlin.hpp"

namespace evlab::distinguish {

/// Orthonormal measurement basis; column k is outcome k, labels[k] names it.
struct MeasurementBasis {
  qlin::Matrix vectors;
  std::vector<std::string> labels;

  MeasurementBasis(qlin::Matrix v, std::vector<std::string> l);

  qlin::Index dim() const { return vectors.rows(); }
};

enum class Decision { collapse_rejected, collapse_not_rejected };

std::string to_string(Decision d);
Decision decision_from_string(const std::string& s);

/// One-sided binomial test of "the state is fully mixed" against "the state
/// has no weight on the perp outcomes".
struct TestResult {
  std::int64_t n_samples = 0;
  std::int64_t perp_hits = 0;
  double p_value_under_copenhagen = 1.0;
  double alpha = 0.0;
  Decision decision = Decision::collapse_not_rejected;

  bool operator==(const TestResult&) const = default;
};

/// Exact lower binomial tail P(X <= hits) for X ~ Binomial(n, p). Terms are
/// accumulated from the distribution's mode so the result stays accurate
/// down to the underflow threshold (beyond which it is 0).
double binomial_lower_tail(std::int64_t n, double p, std::int64_t hits);

/// i.i.d. samples of outcome indices with P(k) = <b_k|rho|b_k>.
/// Probabilities below 1e-12 are clipped to zero (true zeros are
/// theorem-enforced; anything smaller is floating-point dust), then the
/// distribution is renormalized. A total deviating from 1 by more than 1e-6
/// signals a corrupted state and throws invariant_error.
std::vector<int> sample_outcomes(const qlin::DensityMatrix& rho,
                                 const MeasurementBasis& basis,
                                 std::int64_t n, std::uint64_t seed);

/// Basis separating in-subspace outcomes from perp outcomes: the subspace
/// basis columns (labeled "in-F_S[k]") followed by its complement (labeled
/// "perp[k]").
MeasurementBasis find_distinguishing_basis(const qlin::DensityMatrix& rho,
                                           const qlin::Subspace& fs);

/// Without a candidate subspace: the eigenbasis of rho, ordered by
/// descending eigenvalue (equivalently of rho - I/dim, which shifts the
/// spectrum), labeled "eig[k]".
MeasurementBasis find_distinguishing_basis(const qlin::DensityMatrix& rho);

/// Counts samples landing on perp-labeled outcomes and computes the exact
/// one-sided p-value P(Binomial(n, |perp|/dim) <= hits). Few hits are
/// evidence against collapse, which predicts the fully mixed state.
TestResult perp_hit_test(const std::vector<int>& samples,
                         const MeasurementBasis& basis,
                         const std::set<std::string>& perp_labels,
                         double alpha);

/// Both theories run through the same interaction, basis, and sampler.
struct DiscriminationResult {
  engine::RunReport everett_report;
  engine::RunReport copenhagen_report;
  TestResult everett_test;
  TestResult copenhagen_test;
  MeasurementBasis basis;
  std::vector<int> everett_samples;
  std::vector<int> copenhagen_samples;
  int fs_dim = 0;
  bool bound_vacuous = false;
  // True when the no-collapse run rejects and the collapse run does not.
  bool discriminating = false;
};

/// End-to-end comparison: build the interaction, derive the measurement
/// basis from F_S, sample n outcomes per theory (seeds derived from `seed`),
/// and run the perp-hit test on both. When F_S spans the whole stream space
/// there is no perp outcome to count; both tests then degenerate to
/// p-value 1 and the pair cannot discriminate.
DiscriminationResult theory_discrimination(const engine::Scenario& sc,
                                           std::int64_t n, double alpha,
                                           std::uint64_t seed);

}  // namespace evlab::distinguish
