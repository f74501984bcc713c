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

#include "evlab/distinguish.hpp"

#include <algorithm>
#include <cmath>

namespace evlab::distinguish {

using qlin::Complex;
using qlin::Index;
using qlin::Matrix;
using qlin::RealVector;
using qlin::Vector;

namespace {
// Probabilities below this are treated as exact zeros before sampling.
constexpr double kClipThreshold = 1e-12;
}  // namespace

MeasurementBasis::MeasurementBasis(Matrix v, std::vector<std::string> l)
    : vectors(std::move(v)), labels(std::move(l)) {
  if (vectors.rows() != vectors.cols()) {
    throw std::invalid_argument(
        "MeasurementBasis: need one basis vector per dimension");
  }
  if (static_cast<Index>(labels.size()) != vectors.cols()) {
    throw std::invalid_argument("MeasurementBasis: one label per vector");
  }
  if (!qlin::is_unitary(vectors)) {
    throw std::invalid_argument("MeasurementBasis: columns not orthonormal");
  }
}

std::string to_string(Decision d) {
  return d == Decision::collapse_rejected ? "collapse_rejected"
                                          : "collapse_not_rejected";
}

Decision decision_from_string(const std::string& s) {
  if (s == "collapse_rejected") return Decision::collapse_rejected;
  if (s == "collapse_not_rejected") return Decision::collapse_not_rejected;
  throw std::invalid_argument("unknown decision: \"" + s + "\"");
}

double binomial_lower_tail(std::int64_t n, double p, std::int64_t hits) {
  if (n < 1) throw std::invalid_argument("binomial_lower_tail: n must be >= 1");
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("binomial_lower_tail: p must be in [0, 1]");
  }
  if (hits < 0) return 0.0;
  if (hits >= n) return 1.0;
  if (p == 0.0) return 1.0;            // X = 0 almost surely
  if (p == 1.0) return 0.0;            // X = n almost surely, hits < n here

  // Anchor at the term mode: its mass is >= 1/(n+1), so it never underflows
  // and the outward recurrences only ever shrink toward the true tails.
  const std::int64_t mode =
      std::min<std::int64_t>(static_cast<std::int64_t>((n + 1) * p), n);
  const std::int64_t anchor = std::min(hits, mode);
  const double log_anchor = std::lgamma(double(n + 1)) -
                            std::lgamma(double(anchor + 1)) -
                            std::lgamma(double(n - anchor + 1)) +
                            double(anchor) * std::log(p) +
                            double(n - anchor) * std::log1p(-p);
  const double odds = p / (1.0 - p);

  double sum = std::exp(log_anchor);
  double term = sum;
  for (std::int64_t k = anchor; k >= 1; --k) {
    term *= double(k) / (double(n - k + 1) * odds);
    sum += term;
    if (term == 0.0) break;
  }
  if (hits > anchor) {
    term = std::exp(log_anchor);
    for (std::int64_t k = anchor; k < hits; ++k) {
      term *= double(n - k) / double(k + 1) * odds;
      sum += term;
    }
  }
  return std::min(sum, 1.0);
}

std::vector<int> sample_outcomes(const qlin::DensityMatrix& rho,
                                 const MeasurementBasis& basis,
                                 std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_outcomes: n must be >= 1");
  if (basis.dim() != rho.dim()) {
    throw std::invalid_argument("sample_outcomes: dimension mismatch");
  }
  const Index dim = basis.dim();

  RealVector probs(dim);
  for (Index k = 0; k < dim; ++k) {
    const Vector b = basis.vectors.col(k);
    probs(k) = std::max(0.0, std::real(b.dot(rho.matrix * b)));
  }
  const double total = probs.sum();
  if (std::abs(total - 1.0) > 1e-6) {
    throw qlin::invariant_error(
        "sample_outcomes: outcome probabilities sum to " +
        std::to_string(total));
  }
  for (Index k = 0; k < dim; ++k) {
    if (probs(k) < kClipThreshold) probs(k) = 0.0;
  }
  probs /= probs.sum();

  RealVector cumulative(dim);
  double acc = 0.0;
  for (Index k = 0; k < dim; ++k) {
    acc += probs(k);
    cumulative(k) = acc;
  }
  // Saturate from the last nonzero outcome on, so clipped outcomes stay
  // unreachable and rounding in the running sum cannot leak past 1.
  Index last_nonzero = dim - 1;
  while (last_nonzero > 0 && probs(last_nonzero) == 0.0) --last_nonzero;
  for (Index k = last_nonzero; k < dim; ++k) cumulative(k) = 1.0;

  qlin::Prng prng(seed);
  std::vector<int> samples;
  samples.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = prng.uniform();
    const double* begin = cumulative.data();
    const double* pos = std::upper_bound(begin, begin + dim, u);
    samples.push_back(static_cast<int>(pos - begin));
  }
  return samples;
}

MeasurementBasis find_distinguishing_basis(const qlin::DensityMatrix& rho,
                                           const qlin::Subspace& fs) {
  if (fs.parent_dim != rho.dim()) {
    throw std::invalid_argument(
        "find_distinguishing_basis: subspace dimension mismatch");
  }
  const qlin::Subspace perp = qlin::complement(fs);
  Matrix vectors(rho.dim(), rho.dim());
  vectors.leftCols(fs.dimension()) = fs.basis;
  vectors.rightCols(perp.dimension()) = perp.basis;

  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(rho.dim()));
  for (Index k = 0; k < fs.dimension(); ++k) {
    labels.push_back("in-F_S[" + std::to_string(k) + "]");
  }
  for (Index k = 0; k < perp.dimension(); ++k) {
    labels.push_back("perp[" + std::to_string(k) + "]");
  }
  return MeasurementBasis(std::move(vectors), std::move(labels));
}

MeasurementBasis find_distinguishing_basis(const qlin::DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix);
  // Descending eigenvalues put the strongest deviation from uniform first.
  Matrix vectors = es.eigenvectors().rowwise().reverse();
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(rho.dim()));
  for (Index k = 0; k < rho.dim(); ++k) {
    labels.push_back("eig[" + std::to_string(k) + "]");
  }
  return MeasurementBasis(std::move(vectors), std::move(labels));
}

TestResult perp_hit_test(const std::vector<int>& samples,
                         const MeasurementBasis& basis,
                         const std::set<std::string>& perp_labels,
                         double alpha) {
  if (samples.empty()) {
    throw std::invalid_argument("perp_hit_test: no samples");
  }
  if (perp_labels.empty()) {
    throw std::invalid_argument("perp_hit_test: empty perp label set");
  }
  if (alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("perp_hit_test: alpha must be in (0, 1)");
  }

  std::vector<bool> is_perp(basis.labels.size(), false);
  Index perp_count = 0;
  std::set<std::string> seen;
  for (std::size_t k = 0; k < basis.labels.size(); ++k) {
    if (perp_labels.count(basis.labels[k]) != 0) {
      is_perp[k] = true;
      ++perp_count;
      seen.insert(basis.labels[k]);
    }
  }
  if (seen.size() != perp_labels.size()) {
    throw std::invalid_argument(
        "perp_hit_test: perp label not present in basis");
  }

  std::int64_t hits = 0;
  for (int s : samples) {
    if (s < 0 || s >= static_cast<int>(basis.labels.size())) {
      throw std::invalid_argument("perp_hit_test: sample index out of range");
    }
    if (is_perp[static_cast<std::size_t>(s)]) ++hits;
  }

  const double p0 = double(perp_count) / double(basis.dim());
  TestResult result;
  result.n_samples = static_cast<std::int64_t>(samples.size());
  result.perp_hits = hits;
  result.p_value_under_copenhagen =
      binomial_lower_tail(result.n_samples, p0, hits);
  result.alpha = alpha;
  result.decision = result.p_value_under_copenhagen < alpha
                        ? Decision::collapse_rejected
                        : Decision::collapse_not_rejected;
  return result;
}

DiscriminationResult theory_discrimination(const engine::Scenario& sc,
                                           std::int64_t n, double alpha,
                                           std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("theory_discrimination: n must be >= 1");
  }
  const observer::InteractionUnitary u =
      observer::build(sc.observer, sc.stream_qubits);
  const qlin::Subspace fs = engine::compute_F_S(u);

  engine::Scenario everett_sc = sc;
  everett_sc.theory = engine::Theory::everett;
  engine::Scenario copenhagen_sc = sc;
  copenhagen_sc.theory = engine::Theory::copenhagen;

  engine::RunReport everett_report = engine::run_everett(everett_sc);
  engine::RunReport copenhagen_report = engine::run_copenhagen(copenhagen_sc);

  MeasurementBasis basis =
      find_distinguishing_basis(everett_report.rho_S, fs);
  std::set<std::string> perp_labels;
  for (const std::string& label : basis.labels) {
    if (label.rfind("perp", 0) == 0) perp_labels.insert(label);
  }

  std::vector<int> everett_samples = sample_outcomes(
      everett_report.rho_S, basis, n, qlin::derive_seed(seed, 0));
  std::vector<int> copenhagen_samples = sample_outcomes(
      copenhagen_report.rho_S, basis, n, qlin::derive_seed(seed, 1));

  TestResult everett_test;
  TestResult copenhagen_test;
  if (!perp_labels.empty()) {
    everett_test = perp_hit_test(everett_samples, basis, perp_labels, alpha);
    copenhagen_test =
        perp_hit_test(copenhagen_samples, basis, perp_labels, alpha);
  } else {
    // F_S fills the whole stream space: nothing to count, nothing to reject.
    everett_test.n_samples = n;
    everett_test.alpha = alpha;
    copenhagen_test.n_samples = n;
    copenhagen_test.alpha = alpha;
  }

  DiscriminationResult result{std::move(everett_report),
                              std::move(copenhagen_report),
                              everett_test,
                              copenhagen_test,
                              std::move(basis),
                              std::move(everett_samples),
                              std::move(copenhagen_samples),
                              static_cast<int>(fs.dimension()),
                              sc.bound_vacuous(),
                              false};
  result.discriminating =
      result.everett_test.decision == Decision::collapse_rejected &&
      result.copenhagen_test.decision == Decision::collapse_not_rejected;
  return result;
}

}  // namespace evlab::distinguish
