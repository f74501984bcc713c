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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "evlab/distinguish.hpp"
#include "oracles.hpp"

using namespace evlab;
using qlin::Complex;
using qlin::Index;
using qlin::Matrix;
using qlin::Vector;

namespace {

engine::Scenario toy_scenario(int streams) {
  engine::Scenario sc;
  sc.stream_qubits = 3;
  sc.streams = streams;
  sc.observer = observer::toy_observer();
  return sc;
}

distinguish::MeasurementBasis canonical_basis(Index dim) {
  std::vector<std::string> labels;
  for (Index k = 0; k < dim; ++k) labels.push_back("b" + std::to_string(k));
  return distinguish::MeasurementBasis(Matrix::Identity(dim, dim),
                                       std::move(labels));
}

qlin::Subspace toy_fs() {
  std::vector<qlin::StateVector> a_states;
  for (const auto& v : testing::toy_a_oracle()) {
    a_states.emplace_back(v, std::vector<Index>{8});
  }
  return qlin::span_subspace(a_states);
}

}  // namespace

TEST_CASE("binomial_lower_tail: closed cases and the DP oracle") {
  // Frozen case: P(X <= 0) for X ~ Binomial(100, 1/2) is 2^-100.
  CHECK(distinguish::binomial_lower_tail(100, 0.5, 0) ==
        doctest::Approx(std::pow(2.0, -100.0)).epsilon(1e-12));

  CHECK(distinguish::binomial_lower_tail(10, 0.0, 0) == 1.0);
  CHECK(distinguish::binomial_lower_tail(10, 1.0, 9) == 0.0);
  CHECK(distinguish::binomial_lower_tail(10, 1.0, 10) == 1.0);
  CHECK(distinguish::binomial_lower_tail(10, 0.3, 10) == 1.0);
  CHECK(distinguish::binomial_lower_tail(10, 0.3, -1) == 0.0);
  CHECK_THROWS_AS((void)distinguish::binomial_lower_tail(0, 0.5, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)distinguish::binomial_lower_tail(5, 1.5, 0),
                  std::invalid_argument);

  qlin::Prng prng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(prng.next_u64() % 200);
    const double p = 0.02 + 0.96 * prng.uniform();
    const int hits = static_cast<int>(prng.next_u64() % (n + 1));
    const double expected = testing::binomial_tail_dp(n, p, hits);
    const double actual = distinguish::binomial_lower_tail(n, p, hits);
    CHECK(std::abs(actual - expected) <=
          1e-12 + 1e-10 * expected);
  }
}

TEST_CASE("binomial_lower_tail: monotone in the hit count") {
  for (const double p : {0.1, 0.5, 0.9}) {
    double previous = -1.0;
    for (int hits = 0; hits <= 60; ++hits) {
      const double tail = distinguish::binomial_lower_tail(60, p, hits);
      CHECK(tail >= previous);
      previous = tail;
    }
    CHECK(previous == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sample_outcomes: point mass stays put") {
  const auto rho = qlin::pure_density(qlin::basis_state({8}, 0));
  const auto samples = distinguish::sample_outcomes(rho, canonical_basis(8),
                                                    200, 1);
  for (int s : samples) CHECK(s == 0);
}

TEST_CASE("sample_outcomes: uniform state fills a multinomial band") {
  const auto rho = qlin::maximally_mixed({8});
  const auto samples = distinguish::sample_outcomes(rho, canonical_basis(8),
                                                    8000, 2);
  std::map<int, int> counts;
  for (int s : samples) ++counts[s];
  for (Index k = 0; k < 8; ++k) {
    const int c = counts[static_cast<int>(k)];
    CHECK(c > 1000 - 110);  // ~3 sigma for Binomial(8000, 1/8)
    CHECK(c < 1000 + 110);
  }
}

TEST_CASE("sample_outcomes: deterministic per seed") {
  const auto rho = qlin::maximally_mixed({4});
  const auto a = distinguish::sample_outcomes(rho, canonical_basis(4), 100, 9);
  const auto b = distinguish::sample_outcomes(rho, canonical_basis(4), 100, 9);
  const auto c = distinguish::sample_outcomes(rho, canonical_basis(4), 100, 10);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("sample_outcomes: toy stream state never hits a B outcome") {
  const auto report = engine::run_everett(toy_scenario(3));
  const auto basis =
      distinguish::find_distinguishing_basis(report.rho_S, toy_fs());
  const auto samples =
      distinguish::sample_outcomes(report.rho_S, basis, 5000, 3);
  for (int s : samples) {
    CHECK(basis.labels[static_cast<std::size_t>(s)].rfind("in-F_S", 0) == 0);
  }
}

TEST_CASE("sample_outcomes: corrupted states are refused") {
  auto rho = qlin::maximally_mixed({4});
  rho.matrix *= 1.1;  // simulate corruption after construction
  CHECK_THROWS_AS(
      (void)distinguish::sample_outcomes(rho, canonical_basis(4), 10, 0),
      qlin::invariant_error);

  CHECK_THROWS_AS((void)distinguish::sample_outcomes(
                      qlin::maximally_mixed({4}), canonical_basis(4), 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)distinguish::sample_outcomes(
                      qlin::maximally_mixed({8}), canonical_basis(4), 10, 0),
                  std::invalid_argument);
}

TEST_CASE("sampler frequencies converge to the Born probabilities") {
  const auto report = engine::run_everett(toy_scenario(4));
  const auto basis =
      distinguish::find_distinguishing_basis(report.rho_S, toy_fs());
  const Index dim = basis.dim();

  qlin::RealVector p(dim);
  for (Index k = 0; k < dim; ++k) {
    const Vector b = basis.vectors.col(k);
    p(k) = std::max(0.0, std::real(b.dot(report.rho_S.matrix * b)));
    if (p(k) < 1e-12) p(k) = 0.0;
  }

  const std::int64_t n = 100000;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto samples =
        distinguish::sample_outcomes(report.rho_S, basis, n, 600 + trial);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(dim), 0);
    for (int s : samples) ++counts[static_cast<std::size_t>(s)];
    for (Index k = 0; k < dim; ++k) {
      const double freq =
          double(counts[static_cast<std::size_t>(k)]) / double(n);
      const double bound =
          p(k) > 0.0 ? 5.0 * std::sqrt(p(k) * (1.0 - p(k)) / double(n)) : 0.0;
      CHECK(std::abs(freq - p(k)) <= bound);
    }
  }
}

TEST_CASE("find_distinguishing_basis: toy subspace splits A from B") {
  const auto report = engine::run_everett(toy_scenario(2));
  const auto fs = toy_fs();
  const auto basis = distinguish::find_distinguishing_basis(report.rho_S, fs);

  REQUIRE(basis.dim() == 8);
  Matrix perp_proj = Matrix::Zero(8, 8);
  int perp_count = 0;
  for (Index k = 0; k < 8; ++k) {
    if (basis.labels[static_cast<std::size_t>(k)].rfind("perp", 0) == 0) {
      perp_proj += basis.vectors.col(k) * basis.vectors.col(k).adjoint();
      ++perp_count;
    }
  }
  CHECK(perp_count == 4);

  Matrix b_proj = Matrix::Zero(8, 8);
  for (const auto& b : testing::toy_b_oracle()) b_proj += b * b.adjoint();
  CHECK(qlin::max_abs_diff(perp_proj, b_proj) < 1e-10);
}

TEST_CASE("find_distinguishing_basis: eigenbasis fallback") {
  const auto mixed = qlin::maximally_mixed({8});
  const auto flat = distinguish::find_distinguishing_basis(mixed);
  for (Index k = 0; k < 8; ++k) {
    const Vector b = flat.vectors.col(k);
    CHECK(std::real(b.dot(mixed.matrix * b)) ==
          doctest::Approx(0.125).epsilon(1e-12));
    CHECK(flat.labels[static_cast<std::size_t>(k)].rfind("eig", 0) == 0);
  }

  const auto a = testing::toy_a_oracle();
  const qlin::DensityMatrix rho(
      0.5 * (a[0] * a[0].adjoint() + a[1] * a[1].adjoint()), {8});
  const auto basis = distinguish::find_distinguishing_basis(rho);
  const Matrix leading = basis.vectors.leftCols(2);
  const Matrix p_actual = leading * leading.adjoint();
  const Matrix p_expected = a[0] * a[0].adjoint() + a[1] * a[1].adjoint();
  // Projector fidelity: the leading eigenvectors span {A_1, A_2}.
  CHECK(qlin::max_abs_diff(p_actual, p_expected) < 1e-10);
}

TEST_CASE("perp_hit_test: toy statistics on both sides") {
  const auto everett = engine::run_everett(toy_scenario(3));
  const auto fs = toy_fs();
  const auto basis = distinguish::find_distinguishing_basis(everett.rho_S, fs);
  std::set<std::string> perp_labels;
  for (const auto& label : basis.labels) {
    if (label.rfind("perp", 0) == 0) perp_labels.insert(label);
  }

  const auto everett_samples =
      distinguish::sample_outcomes(everett.rho_S, basis, 100, 4);
  const auto everett_test =
      distinguish::perp_hit_test(everett_samples, basis, perp_labels, 1e-6);
  CHECK(everett_test.perp_hits == 0);
  CHECK(everett_test.p_value_under_copenhagen ==
        doctest::Approx(std::pow(2.0, -100.0)).epsilon(1e-12));
  CHECK(everett_test.decision == distinguish::Decision::collapse_rejected);

  engine::Scenario cop = toy_scenario(3);
  cop.theory = engine::Theory::copenhagen;
  const auto copenhagen = engine::run_copenhagen(cop);
  const auto cop_samples =
      distinguish::sample_outcomes(copenhagen.rho_S, basis, 100, 5);
  const auto cop_test =
      distinguish::perp_hit_test(cop_samples, basis, perp_labels, 1e-6);
  CHECK(cop_test.perp_hits > 30);
  CHECK(cop_test.perp_hits < 70);
  CHECK(cop_test.p_value_under_copenhagen > 0.01);
  CHECK(cop_test.decision == distinguish::Decision::collapse_not_rejected);
}

TEST_CASE("perp_hit_test: input validation") {
  const auto basis = canonical_basis(4);
  const std::set<std::string> perp{"b3"};
  CHECK_THROWS_AS((void)distinguish::perp_hit_test({}, basis, perp, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      (void)distinguish::perp_hit_test({0, 1}, basis, {"nope"}, 0.01),
      std::invalid_argument);
  CHECK_THROWS_AS((void)distinguish::perp_hit_test({0, 1}, basis, {}, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)distinguish::perp_hit_test({0, 1}, basis, perp, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)distinguish::perp_hit_test({9}, basis, perp, 0.01),
                  std::invalid_argument);

  const auto ok = distinguish::perp_hit_test({0, 3, 3}, basis, perp, 0.01);
  CHECK(ok.perp_hits == 2);
  CHECK(ok.n_samples == 3);
}

TEST_CASE("test calibration: null rejection rate stays near alpha") {
  const double alpha = 0.01;
  int rejections = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    qlin::Prng prng(qlin::derive_seed(31337, trial));
    std::int64_t hits = 0;
    for (int i = 0; i < 100; ++i) {
      if (prng.uniform() < 0.5) ++hits;
    }
    if (distinguish::binomial_lower_tail(100, 0.5, hits) < alpha) ++rejections;
  }
  const double rate = double(rejections) / double(trials);
  CHECK(rate <= 0.02);
}

TEST_CASE("theory_discrimination: the toy pair discriminates") {
  const auto result =
      distinguish::theory_discrimination(toy_scenario(4), 1000, 1e-6, 99);
  CHECK(result.discriminating);
  CHECK_FALSE(result.bound_vacuous);
  CHECK(result.fs_dim == 4);
  CHECK(result.everett_test.perp_hits == 0);
  CHECK(result.everett_test.p_value_under_copenhagen <= 1e-300);
  CHECK(result.copenhagen_test.decision ==
        distinguish::Decision::collapse_not_rejected);
  CHECK(result.everett_samples.size() == 1000);
  CHECK(result.copenhagen_samples.size() == 1000);
}

TEST_CASE("theory_discrimination: vacuous bound is flagged, not fatal") {
  engine::Scenario sc;
  sc.stream_qubits = 2;
  sc.streams = 2;
  sc.observer = observer::random_observer(4, 8);
  const auto result = distinguish::theory_discrimination(sc, 200, 1e-6, 1);
  CHECK(result.bound_vacuous);
  // A Haar-random 16x16 interaction almost surely fills the stream space.
  CHECK(result.fs_dim == 4);
  CHECK_FALSE(result.discriminating);
  CHECK(result.everett_test.p_value_under_copenhagen == 1.0);
}

TEST_CASE("theory_discrimination: one-slot recorder on four qubits") {
  engine::Scenario sc;
  sc.stream_qubits = 4;
  sc.streams = 2;
  sc.observer = observer::recording_observer(1);
  const auto result = distinguish::theory_discrimination(sc, 1000, 1e-6, 17);

  CHECK(result.discriminating);
  CHECK(result.fs_dim <= 4);  // D^2 with D = 2
  CHECK_FALSE(result.bound_vacuous);

  // Brute-force cross-check of the no-collapse stream state at this size
  // (4 * 2 + 1 = 9 qubits total).
  const auto u = observer::build(sc.observer, sc.stream_qubits);
  testing::FullJointSim sim(4, 2, 2, qlin::basis_state({2}, 0).amplitudes);
  sim.interact(u.u.matrix, 0);
  sim.interact(u.u.matrix, 1);
  const Matrix oracle_rho_s =
      0.5 * (sim.stream_marginal(0) + sim.stream_marginal(1));
  CHECK(qlin::max_abs_diff(result.everett_report.rho_S.matrix, oracle_rho_s) <
        1e-10);
}

TEST_CASE("theory_discrimination: sample count is validated") {
  CHECK_THROWS_AS(
      (void)distinguish::theory_discrimination(toy_scenario(1), 0, 1e-6, 0),
      std::invalid_argument);
}

TEST_CASE("supported scenarios never sample a perp outcome") {
  // Whenever rho_S is certified inside F_S, clipped probabilities make perp
  // hits impossible, not merely unlikely.
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    engine::Scenario sc;
    sc.stream_qubits = 3 + static_cast<int>(seed % 2);
    sc.streams = 1 + static_cast<int>(seed % 3);
    sc.observer = observer::random_observer(2, 900 + seed);

    const auto u = observer::build(sc.observer, sc.stream_qubits);
    const auto fs = engine::compute_F_S(u);
    const auto report = engine::run_everett(sc);
    REQUIRE(engine::certify_support_bound(report, fs).supported_in_fs);

    const auto result =
        distinguish::theory_discrimination(sc, 2000, 1e-6, 42 + seed);
    CHECK(result.everett_test.perp_hits == 0);
    CHECK(result.discriminating);
  }
}

TEST_CASE("measurement basis validation") {
  CHECK_THROWS_AS(distinguish::MeasurementBasis(Matrix::Identity(4, 4),
                                                {"a", "b"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      distinguish::MeasurementBasis(Matrix::Constant(2, 2, 0.5), {"a", "b"}),
      std::invalid_argument);
}
