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

#include "evlab/engine.hpp"
#include "evlab/observer.hpp"
#include "oracles.hpp"

using namespace evlab;
using qlin::Complex;
using qlin::Index;
using qlin::Matrix;
using qlin::Vector;

TEST_CASE("toy unitary: pinned amplitudes and unitarity") {
  const auto toy = observer::make_toy_unitary();
  CHECK(qlin::is_unitary(toy.u.matrix));
  CHECK(toy.u.factor_dims == std::vector<Index>{8, 2});

  const Vector plus3 = qlin::plus_state(3).amplitudes;
  const Vector psi0 = qlin::basis_state({2}, 0).amplitudes;
  const Vector psi1 = qlin::basis_state({2}, 1).amplitudes;

  // |+++>|psi_0> maps to a state whose |000>|psi_0> amplitude is
  // (1/sqrt(2)) * (1/2).
  const Vector out0 = toy.u.matrix * qlin::kron(plus3, psi0);
  CHECK(std::abs(out0(0) - Complex(1.0 / (2.0 * std::sqrt(2.0)))) < 1e-12);

  // |+++>|psi_1> maps to a state whose |001>|psi_0> amplitude is
  // (1/sqrt(2)) * (-1/2).
  const Vector out1 = toy.u.matrix * qlin::kron(plus3, psi1);
  CHECK(std::abs(out1(1 * 2 + 0) - Complex(-1.0 / (2.0 * std::sqrt(2.0)))) <
        1e-12);

  // Full output states match the A-state expansion componentwise.
  const auto a = testing::toy_a_oracle();
  const Vector expected0 =
      M_SQRT1_2 * (qlin::kron(a[0], psi0) + qlin::kron(a[1], psi1));
  const Vector expected1 =
      M_SQRT1_2 * (qlin::kron(a[2], psi0) + qlin::kron(a[3], psi1));
  CHECK((out0 - expected0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((out1 - expected1).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("toy unitary: Schmidt structure of the mapped input") {
  const auto toy = observer::make_toy_unitary();
  const Vector in = qlin::kron(qlin::plus_state(3).amplitudes,
                               qlin::basis_state({2}, 0).amplitudes);
  const qlin::StateVector out(toy.u.matrix * in, {8, 2});
  const auto sd = qlin::schmidt(out, 1);

  CHECK(sd.coefficients(0) == doctest::Approx(M_SQRT1_2).epsilon(1e-10));
  CHECK(sd.coefficients(1) == doctest::Approx(M_SQRT1_2).epsilon(1e-10));

  // Degenerate coefficients pin only the span: compare projectors.
  const auto a = testing::toy_a_oracle();
  const Matrix p_expected =
      a[0] * a[0].adjoint() + a[1] * a[1].adjoint();
  const Matrix p_actual = sd.left_vectors.leftCols(2) *
                          sd.left_vectors.leftCols(2).adjoint();
  CHECK(qlin::max_abs_diff(p_actual, p_expected) < 1e-10);
}

TEST_CASE("toy unitary: different completions give the same stream states") {
  const auto toy_a = observer::make_toy_unitary(0);
  const auto toy_b = observer::make_toy_unitary(12345);
  CHECK(qlin::max_abs_diff(toy_a.u.matrix, toy_b.u.matrix) > 1e-3);

  engine::Scenario sc;
  sc.stream_qubits = 3;
  sc.streams = 2;
  sc.observer = observer::toy_observer();

  const auto streams_a = engine::everett_stream_states(toy_a, sc);
  const auto streams_b = engine::everett_stream_states(toy_b, sc);
  for (std::size_t i = 0; i < streams_a.size(); ++i) {
    CHECK(qlin::trace_distance(streams_a[i], streams_b[i]) < 1e-12);
  }
}

TEST_CASE("recording observer: single CNOT makes a Bell pair") {
  const auto rec = observer::make_recording_observer(1, 1);
  const Vector in = qlin::kron(qlin::plus_state(1).amplitudes,
                               qlin::basis_state({2}, 0).amplitudes);
  const Vector out = rec.u.matrix * in;
  CHECK(std::abs(out(0) - Complex(M_SQRT1_2)) < 1e-12);  // |00>
  CHECK(std::abs(out(3) - Complex(M_SQRT1_2)) < 1e-12);  // |11>
  CHECK(std::abs(out(1)) < 1e-12);
  CHECK(std::abs(out(2)) < 1e-12);
}

TEST_CASE("recording observer: perfect record fully decoheres the stream") {
  for (const auto& [n, mem] : {std::pair{2, 2}, {2, 3}, {1, 1}, {3, 3}}) {
    const auto rec = observer::make_recording_observer(n, mem);
    testing::FullJointSim sim(n, 1, Index{1} << mem,
                              qlin::basis_state({Index{1} << mem}, 0)
                                  .amplitudes);
    sim.interact(rec.u.matrix, 0);
    const Index sdim = Index{1} << n;
    CHECK(qlin::max_abs_diff(sim.stream_marginal(0),
                             Matrix::Identity(sdim, sdim) / double(sdim)) <
          1e-10);
  }
}

TEST_CASE("recording observer: one slot cannot record two qubits") {
  const auto rec = observer::make_recording_observer(2, 1);
  testing::FullJointSim sim(2, 1, 2, qlin::basis_state({2}, 0).amplitudes);
  sim.interact(rec.u.matrix, 0);
  const qlin::DensityMatrix rho(sim.stream_marginal(0), {4});

  CHECK(qlin::trace_distance(rho, qlin::maximally_mixed({4})) > 0.1);
  CHECK(qlin::numerical_rank(rho) <= 4);  // D^2 with D = 2

  // The engine's recurrence agrees with the brute-force evolution.
  engine::Scenario sc;
  sc.stream_qubits = 2;
  sc.streams = 1;
  sc.observer = observer::recording_observer(1);
  const auto streams = engine::everett_stream_states(rec, sc);
  CHECK(qlin::trace_distance(streams[0], rho) < 1e-12);
}

TEST_CASE("recording observer: argument validation") {
  CHECK_THROWS_AS((void)observer::make_recording_observer(0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)observer::make_recording_observer(1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)observer::make_recording_observer(-2, 3),
                  std::invalid_argument);
}

TEST_CASE("clocked unitary: single step passes through unchanged") {
  const auto base = observer::make_recording_observer(1, 1);
  const auto clocked = observer::make_clocked_unitary({base});
  CHECK(qlin::max_abs_diff(clocked.u.matrix, base.u.matrix) == 0.0);
  CHECK(clocked.u.factor_dims == base.u.factor_dims);
}

TEST_CASE("clocked unitary: two steps replay the sequence and reset") {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const observer::InteractionUnitary step1{
      qlin::UnitaryOperator(qlin::kron(x, Matrix::Identity(2, 2)), {2, 2}), 1};
  const observer::InteractionUnitary step2{
      qlin::UnitaryOperator(Matrix::Identity(4, 4), {2, 2}), 1};
  const auto clocked = observer::make_clocked_unitary({step1, step2});
  CHECK(clocked.u.factor_dims == std::vector<Index>{2, 2, 2});

  const Vector so = qlin::random_state({2, 2}, 77).amplitudes;
  const Vector clock0 = qlin::basis_state({2}, 0).amplitudes;
  const Vector twice =
      clocked.u.matrix * (clocked.u.matrix * qlin::kron(so, clock0));
  const Vector expected = qlin::kron(Vector(step1.u.matrix * so), clock0);
  CHECK((twice - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clocked unitary: m = 4 equals sequential evolution after "
          "tracing the clock") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<observer::InteractionUnitary> steps;
    for (std::uint64_t i = 0; i < 4; ++i) {
      qlin::UnitaryOperator u = qlin::random_unitary(4, 100 * seed + i);
      steps.push_back(observer::InteractionUnitary{
          qlin::UnitaryOperator(std::move(u.matrix), {2, 2}), 1});
    }
    const auto clocked = observer::make_clocked_unitary(steps);

    Vector sequential = qlin::random_state({2, 2}, 999 + seed).amplitudes;
    Vector with_clock =
        qlin::kron(sequential, qlin::basis_state({4}, 0).amplitudes);
    for (const auto& step : steps) {
      sequential = step.u.matrix * sequential;
      with_clock = clocked.u.matrix * with_clock;
    }

    const qlin::DensityMatrix joint(with_clock * with_clock.adjoint(),
                                    {2, 2, 4});
    const auto marginal = qlin::partial_trace(joint, {0, 1});
    const qlin::DensityMatrix expected(sequential * sequential.adjoint(),
                                       {2, 2});
    CHECK(qlin::trace_distance(marginal, expected) < 1e-10);
  }
}

TEST_CASE("clocked unitary: non-power-of-two sequences pad with identities") {
  std::vector<observer::InteractionUnitary> steps;
  for (std::uint64_t i = 0; i < 3; ++i) {
    qlin::UnitaryOperator u = qlin::random_unitary(4, 50 + i);
    steps.push_back(observer::InteractionUnitary{
        qlin::UnitaryOperator(std::move(u.matrix), {2, 2}), 1});
  }
  const auto clocked = observer::make_clocked_unitary(steps);
  CHECK(clocked.u.factor_dims == std::vector<Index>{2, 2, 4});
  CHECK(qlin::is_unitary(clocked.u.matrix));

  // Step 4 is the identity: from clock value 3 the state factor is
  // untouched.
  Vector so = qlin::random_state({2, 2}, 8).amplitudes;
  const Vector in = qlin::kron(so, qlin::basis_state({4}, 3).amplitudes);
  const Vector out = clocked.u.matrix * in;
  const Vector expected = qlin::kron(so, qlin::basis_state({4}, 0).amplitudes);
  CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("clocked unitary: mismatched dimensions are rejected") {
  const auto a = observer::make_recording_observer(1, 1);
  const auto b = observer::make_recording_observer(2, 1);
  CHECK_THROWS_AS((void)observer::make_clocked_unitary({a, b}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)observer::make_clocked_unitary({}),
                  std::invalid_argument);
}

TEST_CASE("build: dispatch per kind") {
  const auto toy_direct = observer::make_toy_unitary();
  const auto toy_built = observer::build(observer::toy_observer(), 3);
  CHECK(qlin::max_abs_diff(toy_built.u.matrix, toy_direct.u.matrix) == 0.0);

  const auto rec_direct = observer::make_recording_observer(2, 1);
  const auto rec_built = observer::build(observer::recording_observer(1), 2);
  CHECK(qlin::max_abs_diff(rec_built.u.matrix, rec_direct.u.matrix) == 0.0);

  const auto rnd1 = observer::build(observer::random_observer(4, 7), 2);
  const auto rnd2 = observer::build(observer::random_observer(4, 7), 2);
  CHECK(rnd1.u.dim() == 16);
  CHECK(rnd1.u.factor_dims == std::vector<Index>{4, 4});
  CHECK(qlin::is_unitary(rnd1.u.matrix));
  CHECK(qlin::max_abs_diff(rnd1.u.matrix, rnd2.u.matrix) == 0.0);

  CHECK_THROWS_AS((void)observer::build(observer::toy_observer(), 2),
                  std::invalid_argument);
  auto bad_toy = observer::toy_observer();
  bad_toy.dim = 4;
  CHECK_THROWS_AS((void)observer::build(bad_toy, 3), std::invalid_argument);
}

TEST_CASE("every constructed interaction is unitary") {
  CHECK(qlin::is_unitary(observer::build(observer::toy_observer(), 3).u.matrix));
  for (int mem = 1; mem <= 3; ++mem) {
    for (int n = 1; n <= 3; ++n) {
      CHECK(qlin::is_unitary(
          observer::build(observer::recording_observer(mem), n).u.matrix));
    }
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(qlin::is_unitary(
        observer::build(observer::random_observer(3, seed), 2).u.matrix));
  }
}

TEST_CASE("clock equivalence: sequential time-dependent evolution matches "
          "the constant-operator form") {
  for (const std::size_t m : {std::size_t{2}, std::size_t{4}}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      std::vector<observer::InteractionUnitary> steps;
      for (std::size_t i = 0; i < m; ++i) {
        qlin::UnitaryOperator u =
            qlin::random_unitary(8, seed * 31 + i);
        steps.push_back(observer::InteractionUnitary{
            qlin::UnitaryOperator(std::move(u.matrix), {4, 2}), 2});
      }
      const auto clocked = observer::make_clocked_unitary(steps);
      const Index clock_dim = clocked.u.factor_dims.back();

      Vector sequential = qlin::random_state({4, 2}, 500 + seed).amplitudes;
      Vector with_clock = qlin::kron(
          sequential, qlin::basis_state({clock_dim}, 0).amplitudes);
      for (const auto& step : steps) {
        sequential = step.u.matrix * sequential;
        with_clock = clocked.u.matrix * with_clock;
      }
      const qlin::DensityMatrix joint(with_clock * with_clock.adjoint(),
                                      {4, 2, clock_dim});
      CHECK(qlin::trace_distance(
                qlin::partial_trace(joint, {0, 1}),
                qlin::DensityMatrix(sequential * sequential.adjoint(),
                                    {4, 2})) < 1e-10);
    }
  }
}
