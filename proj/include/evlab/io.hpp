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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evlab/distinguish.hpp"
#include "evlab/engine.hpp"

namespace evlab::io {

inline constexpr const char* kToolVersion = "0.1.0";

/// A scenario file: the experiment configuration plus the test parameters
/// the discriminate command needs.
struct ScenarioFile {
  engine::Scenario scenario;
  std::int64_t samples = 1000;
  double alpha = 1e-6;
  std::string output_path;  // empty: stdout / --out decides
};

ScenarioFile scenario_from_json(const nlohmann::json& j);
ScenarioFile load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const ScenarioFile& s);

/// Condensed test block of a report.
struct TestSummary {
  std::int64_t n_samples = 0;
  std::int64_t perp_hits = 0;
  double p_value = 1.0;
  double alpha = 0.0;
  std::string decision;

  bool operator==(const TestSummary&) const = default;
};

/// On-disk run report. Scalar diagnostics only; rho_S itself is
/// reconstructible from the scenario (every run is deterministic), so the
/// file stays small at any allowed dimension.
struct ReportFile {
  std::string tool_version = kToolVersion;
  double wall_time_ms = 0.0;
  std::string theory;
  int n_qubits = 0;
  int n_streams = 0;
  std::uint64_t seed = 0;
  std::string observer_kind;
  std::int64_t observer_dim = 0;
  int memory_qubits = 0;
  std::uint64_t observer_seed = 0;
  int rank_rho_S = 0;
  int fs_dim = 0;
  std::vector<int> per_stream_ranks;
  std::vector<double> eigenvalues;          // descending
  std::vector<double> canonical_diagonal;   // <k|rho_S|k>
  double trace_distance_to_mixed = 0.0;
  double max_perp_expectation = 0.0;
  bool bound_holds = false;
  bool bound_vacuous = false;
  std::vector<int> collapse_bits;
  std::optional<TestSummary> test;

  bool operator==(const ReportFile&) const = default;
};

ReportFile make_report(const engine::Scenario& sc,
                       const engine::RunReport& run,
                       const engine::Certification& cert,
                       double wall_time_ms);

nlohmann::json report_to_json(const ReportFile& r);
ReportFile report_from_json(const nlohmann::json& j);

/// Flat key,value rendering of a report (one line per scalar, indexed lines
/// for arrays). Reals carry 12 significant digits.
std::string report_to_csv(const ReportFile& r);

/// "theory,outcome,label" rows for raw measurement samples.
std::string samples_to_csv(const std::string& theory,
                           const std::vector<int>& samples,
                           const distinguish::MeasurementBasis& basis);

/// Formats a real with 12 significant digits (scan/report CSV contract).
std::string format_real(double x);

/// Exit-code classification shared by every CLI path: invariant violations
/// are 2 (a bug signal), anything else a caller can fix is 1.
int exit_code_for(const std::exception& e);

}  // namespace evlab::io
