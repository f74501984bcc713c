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

#include "evlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace evlab::io {

using nlohmann::json;

namespace {

template <typename T>
T require_field(const json& j, const std::string& key) {
  if (!j.contains(key)) {
    throw std::invalid_argument("scenario: missing key \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("scenario: key \"" + key +
                                "\" has the wrong type");
  }
}

template <typename T>
T optional_field(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("scenario: key \"" + key +
                                "\" has the wrong type");
  }
}

}  // namespace

ScenarioFile scenario_from_json(const json& j) {
  if (!j.is_object()) {
    throw std::invalid_argument("scenario: top level must be a JSON object");
  }
  ScenarioFile file;
  engine::Scenario& sc = file.scenario;

  sc.stream_qubits = require_field<int>(j, "n_qubits");
  sc.streams = require_field<int>(j, "n_streams");
  sc.theory = engine::theory_from_string(require_field<std::string>(j, "theory"));
  sc.seed = optional_field<std::uint64_t>(j, "seed", 0);
  if (sc.stream_qubits < 1) {
    throw std::invalid_argument("scenario: n_qubits must be positive");
  }
  if (sc.streams < 1) {
    throw std::invalid_argument("scenario: n_streams must be positive");
  }

  if (!j.contains("observer") || !j.at("observer").is_object()) {
    throw std::invalid_argument("scenario: missing \"observer\" object");
  }
  const json& obs = j.at("observer");
  observer::ObserverSpec& spec = sc.observer;
  spec.kind = observer::kind_from_string(require_field<std::string>(obs, "kind"));
  spec.seed = optional_field<std::uint64_t>(obs, "seed", 0);
  switch (spec.kind) {
    case observer::Kind::toy:
      spec.dim = optional_field<std::int64_t>(obs, "dim", 2);
      break;
    case observer::Kind::recording:
      spec.memory_qubits = require_field<int>(obs, "memory_qubits");
      if (spec.memory_qubits < 1 || spec.memory_qubits > 30) {
        throw std::invalid_argument(
            "scenario: observer.memory_qubits must be in [1, 30]");
      }
      spec.dim = qlin::Index{1} << spec.memory_qubits;
      if (obs.contains("dim") &&
          optional_field<std::int64_t>(obs, "dim", spec.dim) != spec.dim) {
        throw std::invalid_argument(
            "scenario: observer.dim contradicts memory_qubits");
      }
      break;
    case observer::Kind::random:
      spec.dim = require_field<std::int64_t>(obs, "dim");
      break;
  }
  if (spec.dim < 1) {
    throw std::invalid_argument("scenario: observer.dim must be positive");
  }

  file.samples = optional_field<std::int64_t>(j, "samples", 1000);
  file.alpha = optional_field<double>(j, "alpha", 1e-6);
  file.output_path = optional_field<std::string>(j, "output_path", "");
  return file;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open scenario file \"" + path + "\"");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scenario \"" + path +
                                "\" is not valid JSON: " + e.what());
  }
  return scenario_from_json(j);
}

json scenario_to_json(const ScenarioFile& s) {
  json obs{{"kind", observer::to_string(s.scenario.observer.kind)},
           {"dim", s.scenario.observer.dim},
           {"seed", s.scenario.observer.seed}};
  if (s.scenario.observer.kind == observer::Kind::recording) {
    obs["memory_qubits"] = s.scenario.observer.memory_qubits;
  }
  json j{{"n_qubits", s.scenario.stream_qubits},
         {"n_streams", s.scenario.streams},
         {"observer", obs},
         {"theory", engine::to_string(s.scenario.theory)},
         {"samples", s.samples},
         {"alpha", s.alpha},
         {"seed", s.scenario.seed}};
  if (!s.output_path.empty()) j["output_path"] = s.output_path;
  return j;
}

ReportFile make_report(const engine::Scenario& sc,
                       const engine::RunReport& run,
                       const engine::Certification& cert,
                       double wall_time_ms) {
  ReportFile r;
  r.wall_time_ms = wall_time_ms;
  r.theory = engine::to_string(run.theory);
  r.n_qubits = sc.stream_qubits;
  r.n_streams = sc.streams;
  r.seed = sc.seed;
  r.observer_kind = observer::to_string(sc.observer.kind);
  r.observer_dim = sc.observer.dim;
  r.memory_qubits = sc.observer.memory_qubits;
  r.observer_seed = sc.observer.seed;
  r.rank_rho_S = run.rank_rho_S;
  r.fs_dim = run.fs_dim;
  r.per_stream_ranks = run.per_stream_ranks;
  r.eigenvalues.assign(run.eigenvalues.data(),
                       run.eigenvalues.data() + run.eigenvalues.size());
  r.canonical_diagonal.resize(static_cast<std::size_t>(run.rho_S.dim()));
  for (qlin::Index k = 0; k < run.rho_S.dim(); ++k) {
    r.canonical_diagonal[static_cast<std::size_t>(k)] =
        std::real(run.rho_S.matrix(k, k));
  }
  r.trace_distance_to_mixed = run.trace_distance_to_mixed;
  r.max_perp_expectation = cert.max_perp_expectation;
  r.bound_holds = cert.bound_holds;
  r.bound_vacuous = run.bound_vacuous;
  r.collapse_bits = run.collapse_bits;
  return r;
}

json report_to_json(const ReportFile& r) {
  json j{{"tool_version", r.tool_version},
         {"wall_time_ms", r.wall_time_ms},
         {"theory", r.theory},
         {"n_qubits", r.n_qubits},
         {"n_streams", r.n_streams},
         {"seed", r.seed},
         {"observer",
          {{"kind", r.observer_kind},
           {"dim", r.observer_dim},
           {"memory_qubits", r.memory_qubits},
           {"seed", r.observer_seed}}},
         {"rank_rho_S", r.rank_rho_S},
         {"fs_dim", r.fs_dim},
         {"per_stream_ranks", r.per_stream_ranks},
         {"eigenvalues", r.eigenvalues},
         {"canonical_diagonal", r.canonical_diagonal},
         {"trace_distance_to_mixed", r.trace_distance_to_mixed},
         {"max_perp_expectation", r.max_perp_expectation},
         {"bound_holds", r.bound_holds},
         {"bound_vacuous", r.bound_vacuous},
         {"collapse_bits", r.collapse_bits}};
  if (r.test) {
    j["test"] = {{"n_samples", r.test->n_samples},
                 {"perp_hits", r.test->perp_hits},
                 {"p_value", r.test->p_value},
                 {"alpha", r.test->alpha},
                 {"decision", r.test->decision}};
  } else {
    j["test"] = nullptr;
  }
  return j;
}

ReportFile report_from_json(const json& j) {
  ReportFile r;
  r.tool_version = j.at("tool_version").get<std::string>();
  r.wall_time_ms = j.at("wall_time_ms").get<double>();
  r.theory = j.at("theory").get<std::string>();
  r.n_qubits = j.at("n_qubits").get<int>();
  r.n_streams = j.at("n_streams").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  const json& obs = j.at("observer");
  r.observer_kind = obs.at("kind").get<std::string>();
  r.observer_dim = obs.at("dim").get<std::int64_t>();
  r.memory_qubits = obs.at("memory_qubits").get<int>();
  r.observer_seed = obs.at("seed").get<std::uint64_t>();
  r.rank_rho_S = j.at("rank_rho_S").get<int>();
  r.fs_dim = j.at("fs_dim").get<int>();
  r.per_stream_ranks = j.at("per_stream_ranks").get<std::vector<int>>();
  r.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  r.canonical_diagonal =
      j.at("canonical_diagonal").get<std::vector<double>>();
  r.trace_distance_to_mixed = j.at("trace_distance_to_mixed").get<double>();
  r.max_perp_expectation = j.at("max_perp_expectation").get<double>();
  r.bound_holds = j.at("bound_holds").get<bool>();
  r.bound_vacuous = j.at("bound_vacuous").get<bool>();
  r.collapse_bits = j.at("collapse_bits").get<std::vector<int>>();
  if (!j.at("test").is_null()) {
    const json& t = j.at("test");
    TestSummary summary;
    summary.n_samples = t.at("n_samples").get<std::int64_t>();
    summary.perp_hits = t.at("perp_hits").get<std::int64_t>();
    summary.p_value = t.at("p_value").get<double>();
    summary.alpha = t.at("alpha").get<double>();
    summary.decision = t.at("decision").get<std::string>();
    r.test = summary;
  }
  return r;
}

std::string format_real(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", x);
  return buffer;
}

std::string report_to_csv(const ReportFile& r) {
  std::ostringstream out;
  out << "key,value\n";
  out << "tool_version," << r.tool_version << "\n";
  out << "wall_time_ms," << format_real(r.wall_time_ms) << "\n";
  out << "theory," << r.theory << "\n";
  out << "n_qubits," << r.n_qubits << "\n";
  out << "n_streams," << r.n_streams << "\n";
  out << "seed," << r.seed << "\n";
  out << "observer_kind," << r.observer_kind << "\n";
  out << "observer_dim," << r.observer_dim << "\n";
  out << "memory_qubits," << r.memory_qubits << "\n";
  out << "observer_seed," << r.observer_seed << "\n";
  out << "rank_rho_S," << r.rank_rho_S << "\n";
  out << "fs_dim," << r.fs_dim << "\n";
  for (std::size_t i = 0; i < r.per_stream_ranks.size(); ++i) {
    out << "per_stream_rank[" << i << "]," << r.per_stream_ranks[i] << "\n";
  }
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    out << "eigenvalue[" << i << "]," << format_real(r.eigenvalues[i]) << "\n";
  }
  for (std::size_t i = 0; i < r.canonical_diagonal.size(); ++i) {
    out << "canonical_diagonal[" << i << "],"
        << format_real(r.canonical_diagonal[i]) << "\n";
  }
  out << "trace_distance_to_mixed," << format_real(r.trace_distance_to_mixed)
      << "\n";
  out << "max_perp_expectation," << format_real(r.max_perp_expectation)
      << "\n";
  out << "bound_holds," << (r.bound_holds ? 1 : 0) << "\n";
  out << "bound_vacuous," << (r.bound_vacuous ? 1 : 0) << "\n";
  if (r.test) {
    out << "test_n_samples," << r.test->n_samples << "\n";
    out << "test_perp_hits," << r.test->perp_hits << "\n";
    out << "test_p_value," << format_real(r.test->p_value) << "\n";
    out << "test_alpha," << format_real(r.test->alpha) << "\n";
    out << "test_decision," << r.test->decision << "\n";
  }
  return out.str();
}

std::string samples_to_csv(const std::string& theory,
                           const std::vector<int>& samples,
                           const distinguish::MeasurementBasis& basis) {
  std::ostringstream out;
  for (int s : samples) {
    out << theory << "," << s << ","
        << basis.labels.at(static_cast<std::size_t>(s)) << "\n";
  }
  return out.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const qlin::invariant_error*>(&e) != nullptr) return 2;
  return 1;
}

}  // namespace evlab::io
