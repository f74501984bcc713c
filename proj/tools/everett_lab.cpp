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

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "evlab/distinguish.hpp"
#include "evlab/engine.hpp"
#include "evlab/io.hpp"
#include "evlab/observer.hpp"

namespace {

using namespace evlab;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open output file \"" + path + "\"");
  }
  out << text;
}

double clip_dust(double x) { return std::abs(x) < 1e-12 ? 0.0 : x; }

struct RunOptions {
  std::string scenario_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_run(const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  io::ScenarioFile file = io::load_scenario(opt.scenario_path);
  if (opt.seed_set) file.scenario.seed = opt.seed;

  const engine::RunReport run = engine::run(file.scenario);
  const observer::InteractionUnitary u =
      observer::build(file.scenario.observer, file.scenario.stream_qubits);
  const engine::Certification cert =
      engine::certify_support_bound(run, engine::compute_F_S(u));

  const io::ReportFile report =
      io::make_report(file.scenario, run, cert, elapsed_ms(start));
  const std::string out_path =
      !opt.out_path.empty() ? opt.out_path : file.output_path;
  if (opt.format == "csv") {
    write_text(out_path, io::report_to_csv(report));
  } else {
    write_text(out_path, io::report_to_json(report).dump(2) + "\n");
  }
  return 0;
}

struct DiscriminateOptions {
  std::string scenario_path;
  std::string out_path;
  std::string samples_csv_path;
  std::int64_t samples = -1;
  double alpha = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_discriminate(const DiscriminateOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  io::ScenarioFile file = io::load_scenario(opt.scenario_path);
  if (opt.samples >= 0) file.samples = opt.samples;
  if (opt.alpha >= 0.0) file.alpha = opt.alpha;
  if (opt.seed_set) file.scenario.seed = opt.seed;
  if (file.samples < 1) {
    throw std::invalid_argument("discriminate: need at least one sample");
  }
  if (file.alpha <= 0.0 || file.alpha >= 1.0) {
    throw std::invalid_argument("discriminate: alpha must be in (0, 1)");
  }

  const distinguish::DiscriminationResult result = distinguish::theory_discrimination(
      file.scenario, file.samples, file.alpha, file.scenario.seed);

  if (result.bound_vacuous) {
    std::cout << "warning: bound vacuous (2^N <= D^2); the support bound "
                 "cannot separate the theories here\n";
  }
  const auto print_side = [&](const char* name,
                              const distinguish::TestResult& t) {
    std::printf("%-11s perp_hits = %lld / %lld, p_value = %s, %s\n", name,
                static_cast<long long>(t.perp_hits),
                static_cast<long long>(t.n_samples),
                io::format_real(t.p_value_under_copenhagen).c_str(),
                distinguish::to_string(t.decision).c_str());
  };
  print_side("everett:", result.everett_test);
  print_side("copenhagen:", result.copenhagen_test);
  std::cout << (result.discriminating ? "DISCRIMINATED" : "NOT DISCRIMINATED")
            << "\n";

  const double wall = elapsed_ms(start);
  const std::string out_path =
      !opt.out_path.empty() ? opt.out_path : file.output_path;
  if (!out_path.empty()) {
    const auto side_report = [&](const engine::RunReport& run,
                                 const distinguish::TestResult& t) {
      const observer::InteractionUnitary u = observer::build(
          file.scenario.observer, file.scenario.stream_qubits);
      const engine::Certification cert =
          engine::certify_support_bound(run, engine::compute_F_S(u));
      io::ReportFile r = io::make_report(file.scenario, run, cert, wall);
      r.test = io::TestSummary{t.n_samples, t.perp_hits,
                               t.p_value_under_copenhagen, t.alpha,
                               distinguish::to_string(t.decision)};
      return io::report_to_json(r);
    };
    nlohmann::json paired{
        {"tool_version", io::kToolVersion},
        {"wall_time_ms", wall},
        {"discriminating", result.discriminating},
        {"bound_vacuous", result.bound_vacuous},
        {"fs_dim", result.fs_dim},
        {"basis_labels", result.basis.labels},
        {"everett", side_report(result.everett_report, result.everett_test)},
        {"copenhagen",
         side_report(result.copenhagen_report, result.copenhagen_test)}};
    write_text(out_path, paired.dump(2) + "\n");
  }
  if (!opt.samples_csv_path.empty()) {
    std::string csv = "theory,outcome,label\n";
    csv += io::samples_to_csv("everett", result.everett_samples, result.basis);
    csv += io::samples_to_csv("copenhagen", result.copenhagen_samples,
                              result.basis);
    write_text(opt.samples_csv_path, csv);
  }
  return 0;
}

int cmd_toy_demo() {
  engine::Scenario sc;
  sc.stream_qubits = 3;
  sc.streams = 4;
  sc.observer = observer::toy_observer();
  sc.theory = engine::Theory::everett;
  sc.seed = 0;

  const engine::RunReport report = engine::run_everett(sc);
  const observer::InteractionUnitary u =
      observer::build(sc.observer, sc.stream_qubits);
  const engine::Certification cert =
      engine::certify_support_bound(report, engine::compute_F_S(u));

  std::printf("Toy interaction: 3 stream qubits, observer dimension 2, "
              "%d streams\n\n", sc.streams);
  std::printf("Stream states the interaction can emit:\n");
  std::printf("  A_1 = (|000> + |001> + |010> + |011>)/2\n");
  std::printf("  A_2 = (|100> + |101> + |110> + |111>)/2\n");
  std::printf("  A_3 = (|000> - |001> + |010> - |011>)/2\n");
  std::printf("  A_4 = (|100> - |101> + |110> - |111>)/2\n");
  std::printf("Orthogonal states it can never populate:\n");
  std::printf("  B_1 = (|000> - |010>)/sqrt(2)\n");
  std::printf("  B_2 = (|001> - |011>)/sqrt(2)\n");
  std::printf("  B_3 = (|100> - |110>)/sqrt(2)\n");
  std::printf("  B_4 = (|101> - |111>)/sqrt(2)\n\n");

  std::printf("Canonical-basis probabilities (no-collapse evolution):\n");
  for (long long k = 0; k < 8; ++k) {
    std::printf("  P(|%lld%lld%lld>) = %.6f\n", (k >> 2) & 1, (k >> 1) & 1,
                k & 1, clip_dust(std::real(report.rho_S.matrix(k, k))));
  }
  std::printf("Identical to the fully mixed state in this basis.\n\n");

  std::printf("{A, B}-basis probabilities (no-collapse evolution):\n");
  const auto a_states = observer::toy_a_states();
  const auto b_states = observer::toy_b_states();
  for (int i = 0; i < 4; ++i) {
    const qlin::Vector& v = a_states[static_cast<std::size_t>(i)].amplitudes;
    std::printf("  P(A_%d) = %.6f\n", i + 1,
                clip_dust(std::real(v.dot(report.rho_S.matrix * v))));
  }
  for (int i = 0; i < 4; ++i) {
    const qlin::Vector& v = b_states[static_cast<std::size_t>(i)].amplitudes;
    std::printf("  P(B_%d) = %.6f\n", i + 1,
                clip_dust(std::real(v.dot(report.rho_S.matrix * v))));
  }
  std::printf("A fully mixed state would put 0.125000 on every outcome, "
              "B states included.\n\n");

  std::printf("rank(rho_S)          = %d\n", report.rank_rho_S);
  std::printf("dim(F_S)             = %d\n", report.fs_dim);
  std::printf("max <B|rho_S|B>      = %s\n",
              io::format_real(clip_dust(cert.max_perp_expectation)).c_str());
  std::printf("support bound holds  = %s\n", cert.bound_holds ? "yes" : "no");
  return 0;
}

struct ScanOptions {
  std::string observer_kind = "recording";
  int n_min = 1;
  int n_max = 5;
  int trials = 1;
  int memory_qubits = 1;
  std::int64_t dim = 2;
  int streams = 2;
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_scan(const ScanOptions& opt) {
  if (opt.n_min < 1 || opt.n_min > opt.n_max) {
    throw std::invalid_argument("scan: need 1 <= n-min <= n-max");
  }
  if (opt.trials < 1) {
    throw std::invalid_argument("scan: trials must be >= 1");
  }
  const observer::Kind kind = observer::kind_from_string(opt.observer_kind);
  if (kind == observer::Kind::toy) {
    throw std::invalid_argument(
        "scan: the toy observer is fixed at N = 3; scan recording or random");
  }

  std::ostringstream csv;
  csv << "N,D,rank,trace_distance_to_mixed\n";
  std::uint64_t row = 0;
  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    for (int trial = 0; trial < opt.trials; ++trial, ++row) {
      engine::Scenario sc;
      sc.stream_qubits = n;
      sc.streams = opt.streams;
      sc.theory = engine::Theory::everett;
      sc.seed = opt.seed;
      sc.observer = kind == observer::Kind::recording
                        ? observer::recording_observer(opt.memory_qubits)
                        : observer::random_observer(
                              opt.dim, qlin::derive_seed(opt.seed, row));
      const engine::RunReport report = engine::run_everett(sc);
      csv << n << "," << sc.observer.dim << "," << report.rank_rho_S << ","
          << io::format_real(report.trace_distance_to_mixed) << "\n";
    }
  }
  write_text(opt.out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"everett-lab: simulate a finite-dimensional observer measuring "
               "qubit streams, with and without wave-function collapse"};
  app.set_version_flag("--version", io::kToolVersion);
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "Run one scenario file and write its report");
  run_cmd->add_option("scenario", run_opt.scenario_path, "Scenario JSON file")
      ->required();
  run_cmd->add_option("--out", run_opt.out_path, "Report path (default: stdout)");
  run_cmd->add_option("--format", run_opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  run_cmd->add_option("--seed", run_opt.seed, "Override the scenario seed");

  DiscriminateOptions disc_opt;
  CLI::App* disc_cmd = app.add_subcommand(
      "discriminate",
      "Run both theories through the same measurement and test them");
  disc_cmd->add_option("scenario", disc_opt.scenario_path, "Scenario JSON file")
      ->required();
  disc_cmd->add_option("--samples", disc_opt.samples,
                       "Measurement samples per theory");
  disc_cmd->add_option("--alpha", disc_opt.alpha, "Test significance level");
  disc_cmd->add_option("--out", disc_opt.out_path, "Paired report path");
  disc_cmd->add_option("--samples-csv", disc_opt.samples_csv_path,
                       "Write raw samples as CSV (theory,outcome,label)");
  disc_cmd->add_option("--seed", disc_opt.seed, "Override the scenario seed");

  app.add_subcommand("toy-demo",
                     "Print the built-in 3-qubit / 1-qubit-observer example");

  ScanOptions scan_opt;
  CLI::App* scan_cmd = app.add_subcommand(
      "scan", "Sweep N and tabulate rank and distance from fully mixed");
  scan_cmd->add_option("--observer", scan_opt.observer_kind,
                       "recording or random");
  scan_cmd->add_option("--n-min", scan_opt.n_min, "Smallest N");
  scan_cmd->add_option("--n-max", scan_opt.n_max, "Largest N");
  scan_cmd->add_option("--trials", scan_opt.trials, "Rows per N");
  scan_cmd->add_option("--memory", scan_opt.memory_qubits,
                       "Memory qubits (recording observer)");
  scan_cmd->add_option("--dim", scan_opt.dim, "Observer dimension (random)");
  scan_cmd->add_option("--streams", scan_opt.streams, "Streams per run");
  scan_cmd->add_option("--seed", scan_opt.seed, "Base seed");
  scan_cmd->add_option("--out", scan_opt.out_path, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  run_opt.seed_set = run_cmd->count("--seed") > 0;
  disc_opt.seed_set = disc_cmd->count("--seed") > 0;

  try {
    if (run_cmd->parsed()) return cmd_run(run_opt);
    if (disc_cmd->parsed()) return cmd_discriminate(disc_opt);
    if (scan_cmd->parsed()) return cmd_scan(scan_opt);
    return cmd_toy_demo();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return evlab::io::exit_code_for(e);
  }
}
