// Copyright 2026 The TRAP Authors
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

#ifndef TRAP_HARNESS_HPP_
#define TRAP_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "trap/driver.hpp"
#include "trap/opf.hpp"

namespace trap {

// Thrown for unusable configuration files (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string problem = "opf";  // opf | qp
  std::string case_path;
  Formulation formulation = Formulation::kPolar;
  std::string outer = "al";  // al | lancelot
  double rho0 = 10.0;
  double factor = 30.0;
  double outer_tol = 1e-7;
  int max_outer = 30;
  bool require_inner_kkt = true;
  std::string start = "flat";  // flat | random
  std::string schedule = "colored";  // colored | single
  std::uint64_t seed = 1;
  int repeat = 1;
  int qp_dimension = 20;
  int qp_bounded = 10;
  TrapParams trap;
  std::string output_dir;

  // Relative paths inside the document resolve against `base_dir`.
  static ExperimentConfig from_json(const std::string& text, const std::string& base_dir = "");
  static ExperimentConfig from_file(const std::string& path);
  void validate() const;
};

struct ExperimentResult {
  int exit_code = 0;
  std::string message;
  int runs = 0;
  int successes = 0;
  double objective = 0.0;
  double constraint_norm = 0.0;
  long total_scg = 0;
  int outer_iterations = 0;
};

// Writes table.csv, trace.csv, ledger.csv, runs.csv and summary.json into
// cfg.output_dir. Exit code 0 on success, 1 on solver failure.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Aligns the per-iteration traces of two bundles (directories) into a CSV.
// Throws InvalidArgument if the bundles come from different problems.
std::string compare_runs(const std::string& dir_a, const std::string& dir_b);

// One-line description of a parsed case file.
std::string describe_case(const NetworkCase& network);

}  // namespace trap

#endif  // TRAP_HARNESS_HPP_
