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

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "trap/errors.hpp"
#include "trap/harness.hpp"
#include "trap/opf_case.hpp"

int main(int argc, char** argv) {
  CLI::App app{"TRAP experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Path to the JSON config")->required();

  std::string dir_a, dir_b, out_path;
  auto* compare = app.add_subcommand("compare", "Align the traces of two result bundles");
  compare->add_option("a", dir_a, "First bundle directory")->required();
  compare->add_option("b", dir_b, "Second bundle directory")->required();
  compare->add_option("-o,--output", out_path, "Write the aligned CSV here instead of stdout");

  std::string case_path;
  auto* validate = app.add_subcommand("validate-case", "Parse a case file and report its size");
  validate->add_option("case", case_path, "Path to the case file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    trap::ExperimentConfig cfg;
    try {
      cfg = trap::ExperimentConfig::from_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return 2;
    }
    try {
      const trap::ExperimentResult r = trap::run_experiment(cfg, std::cout);
      if (r.exit_code != 0) std::cerr << "failure: " << r.message << '\n';
      return r.exit_code;
    } catch (const trap::ParseError& e) {
      std::cerr << "case error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "failure: " << e.what() << '\n';
      return 1;
    }
  }

  if (*compare) {
    try {
      const std::string csv = trap::compare_runs(dir_a, dir_b);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(out_path) << csv;
      }
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "compare error: " << e.what() << '\n';
      return 2;
    }
  }

  try {
    const trap::NetworkCase network = trap::parse_case_file(case_path);
    std::cout << case_path << ": " << trap::describe_case(network) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << case_path << ": " << e.what() << '\n';
    return 2;
  }
}
