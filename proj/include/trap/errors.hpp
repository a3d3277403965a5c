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

#ifndef TRAP_ERRORS_HPP_
#define TRAP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace trap {

// Violated preconditions on arguments (dimension mismatch, bad parameters,
// infeasible points handed to routines that require feasibility).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure inside an algorithm whose contract could not be honoured.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backtracking in the Cauchy sweep ran out of halvings at `node`.
class BacktrackError : public SolverError {
 public:
  BacktrackError(int node, const std::string& what)
      : SolverError(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

// Malformed network case text; `line` is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace trap

#endif  // TRAP_ERRORS_HPP_
