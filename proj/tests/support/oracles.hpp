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

#ifndef TRAP_TESTS_SUPPORT_ORACLES_HPP_
#define TRAP_TESTS_SUPPORT_ORACLES_HPP_

// Reference computations used by the tests. They work on dense matrices
// and do not call the solver code they check.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// L + gᵀ(xp − x) + ½(xp − x)ᵀH(xp − x).
double quadratic_model(double L, const VectorXd& g, const MatrixXd& H, const VectorXd& x,
                       const VectorXd& xp);

VectorXd clamp(const VectorXd& x, const VectorXd& lo, const VectorXd& hi);

// Projected-gradient step on a single block with backtracking from alpha0 by
// `shrink` until lin + ½dᵀHd ≤ nu0·lin and ‖d‖∞ ≤ cap.
struct BlockStep {
  VectorXd d;
  double alpha = 0.0;
};
BlockStep block_projected_step(const VectorXd& g, const MatrixXd& H, const VectorXd& x,
                               const VectorXd& lo, const VectorXd& hi, double alpha0,
                               double shrink, double nu0, double cap);

// Minimiser of ½xᵀHx + cᵀx over the box by enumerating, for every bounded
// coordinate, the three states {lower, upper, free}. H must be SPD.
struct BoxQpSolution {
  VectorXd x;
  std::vector<int> at_lower;
  std::vector<int> at_upper;
  double value = 0.0;
};
BoxQpSolution enumerate_box_qp(const MatrixXd& H, const VectorXd& c, const VectorXd& lo,
                               const VectorXd& hi);

// Central differences of a scalar function.
VectorXd central_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& x,
                          double h = 1e-6);

// Rows of a CSV file split on commas, header included.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

std::string read_text(const std::string& path);

}  // namespace oracle

#endif  // TRAP_TESTS_SUPPORT_ORACLES_HPP_
