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

#ifndef TRAP_MODEL_HPP_
#define TRAP_MODEL_HPP_

#include <vector>

#include "trap/block_sparse.hpp"
#include "trap/blockspace.hpp"

namespace trap {

// Bound-constrained objective with block-sparse second derivatives.
class NlpProblem {
 public:
  virtual ~NlpProblem() = default;

  virtual const std::vector<int>& node_sizes() const = 0;
  virtual const CouplingGraph& coupling() const = 0;
  virtual const BoxSet& bounds() const = 0;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;
  virtual BlockSparseMatrix hessian(const Vector& x) const = 0;

  int dimension() const { return bounds().dimension(); }
};

// m(x') = L(x) + <g, x' - x> + 1/2 <x' - x, B (x' - x)>.
struct QuadraticModel {
  Vector x;
  double value = 0.0;
  Vector g;
  BlockSparseMatrix B;
};

QuadraticModel build_model(const NlpProblem& problem, const Vector& x);

double model_eval(const QuadraticModel& m, const Vector& xp);
Vector model_gradient(const QuadraticModel& m, const Vector& xp);

// Block `node` of the model gradient at `current`: g_i + Σ_j B_ij (current_j - x_j).
Vector node_model_gradient(const QuadraticModel& m, const Partition& partition, int node,
                           const Vector& current);

// The colour-k block of the model gradient at the mixed point `current`,
// nodes concatenated in the order of partition.nodes_in_color(k).
Vector partial_model_gradient(const QuadraticModel& m, const Partition& partition, int color,
                              const Vector& current);

// Central differences with step h_i = rel_step * (1 + |x_i|).
Vector finite_difference_gradient(const NlpProblem& problem, const Vector& x,
                                  double rel_step = 1e-6);

// ||g_fd - g|| / max(1, ||g||).
double gradient_check_error(const NlpProblem& problem, const Vector& x, double rel_step = 1e-6);

}  // namespace trap

#endif  // TRAP_MODEL_HPP_
