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

#ifndef TRAP_QP_HPP_
#define TRAP_QP_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "trap/auglag.hpp"
#include "trap/model.hpp"

namespace trap {

// 1/2 xᵀHx + cᵀx + c0 over a box; node coupling read off the blocks of H.
class QuadraticProblem : public NlpProblem {
 public:
  QuadraticProblem(Eigen::MatrixXd H, Vector c, std::vector<int> node_sizes, BoxSet box,
                   double c0 = 0.0);

  const std::vector<int>& node_sizes() const override { return sizes_; }
  const CouplingGraph& coupling() const override { return coupling_; }
  const BoxSet& bounds() const override { return box_; }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  BlockSparseMatrix hessian(const Vector& x) const override;

  const Eigen::MatrixXd& H() const { return H_; }
  const Vector& c() const { return c_; }

 private:
  Eigen::MatrixXd H_;
  Vector c_;
  double c0_;
  std::vector<int> sizes_;
  BoxSet box_;
  CouplingGraph coupling_;
};

// Quadratic plus a separable softplus term Σ w_i log(1 + exp(x_i)).
class SoftplusQuadratic : public NlpProblem {
 public:
  SoftplusQuadratic(Eigen::MatrixXd H, Vector c, Vector w, std::vector<int> node_sizes, BoxSet box);

  const std::vector<int>& node_sizes() const override { return base_.node_sizes(); }
  const CouplingGraph& coupling() const override { return base_.coupling(); }
  const BoxSet& bounds() const override { return base_.bounds(); }
  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  BlockSparseMatrix hessian(const Vector& x) const override;

 private:
  QuadraticProblem base_;
  Vector w_;
};

struct QpFixture {
  QuadraticProblem problem;
  Partition partition;
  Vector x0;
  double delta = 1.0;
};

// Random K-coloured QP with n <= max_n. For K >= 2 couplings join nodes of
// different colours only; for K = 1 the single colour is internally coupled
// (the centralised baseline). Convex fixtures are diagonally dominant.
QpFixture random_colored_qp(std::uint64_t seed, int num_colors, bool convex, int max_n = 50);

struct BoxQpWithSolution {
  QuadraticProblem problem;
  Vector x_star;
  Vector x0;
  ActiveSet active;
};

// Strictly convex QP of dimension n whose first `n_bounded` coordinates are
// boxed; the minimiser and a strictly complementary active pattern are chosen
// first and the linear term is derived from them.
BoxQpWithSolution box_qp_with_solution(std::uint64_t seed, int n, int n_bounded);

// min 1/2 xᵀHx + cᵀx s.t. A x = b (one variable per node).
class EqualityQp : public EqualityNlp {
 public:
  EqualityQp(Eigen::MatrixXd H, Vector c, Eigen::MatrixXd A, Vector b, BoxSet box);

  const std::vector<int>& node_sizes() const override { return sizes_; }
  const BoxSet& bounds() const override { return box_; }
  int num_constraints() const override { return static_cast<int>(b_.size()); }
  const std::vector<std::vector<int>>& constraint_nodes() const override { return incidence_; }
  const CouplingGraph& objective_coupling() const override { return objective_coupling_; }

  double objective(const Vector& x) const override;
  Vector objective_gradient(const Vector& x) const override;
  void add_objective_hessian(const Vector& x, double scale, BlockSparseMatrix& H) const override;
  Vector constraints(const Vector& x) const override;
  std::vector<SparseRow> jacobian(const Vector& x) const override;
  void add_constraint_hessians(const Vector& x, const Vector& weights,
                               BlockSparseMatrix& H) const override;

 private:
  Eigen::MatrixXd H_;
  Vector c_;
  Eigen::MatrixXd A_;
  Vector b_;
  BoxSet box_;
  std::vector<int> sizes_;
  std::vector<std::vector<int>> incidence_;
  CouplingGraph objective_coupling_;
};

// min 1/2 ||x||² s.t. Σ x_i = 1 in dimension n.
EqualityQp simplex_projection_qp(int n);

}  // namespace trap

#endif  // TRAP_QP_HPP_
