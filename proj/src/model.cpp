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

#include "trap/model.hpp"

#include <algorithm>
#include <cmath>

#include "trap/errors.hpp"

namespace trap {

QuadraticModel build_model(const NlpProblem& problem, const Vector& x) {
  QuadraticModel m;
  m.x = x;
  m.value = problem.value(x);
  m.g = problem.gradient(x);
  m.B = problem.hessian(x);
  return m;
}

double model_eval(const QuadraticModel& m, const Vector& xp) {
  if (xp.size() != m.x.size()) throw InvalidArgument("model_eval: dimension mismatch");
  const Vector p = xp - m.x;
  return m.value + m.g.dot(p) + 0.5 * p.dot(m.B.hess_vec(p));
}

Vector model_gradient(const QuadraticModel& m, const Vector& xp) {
  if (xp.size() != m.x.size()) throw InvalidArgument("model_gradient: dimension mismatch");
  return m.g + m.B.hess_vec(xp - m.x);
}

Vector node_model_gradient(const QuadraticModel& m, const Partition& partition, int node,
                           const Vector& current) {
  const Vector p = current - m.x;
  return partition.segment(m.g, node) + m.B.block_row_product(node, p);
}

Vector partial_model_gradient(const QuadraticModel& m, const Partition& partition, int color,
                              const Vector& current) {
  const auto& nodes = partition.nodes_in_color(color);
  int size = 0;
  for (int i : nodes) size += partition.node_size(i);
  Vector out(size);
  int pos = 0;
  for (int i : nodes) {
    out.segment(pos, partition.node_size(i)) = node_model_gradient(m, partition, i, current);
    pos += partition.node_size(i);
  }
  return out;
}

Vector finite_difference_gradient(const NlpProblem& problem, const Vector& x, double rel_step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = problem.value(xp);
    xp[i] = x[i] - h;
    const double fm = problem.value(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double gradient_check_error(const NlpProblem& problem, const Vector& x, double rel_step) {
  const Vector g = problem.gradient(x);
  const Vector fd = finite_difference_gradient(problem, x, rel_step);
  return (fd - g).norm() / std::max(1.0, g.norm());
}

}  // namespace trap
