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

#include "trap/cauchy.hpp"

#include <algorithm>
#include <cmath>

#include "trap/errors.hpp"

namespace trap {
namespace {

bool color_coupled(const BlockSparseMatrix& B, const Partition& partition, int color) {
  for (int i : partition.nodes_in_color(color)) {
    for (int j : B.row_nodes(i)) {
      if (j != i && partition.color_of(j) == color) return true;
    }
  }
  return false;
}

int unit_size(const Partition& partition, const std::vector<int>& unit) {
  int n = 0;
  for (int i : unit) n += partition.node_size(i);
  return n;
}

Vector gather(const Vector& v, const Partition& partition, const std::vector<int>& unit) {
  Vector out(unit_size(partition, unit));
  int pos = 0;
  for (int i : unit) {
    out.segment(pos, partition.node_size(i)) = partition.segment(v, i);
    pos += partition.node_size(i);
  }
  return out;
}

void scatter(Vector& v, const Partition& partition, const std::vector<int>& unit,
             const Vector& values) {
  int pos = 0;
  for (int i : unit) {
    partition.segment(v, i) = values.segment(pos, partition.node_size(i));
    pos += partition.node_size(i);
  }
}

// d^T B_uu d restricted to the unit's blocks.
double unit_curvature(const BlockSparseMatrix& B, const Partition& partition,
                      const std::vector<int>& unit, const Vector& d) {
  double total = 0.0;
  int pi = 0;
  for (int i : unit) {
    int pj = 0;
    for (int j : unit) {
      if (B.has_block(i, j)) {
        total += d.segment(pi, partition.node_size(i))
                     .dot(B.block(i, j) * d.segment(pj, partition.node_size(j)));
      }
      pj += partition.node_size(j);
    }
    pi += partition.node_size(i);
  }
  return total;
}

Vector unit_gradient(const QuadraticModel& model, const Partition& partition,
                     const std::vector<int>& unit, const Vector& current) {
  Vector out(unit_size(partition, unit));
  int pos = 0;
  for (int i : unit) {
    out.segment(pos, partition.node_size(i)) = node_model_gradient(model, partition, i, current);
    pos += partition.node_size(i);
  }
  return out;
}

}  // namespace

void CauchyParams::validate() const {
  if (!(nu0 > 0.0 && nu0 < 1.0)) throw InvalidArgument("CauchyParams: nu0 must lie in (0,1)");
  if (!(nu1 > 0.0 && nu1 < nu2)) throw InvalidArgument("CauchyParams: need 0 < nu1 < nu2");
  if (!(nu3 > 0.0 && nu3 < 1.0)) throw InvalidArgument("CauchyParams: nu3 must lie in (0,1)");
  if (!(nu4 > 0.0 && nu4 <= nu5)) throw InvalidArgument("CauchyParams: need 0 < nu4 <= nu5");
  if (max_backtracks <= 0) throw InvalidArgument("CauchyParams: max_backtracks must be positive");
}

double CauchyParams::chi() const {
  return nu0 * std::min({nu4, 2.0 * (1.0 - nu0), nu3 * nu1});
}

CauchyResult cauchy_sweep(const QuadraticModel& model, const Partition& partition,
                          const BoxSet& box, double delta, const CauchyParams& params,
                          CommLedger* ledger) {
  params.validate();
  if (!(delta > 0.0)) throw InvalidArgument("cauchy_sweep: radius must be positive");
  if (partition.dimension() != model.x.size() || box.dimension() != model.x.size()) {
    throw InvalidArgument("cauchy_sweep: dimension mismatch");
  }
  const int n_nodes = partition.num_nodes();
  CauchyResult r;
  r.z = model.x;
  r.alphas.assign(n_nodes, params.nu4);
  r.rejected_alphas.assign(n_nodes, 0.0);
  r.backtracks.assign(n_nodes, 0);
  r.num_colors = partition.num_colors();
  r.sweep_values.push_back(model.value);

  double running = model.value;
  for (int k = 0; k < partition.num_colors(); ++k) {
    std::vector<std::vector<int>> units;
    if (color_coupled(model.B, partition, k)) {
      units.push_back(partition.nodes_in_color(k));
    } else {
      for (int i : partition.nodes_in_color(k)) units.push_back({i});
    }
    for (const auto& unit : units) {
      const Vector gu = unit_gradient(model, partition, unit, r.z);
      const Vector xu = gather(model.x, partition, unit);
      const Vector lo = gather(box.lower, partition, unit);
      const Vector hi = gather(box.upper, partition, unit);
      double alpha = params.nu4;
      double rejected = 0.0;
      int q = 0;
      Vector d;
      double change = 0.0;
      while (true) {
        d = (xu - alpha * gu).cwiseMax(lo).cwiseMin(hi) - xu;
        const double lin = gu.dot(d);
        change = lin + 0.5 * unit_curvature(model.B, partition, unit, d);
        const bool inside = d.size() == 0 || d.lpNorm<Eigen::Infinity>() <= params.nu2 * delta;
        if (inside && change <= params.nu0 * lin) break;
        if (++q > params.max_backtracks) {
          throw BacktrackError(unit.front(), "cauchy_sweep: backtracking exhausted at node " +
                                                 std::to_string(unit.front()));
        }
        rejected = alpha;
        alpha *= params.nu3;
      }
      scatter(r.z, partition, unit, xu + d);
      running += change;
      for (int i : unit) {
        r.alphas[i] = alpha;
        r.rejected_alphas[i] = rejected;
        r.backtracks[i] = q;
      }
      r.units.push_back(unit);
    }
    r.sweep_values.push_back(running);
    if (ledger) {
      for (int i : partition.nodes_in_color(k)) {
        for (int j : ledger->graph().neighbours(i)) {
          if (partition.color_of(j) > k) {
            ledger->neighbour_exchange(i, j, partition.node_size(i), Phase::kCauchy);
          }
        }
      }
      ledger->barrier(Phase::kCauchy);
    }
  }
  // Projection is the last operation per block, so z is feasible up to
  // rounding in x + d; clamp to remove that.
  r.z = project_box(r.z, box);
  r.decrease = model.value - model_eval(model, r.z);
  r.active = active_set(r.z, box);
  return r;
}

bool check_block_decrease(const QuadraticModel& model, const Partition& partition,
                          const std::vector<int>& unit, const Vector& trial,
                          const Vector& mixed, double delta, const CauchyParams& params) {
  const Vector gu = unit_gradient(model, partition, unit, mixed);
  const Vector step = gather(trial, partition, unit) - gather(model.x, partition, unit);
  if (step.size() > 0 && step.lpNorm<Eigen::Infinity>() > params.nu2 * delta) return false;
  const double lhs = model_eval(model, trial) - model_eval(model, mixed);
  const double rhs = params.nu0 * gu.dot(step);
  const double slack = 1e-12 * (std::abs(model.value) + std::abs(lhs) + 1.0);
  return lhs <= rhs + slack;
}

double sufficient_decrease_bound(const CauchyResult& result, const QuadraticModel& model,
                                 const Partition& partition, double delta,
                                 const CauchyParams& params) {
  const double normb = model.B.norm_upper_bound();
  double sum = 0.0;
  for (const auto& unit : result.units) {
    const Vector d = gather(result.z, partition, unit) - gather(model.x, partition, unit);
    const double ratio = d.norm() / result.alphas[unit.front()];
    sum += ratio * std::min(delta, ratio / (1.0 + normb));
  }
  return params.chi() * sum;
}

double relative_error_bound(const CauchyResult& result, const QuadraticModel& model,
                            const Partition& partition, const Vector& gradient_at_z) {
  const double normb = model.B.norm_upper_bound();
  double sum = result.num_colors * normb * (result.z - model.x).norm();
  for (const auto& unit : result.units) {
    const Vector d = gather(result.z, partition, unit) - gather(model.x, partition, unit);
    sum += d.norm() / result.alphas[unit.front()];
    sum += (gather(gradient_at_z, partition, unit) - gather(model.g, partition, unit)).norm();
  }
  return sum;
}

}  // namespace trap
