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

#include "trap/refine.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <memory>

#include "trap/errors.hpp"

namespace trap {
namespace {

constexpr double kBreakdown = 1e-30;

Vector masked(const Vector& v, const std::vector<char>& mask) {
  Vector out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!mask[i]) out[i] = 0.0;
  }
  return out;
}

void account_product(CommLedger* ledger, const Partition& partition) {
  if (!ledger) return;
  for (const auto& [i, j] : ledger->graph().edges()) {
    ledger->neighbour_exchange(i, j, partition.node_size(i), Phase::kScg);
    ledger->neighbour_exchange(j, i, partition.node_size(j), Phase::kScg);
  }
}

}  // namespace

void RefineParams::validate() const {
  if (!(sigma >= 0.0)) throw InvalidArgument("RefineParams: sigma must be nonnegative");
  if (!(xi >= 0.0 && xi < 1.0)) throw InvalidArgument("RefineParams: xi must lie in [0,1)");
  if (!(gamma1 > 0.0 && gamma1 < 1.0)) throw InvalidArgument("RefineParams: gamma1 must lie in (0,1)");
  if (!(gamma2 >= 1.0)) throw InvalidArgument("RefineParams: gamma2 must be at least 1");
  if (max_cg_iters < 0) throw InvalidArgument("RefineParams: max_cg_iters must be nonnegative");
}

const char* termination_name(CgTermination t) {
  switch (t) {
    case CgTermination::kConverged: return "converged";
    case CgTermination::kNegativeCurvature: return "negative_curvature";
    case CgTermination::kBoundaryHit: return "boundary_hit";
    case CgTermination::kMaxIters: return "max_iters";
  }
  return "unknown";
}

RegularisedModel regularised_model(const QuadraticModel& model, const Vector& z, double sigma) {
  RegularisedModel r;
  r.g_sigma = model.g - sigma * (z - model.x);
  r.sigma = sigma;
  r.B = &model.B;
  return r;
}

BlockJacobiPreconditioner::BlockJacobiPreconditioner(const BlockSparseMatrix& B, double sigma,
                                                     const std::vector<char>& free_mask)
    : dimension_(B.dimension()) {
  for (int node = 0; node < B.num_nodes(); ++node) {
    Block blk;
    const int off = B.node_offset(node);
    for (int k = 0; k < B.node_sizes()[node]; ++k) {
      if (free_mask[off + k]) blk.index.push_back(k);
    }
    if (blk.index.empty()) continue;
    const Eigen::MatrixXd full = B.diag_block(node);
    const int m = static_cast<int>(blk.index.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sub(a, b) = full(blk.index[a], blk.index[b]);
    }
    sub.diagonal().array() += sigma;
    blk.llt.compute(sub);
    double tau = 1e-8;
    int attempts = 0;
    while (blk.llt.info() != Eigen::Success && attempts < 200) {
      Eigen::MatrixXd shifted = sub;
      shifted.diagonal().array() += tau;
      blk.llt.compute(shifted);
      tau *= 2.0;
      ++attempts;
    }
    if (attempts > 0) ++shifted_;
    if (blk.llt.info() != Eigen::Success) {
      blk.identity = true;
      ++identity_;
      std::cerr << "warning: block-Jacobi block " << node << " not factorisable; using identity\n";
    }
    for (int& k : blk.index) k += off;
    blocks_.push_back(std::move(blk));
  }
}

Vector BlockJacobiPreconditioner::apply(const Vector& r) const {
  Vector out = Vector::Zero(dimension_);
  for (const auto& blk : blocks_) {
    const int m = static_cast<int>(blk.index.size());
    Vector rhs(m);
    for (int a = 0; a < m; ++a) rhs[a] = r[blk.index[a]];
    const Vector sol = blk.identity ? rhs : Vector(blk.llt.solve(rhs));
    for (int a = 0; a < m; ++a) out[blk.index[a]] = sol[a];
  }
  return out;
}

RefineResult scg_refine(const QuadraticModel& model, const Partition& partition,
                        const BoxSet& box, const CauchyResult& cauchy, double delta,
                        const RefineParams& params, CommLedger* ledger) {
  params.validate();
  const Vector& x = model.x;
  const Vector& z = cauchy.z;
  const int n = static_cast<int>(x.size());
  RefineResult res;
  res.y = z;

  std::vector<char> free(n, 1);
  for (int i : cauchy.active.at_lower) free[i] = 0;
  for (int i : cauchy.active.at_upper) free[i] = 0;
  const bool any_free = std::any_of(free.begin(), free.end(), [](char c) { return c != 0; });

  const RegularisedModel reg = regularised_model(model, z, params.sigma);
  const Vector p0 = z - x;
  res.regularised_values.push_back(reg.value(p0));
  if (!any_free) return res;

  const double radius = params.gamma2 * delta;
  Vector lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = std::max(box.lower[i], x[i] - radius);
    hi[i] = std::min(box.upper[i], x[i] + radius);
  }

  const double gnorm = masked(model.g, free).norm();
  res.forcing = params.xi > 0.0 ? params.xi : std::min(0.5, std::sqrt(gnorm));
  res.tolerance = res.forcing * gnorm;
  const int max_iters = params.max_cg_iters > 0 ? params.max_cg_iters : 5 * n;

  std::unique_ptr<BlockJacobiPreconditioner> pre;
  if (params.precondition) pre = std::make_unique<BlockJacobiPreconditioner>(model.B, params.sigma, free);
  auto precondition = [&](const Vector& r) { return pre ? pre->apply(r) : r; };
  auto op = [&](const Vector& v) { return masked(reg.apply(v), free); };

  Vector y = z;
  Vector r = -masked(model.g + model.B.hess_vec(p0), free);
  Vector w = precondition(r);
  double u = r.dot(w);
  double rnorm = r.norm();
  res.residual_history.push_back(rnorm);

  Vector p = Vector::Zero(n), v = Vector::Zero(n);
  double t = 0.0;
  double u_prev = u;
  bool done = rnorm <= res.tolerance;
  res.termination = CgTermination::kConverged;
  while (!done) {
    if (res.cg_iterations >= max_iters) {
      res.termination = CgTermination::kMaxIters;
      break;
    }
    const Vector s = op(w);
    account_product(ledger, partition);
    const double d = w.dot(s);
    if (ledger) ledger->reduction(Phase::kScg, pre ? 3 : 2);
    double beta = 0.0;
    if (res.cg_iterations == 0) {
      t = d;
    } else {
      beta = u / u_prev;
      t = d - beta * beta * t;
    }
    p = w + beta * p;
    v = s + beta * v;
    double a_max = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (!free[i] || p[i] == 0.0) continue;
      const double room = p[i] > 0.0 ? (hi[i] - y[i]) / p[i] : (lo[i] - y[i]) / p[i];
      a_max = std::min(a_max, std::max(room, 0.0));
    }
    if (ledger) ledger->broadcast(Phase::kScg);
    ++res.cg_iterations;

    if (t <= kBreakdown) {
      if (!std::isfinite(a_max)) throw SolverError("scg_refine: unbounded direction of negative curvature");
      y += a_max * p;
      res.termination = CgTermination::kNegativeCurvature;
      res.regularised_values.push_back(reg.value(y - x));
      break;
    }
    const double a = u / t;
    if (a >= a_max) {
      y += a_max * p;
      res.termination = CgTermination::kBoundaryHit;
      res.regularised_values.push_back(reg.value(y - x));
      break;
    }
    y += a * p;
    r -= a * v;
    w = precondition(r);
    u_prev = u;
    u = r.dot(w);
    rnorm = r.norm();
    res.residual_history.push_back(rnorm);
    res.regularised_values.push_back(reg.value(y - x));
    done = rnorm <= res.tolerance;
  }

  y = y.cwiseMax(lo).cwiseMin(hi);
  for (int i = 0; i < n; ++i) {
    if (!free[i]) y[i] = z[i];
  }
  const double mz = model_eval(model, z);
  const double my = model_eval(model, y);
  const double cauchy_decrease = model.value - mz;
  if (model.value - my < params.gamma1 * cauchy_decrease) {
    y = z;
    res.fell_back_to_cauchy = true;
  }
  res.y = y;
  res.model_decrease_from_cauchy = mz - model_eval(model, y);
  return res;
}

}  // namespace trap
