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

#include "trap/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>

#include "trap/errors.hpp"

namespace trap {

void TrapParams::validate() const {
  if (!(delta0 > 0.0)) throw InvalidArgument("TrapParams: delta0 must be positive");
  if (!(0.0 < sigma1 && sigma1 < sigma2 && sigma2 < 1.0 && 1.0 < sigma3)) {
    throw InvalidArgument("TrapParams: need 0 < sigma1 < sigma2 < 1 < sigma3");
  }
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < 1.0)) {
    throw InvalidArgument("TrapParams: need 0 < eta1 < eta2 < 1");
  }
  if (!(epsilon > 0.0)) throw InvalidArgument("TrapParams: epsilon must be positive");
  if (max_iters < 0) throw InvalidArgument("TrapParams: max_iters must be nonnegative");
  cauchy.validate();
  refine.validate();
  if (refine.gamma2 < cauchy.nu2) throw InvalidArgument("TrapParams: gamma2 must be at least nu2");
}

const char* step_class_name(StepClass c) {
  switch (c) {
    case StepClass::kRejected: return "rejected";
    case StepClass::kSuccessful: return "successful";
    case StepClass::kVerySuccessful: return "very_successful";
  }
  return "unknown";
}

const char* trap_termination_name(TrapTermination t) {
  switch (t) {
    case TrapTermination::kKktTol: return "kkt_tol";
    case TrapTermination::kMaxIters: return "max_iters";
    case TrapTermination::kStagnation: return "stagnation";
  }
  return "unknown";
}

StepClass classify_step(double rho, const TrapParams& params) {
  if (!(rho >= params.eta1)) return StepClass::kRejected;
  if (rho <= params.eta2) return StepClass::kSuccessful;
  return StepClass::kVerySuccessful;
}

double update_radius(double delta, StepClass step, const TrapParams& params, double step_norm) {
  if (params.radius_policy == RadiusPolicy::kStepAware) {
    switch (step) {
      case StepClass::kRejected:
        return std::clamp(params.sigma2 * step_norm, params.sigma1 * delta, params.sigma2 * delta);
      case StepClass::kSuccessful: return delta;
      case StepClass::kVerySuccessful:
        return std::clamp(params.sigma3 * step_norm, delta, params.sigma3 * delta);
    }
  }
  switch (step) {
    case StepClass::kRejected: return params.sigma2 * delta;
    case StepClass::kSuccessful: return delta;
    case StepClass::kVerySuccessful: return params.sigma3 * delta;
  }
  return delta;
}

TrapReport trap_solve(const NlpProblem& problem, const Vector& x0, const TrapParams& params,
                      const TrapOptions& options) {
  params.validate();
  const BoxSet& box = problem.bounds();
  if (x0.size() != box.dimension()) throw InvalidArgument("trap_solve: x0 has wrong dimension");
  const Partition partition =
      options.partition ? *options.partition : greedy_coloring(problem.coupling(), problem.node_sizes());
  if (partition.dimension() != box.dimension()) {
    throw InvalidArgument("trap_solve: partition dimension differs from problem");
  }

  Vector x = x0;
  if (!box.contains(x)) {
    std::cerr << "trap_solve: initial point projected onto the box\n";
    x = project_box(x, box);
  }
  QuadraticModel model = build_model(problem, x);
  if (!std::isfinite(model.value)) throw SolverError("trap_solve: objective not finite at x0");
  double kkt = criticality(x, model.g, box);

  TrapReport rep;
  rep.initial_kkt = kkt;
  double delta = params.delta0;
  int iter = 0;
  while (kkt > params.epsilon && iter < params.max_iters) {
    ++iter;
    if (options.ledger) options.ledger->set_position(options.outer_index, iter);
    const CauchyResult cp = cauchy_sweep(model, partition, box, delta, params.cauchy, options.ledger);
    const RefineResult ref = scg_refine(model, partition, box, cp, delta, params.refine, options.ledger);
    rep.cumulative_cg += ref.cg_iterations;

    const Vector step = ref.y - x;
    const double pred = -(model.g.dot(step) + 0.5 * step.dot(model.B.hess_vec(step)));
    const double resolution = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(model.value));
    if (!(pred > 0.0)) {
      if (kkt <= 10.0 * params.epsilon) {
        --iter;
        rep.termination = TrapTermination::kKktTol;
        break;
      }
      if (cp.decrease <= resolution) {
        --iter;
        rep.termination = TrapTermination::kStagnation;
        break;
      }
      std::ostringstream msg;
      msg << "trap_solve: refinement produced no model decrease at iteration " << iter
          << " (criticality " << kkt << ", Cauchy decrease " << cp.decrease << ", step decrease "
          << pred << ", radius " << delta << ", " << termination_name(ref.termination) << ")";
      throw SolverError(msg.str());
    }
    const double ly = problem.value(ref.y);
    if (!std::isfinite(ly)) {
      std::ostringstream msg;
      msg << "trap_solve: objective not finite at trial point, iteration " << iter << ", y =";
      for (Eigen::Index i = 0; i < ref.y.size(); ++i) msg << ' ' << ref.y[i];
      throw SolverError(msg.str());
    }
    // Both differences are shifted by a few ulps of L so that rounding in
    // nearly converged iterations does not decide acceptance.
    const double rho = (model.value - ly + resolution) / (pred + resolution);
    if (options.ledger) {
      options.ledger->reduction(Phase::kRatioTest);
      options.ledger->broadcast(Phase::kRatioTest);
    }
    const StepClass cls = classify_step(rho, params);
    IterationRecord rec;
    rec.iter = iter;
    rec.delta = delta;
    rec.rho = rho;
    rec.step = cls;
    rec.model_decrease = pred;
    rec.cg_iterations = ref.cg_iterations;
    rec.cg_termination = ref.termination;
    if (cls != StepClass::kRejected) {
      x = ref.y;
      model = build_model(problem, x);
      model.value = ly;
      kkt = criticality(x, model.g, box);
    }
    delta = update_radius(delta, cls, params, step.lpNorm<Eigen::Infinity>());
    const ActiveSet act = active_set(x, box);
    rec.kkt = kkt;
    rec.objective = model.value;
    rec.active_size = act.size();
    rec.cumulative_cg = rep.cumulative_cg;
    rep.records.push_back(rec);
    if (options.keep_iterates) {
      rep.iterates.push_back(x);
      rep.active_sets.push_back(act);
    }
    if (options.on_iteration) options.on_iteration(rec);
  }
  rep.x = x;
  rep.objective = model.value;
  rep.kkt = kkt;
  rep.iterations = static_cast<int>(rep.records.size());
  if (kkt <= params.epsilon) rep.termination = TrapTermination::kKktTol;

  return rep;
}

std::string trace_csv_header() { return "iter,delta,rho,class,kkt,m_dec,L,active_size,cum_scg"; }

std::string trace_csv_row(const IterationRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%s,%.17g,%.17g,%.17g,%d,%ld", r.iter, r.delta,
                r.rho, step_class_name(r.step), r.kkt, r.model_decrease, r.objective,
                r.active_size, r.cumulative_cg);
  return buf;
}

}  // namespace trap
