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

#ifndef TRAP_DRIVER_HPP_
#define TRAP_DRIVER_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trap/cauchy.hpp"
#include "trap/comm_ledger.hpp"
#include "trap/model.hpp"
#include "trap/refine.hpp"

namespace trap {

// Where inside the admissible interval the new radius is placed.
// kEndpoint: σ2Δ on rejection, Δ on success, σ3Δ on very successful steps.
// kStepAware: same intervals, but the radius follows ‖s‖∞ of the trial step
// so that it neither runs away from short steps nor shrinks slowly after it.
enum class RadiusPolicy { kEndpoint, kStepAware };

struct TrapParams {
  double delta0 = 1.0;
  double sigma1 = 0.25;
  double sigma2 = 0.5;
  double sigma3 = 2.0;
  double eta1 = 0.1;
  double eta2 = 0.9;
  double epsilon = 1e-5;
  int max_iters = 300;
  RadiusPolicy radius_policy = RadiusPolicy::kStepAware;
  CauchyParams cauchy;
  RefineParams refine;

  void validate() const;
};

enum class StepClass { kRejected, kSuccessful, kVerySuccessful };
const char* step_class_name(StepClass c);

// kStagnation: the attainable model decrease fell below the rounding level
// of L, so no trial point can be told apart from x.
enum class TrapTermination { kKktTol, kMaxIters, kStagnation };
const char* trap_termination_name(TrapTermination t);

struct IterationRecord {
  int iter = 0;
  double delta = 0.0;  // radius used for this iteration
  double rho = 0.0;
  StepClass step = StepClass::kRejected;
  double kkt = 0.0;  // criticality after the iteration
  double model_decrease = 0.0;
  double objective = 0.0;  // L after the iteration
  int active_size = 0;
  int cg_iterations = 0;
  long cumulative_cg = 0;
  CgTermination cg_termination = CgTermination::kConverged;
};

struct TrapReport {
  Vector x;
  double objective = 0.0;
  double kkt = 0.0;
  int iterations = 0;
  long cumulative_cg = 0;
  TrapTermination termination = TrapTermination::kMaxIters;
  double initial_kkt = 0.0;
  std::vector<IterationRecord> records;
  // x after every iteration (x^1, x^2, ...) when TrapOptions::keep_iterates.
  std::vector<Vector> iterates;
  std::vector<ActiveSet> active_sets;
};

struct TrapOptions {
  // Colouring used by the sweep; greedy colouring of the coupling graph when empty.
  std::optional<Partition> partition;
  CommLedger* ledger = nullptr;
  int outer_index = 0;
  bool keep_iterates = false;
  // Called after every iteration.
  std::function<void(const IterationRecord&)> on_iteration;
};

// Radius and acceptance rule of the trust-region test.
StepClass classify_step(double rho, const TrapParams& params);
// `step_norm` is ‖y − x‖∞ of the trial step; only kStepAware reads it.
double update_radius(double delta, StepClass step, const TrapParams& params, double step_norm = 0.0);

TrapReport trap_solve(const NlpProblem& problem, const Vector& x0, const TrapParams& params,
                      const TrapOptions& options = {});

// Header: iter,delta,rho,class,kkt,m_dec,L,active_size,cum_scg
std::string trace_csv_header();
std::string trace_csv_row(const IterationRecord& r);

}  // namespace trap

#endif  // TRAP_DRIVER_HPP_
