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

#ifndef TRAP_AUGLAG_HPP_
#define TRAP_AUGLAG_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trap/driver.hpp"
#include "trap/model.hpp"

namespace trap {

using SparseRow = std::vector<std::pair<int, double>>;

// min f(x) s.t. c(x) = 0, x in a box.
class EqualityNlp {
 public:
  virtual ~EqualityNlp() = default;

  virtual const std::vector<int>& node_sizes() const = 0;
  virtual const BoxSet& bounds() const = 0;
  virtual int num_constraints() const = 0;
  // Nodes whose variables appear in constraint j (structural).
  virtual const std::vector<std::vector<int>>& constraint_nodes() const = 0;
  // Node pairs coupled by the objective alone.
  virtual const CouplingGraph& objective_coupling() const = 0;

  virtual double objective(const Vector& x) const = 0;
  virtual Vector objective_gradient(const Vector& x) const = 0;
  virtual void add_objective_hessian(const Vector& x, double scale, BlockSparseMatrix& H) const = 0;

  virtual Vector constraints(const Vector& x) const = 0;
  virtual std::vector<SparseRow> jacobian(const Vector& x) const = 0;
  // H += Σ_j weights_j ∇²c_j(x).
  virtual void add_constraint_hessians(const Vector& x, const Vector& weights,
                                       BlockSparseMatrix& H) const = 0;

  int dimension() const { return bounds().dimension(); }
};

// Objective coupling plus every pair of nodes sharing a constraint.
CouplingGraph lagrangian_coupling(const EqualityNlp& p);

Eigen::MatrixXd dense_jacobian(const EqualityNlp& p, const Vector& x);
// max_j ||∇c_j(fd) - ∇c_j|| / max(1, ||∇c_j||), central differences.
double jacobian_check_error(const EqualityNlp& p, const Vector& x, double rel_step = 1e-6);

// L(x) = f + μᵀc + (ϱ/2)||c||².
class AugLagOracle : public NlpProblem {
 public:
  AugLagOracle(const EqualityNlp& p, Vector mu, double rho);
  AugLagOracle(const EqualityNlp& p, Vector mu, double rho, CouplingGraph coupling);

  const std::vector<int>& node_sizes() const override { return p_->node_sizes(); }
  const CouplingGraph& coupling() const override { return coupling_; }
  const BoxSet& bounds() const override { return p_->bounds(); }

  double value(const Vector& x) const override;
  Vector gradient(const Vector& x) const override;
  BlockSparseMatrix hessian(const Vector& x) const override;

  const Vector& mu() const { return mu_; }
  double rho() const { return rho_; }

 private:
  const EqualityNlp* p_;
  Vector mu_;
  double rho_;
  CouplingGraph coupling_;
};

AugLagOracle auglag_oracle(const EqualityNlp& p, const Vector& mu, double rho);

struct OuterParams {
  double rho0 = 10.0;
  double factor = 30.0;
  double outer_tol = 1e-7;
  int max_outer = 30;
  // Also demand inner criticality <= inner.epsilon before stopping.
  bool require_inner_kkt = true;
  TrapParams inner;
  // LANCELOT tolerance schedule.
  double omega_init = 1.0;
  double eta_init = 1.0;
  double omega_exponent = 1.0;
  double eta_success_exponent = 0.9;
  double eta_reset_exponent = 0.1;

  void validate() const;
};

enum class OuterTermination { kConverged, kMaxOuter };
const char* outer_termination_name(OuterTermination t);

struct OuterRow {
  int outer = 0;
  int inner_iters = 0;
  long cum_scg = 0;  // sCG iterations spent in this outer iteration
  double inner_kkt = 0.0;
  double constraint_norm = 0.0;
  double rho = 0.0;  // penalty used by the inner solve
  double inner_tol = 0.0;
  std::string update;  // "multiplier" or "penalty"
  TrapTermination inner_termination = TrapTermination::kMaxIters;
};

struct OuterReport {
  std::vector<OuterRow> rows;
  Vector x;
  Vector mu;
  double rho = 0.0;
  double objective = 0.0;
  double constraint_norm = 0.0;
  long total_scg = 0;
  OuterTermination termination = OuterTermination::kMaxOuter;
  // Inner iteration records per outer iteration.
  std::vector<std::vector<IterationRecord>> inner_traces;
};

struct OuterOptions {
  std::optional<Partition> partition;
  CommLedger* ledger = nullptr;
  std::optional<Vector> mu0;
};

OuterReport auglag_outer(const EqualityNlp& p, const Vector& x0, const OuterParams& params,
                         const OuterOptions& options = {});
OuterReport lancelot_outer(const EqualityNlp& p, const Vector& x0, const OuterParams& params,
                           const OuterOptions& options = {});

// Header: outer,inner_iters,cum_scg,inner_kkt,constraint_norm
std::string table_csv(const OuterReport& report);

}  // namespace trap

#endif  // TRAP_AUGLAG_HPP_
