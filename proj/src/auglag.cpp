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

#include "trap/auglag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "trap/errors.hpp"

namespace trap {

CouplingGraph lagrangian_coupling(const EqualityNlp& p) {
  CouplingGraph g = p.objective_coupling();
  for (const auto& nodes : p.constraint_nodes()) {
    for (size_t a = 0; a < nodes.size(); ++a) {
      for (size_t b = a + 1; b < nodes.size(); ++b) {
        if (nodes[a] != nodes[b]) g.add_edge(nodes[a], nodes[b]);
      }
    }
  }
  return g;
}

Eigen::MatrixXd dense_jacobian(const EqualityNlp& p, const Vector& x) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(p.num_constraints(), p.dimension());
  const auto rows = p.jacobian(x);
  for (size_t j = 0; j < rows.size(); ++j) {
    for (const auto& [col, v] : rows[j]) J(static_cast<int>(j), col) += v;
  }
  return J;
}

double jacobian_check_error(const EqualityNlp& p, const Vector& x, double rel_step) {
  const Eigen::MatrixXd J = dense_jacobian(p, x);
  Eigen::MatrixXd fd(J.rows(), J.cols());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::abs(x[i]));
    xp[i] = x[i] + h;
    const Vector cp = p.constraints(xp);
    xp[i] = x[i] - h;
    const Vector cm = p.constraints(xp);
    xp[i] = x[i];
    fd.col(i) = (cp - cm) / (2.0 * h);
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < J.rows(); ++j) {
    worst = std::max(worst, (fd.row(j) - J.row(j)).norm() / std::max(1.0, J.row(j).norm()));
  }
  return worst;
}

AugLagOracle::AugLagOracle(const EqualityNlp& p, Vector mu, double rho)
    : AugLagOracle(p, std::move(mu), rho, lagrangian_coupling(p)) {}

AugLagOracle::AugLagOracle(const EqualityNlp& p, Vector mu, double rho, CouplingGraph coupling)
    : p_(&p), mu_(std::move(mu)), rho_(rho), coupling_(std::move(coupling)) {
  if (!(rho_ > 0.0)) throw InvalidArgument("auglag_oracle: penalty must be positive");
  if (mu_.size() != p.num_constraints()) throw InvalidArgument("auglag_oracle: multiplier size mismatch");
}

double AugLagOracle::value(const Vector& x) const {
  const Vector c = p_->constraints(x);
  return p_->objective(x) + mu_.dot(c) + 0.5 * rho_ * c.squaredNorm();
}

Vector AugLagOracle::gradient(const Vector& x) const {
  const Vector c = p_->constraints(x);
  const Vector w = mu_ + rho_ * c;
  Vector g = p_->objective_gradient(x);
  const auto rows = p_->jacobian(x);
  for (size_t j = 0; j < rows.size(); ++j) {
    for (const auto& [col, v] : rows[j]) g[col] += w[static_cast<int>(j)] * v;
  }
  return g;
}

BlockSparseMatrix AugLagOracle::hessian(const Vector& x) const {
  BlockSparseMatrix H(p_->node_sizes(), coupling_);
  p_->add_objective_hessian(x, 1.0, H);
  const Vector c = p_->constraints(x);
  p_->add_constraint_hessians(x, mu_ + rho_ * c, H);
  const auto rows = p_->jacobian(x);
  for (const auto& row : rows) {
    for (size_t a = 0; a < row.size(); ++a) {
      for (size_t b = a; b < row.size(); ++b) {
        double v = rho_ * row[a].second * row[b].second;
        // Off-diagonal pairs appear twice in JᵀJ; a repeated column is a
        // single entry counted once per ordered pair.
        if (a != b && row[a].first == row[b].first) v *= 2.0;
        H.add_symmetric(row[a].first, row[b].first, v);
      }
    }
  }
  return H;
}

AugLagOracle auglag_oracle(const EqualityNlp& p, const Vector& mu, double rho) {
  return AugLagOracle(p, mu, rho);
}

void OuterParams::validate() const {
  if (!(rho0 > 0.0)) throw InvalidArgument("OuterParams: rho0 must be positive");
  if (!(factor > 1.0)) throw InvalidArgument("OuterParams: factor must exceed 1");
  if (!(outer_tol > 0.0)) throw InvalidArgument("OuterParams: outer_tol must be positive");
  if (max_outer <= 0) throw InvalidArgument("OuterParams: max_outer must be positive");
  inner.validate();
}

const char* outer_termination_name(OuterTermination t) {
  return t == OuterTermination::kConverged ? "converged" : "max_outer";
}

namespace {

void account_dual_update(CommLedger* ledger, const std::vector<int>& sizes, int outer) {
  if (!ledger) return;
  ledger->set_position(outer, 0);
  for (const auto& [i, j] : ledger->graph().edges()) {
    ledger->neighbour_exchange(i, j, sizes[i], Phase::kDualUpdate);
    ledger->neighbour_exchange(j, i, sizes[j], Phase::kDualUpdate);
  }
  ledger->reduction(Phase::kDualUpdate);
  ledger->broadcast(Phase::kDualUpdate);
}

struct InnerOutcome {
  TrapReport report;
  Vector c;
  double cnorm = 0.0;
};

InnerOutcome inner_solve(const EqualityNlp& p, const CouplingGraph& coupling,
                         const Partition& partition, const Vector& x, const Vector& mu,
                         double rho, const TrapParams& inner, const OuterOptions& options,
                         int outer) {
  AugLagOracle oracle(p, mu, rho, coupling);
  TrapOptions topt;
  topt.partition = partition;
  topt.ledger = options.ledger;
  topt.outer_index = outer;
  InnerOutcome out;
  out.report = trap_solve(oracle, x, inner, topt);
  out.c = p.constraints(out.report.x);
  out.cnorm = out.c.norm();
  return out;
}

OuterRow make_row(int outer, const InnerOutcome& o, double rho, double tol) {
  OuterRow row;
  row.outer = outer;
  row.inner_iters = o.report.iterations;
  row.cum_scg = o.report.cumulative_cg;
  row.inner_kkt = o.report.kkt;
  row.constraint_norm = o.cnorm;
  row.rho = rho;
  row.inner_tol = tol;
  row.inner_termination = o.report.termination;
  return row;
}

struct Setup {
  CouplingGraph coupling;
  Partition partition;
  Vector mu;
};

Setup setup(const EqualityNlp& p, const OuterParams& params, const OuterOptions& options) {
  params.validate();
  Setup s;
  s.coupling = lagrangian_coupling(p);
  s.partition = options.partition ? *options.partition : greedy_coloring(s.coupling, p.node_sizes());
  s.mu = options.mu0 ? *options.mu0 : Vector::Zero(p.num_constraints());
  if (s.mu.size() != p.num_constraints()) throw InvalidArgument("outer loop: mu0 size mismatch");
  return s;
}

void finish(OuterReport& rep, const EqualityNlp& p, const Vector& x, const Vector& mu, double rho) {
  rep.x = x;
  rep.mu = mu;
  rep.rho = rho;
  rep.objective = p.objective(x);
  rep.constraint_norm = p.constraints(x).norm();
  for (const auto& r : rep.rows) rep.total_scg += r.cum_scg;
}

}  // namespace

OuterReport auglag_outer(const EqualityNlp& p, const Vector& x0, const OuterParams& params,
                         const OuterOptions& options) {
  Setup s = setup(p, params, options);
  OuterReport rep;
  Vector x = x0;
  double rho = params.rho0;
  for (int j = 1; j <= params.max_outer; ++j) {
    InnerOutcome o = inner_solve(p, s.coupling, s.partition, x, s.mu, rho, params.inner, options, j);
    x = o.report.x;
    OuterRow row = make_row(j, o, rho, params.inner.epsilon);
    s.mu += rho * o.c;
    account_dual_update(options.ledger, p.node_sizes(), j);
    rep.inner_traces.push_back(o.report.records);
    const bool done = o.cnorm <= params.outer_tol &&
                      (!params.require_inner_kkt || o.report.kkt <= params.inner.epsilon);
    row.update = "multiplier";
    rep.rows.push_back(row);
    if (done) {
      rep.termination = OuterTermination::kConverged;
      break;
    }
    rho *= params.factor;
  }
  finish(rep, p, x, s.mu, rho);
  return rep;
}

OuterReport lancelot_outer(const EqualityNlp& p, const Vector& x0, const OuterParams& params,
                           const OuterOptions& options) {
  Setup s = setup(p, params, options);
  OuterReport rep;
  Vector x = x0;
  double rho = params.rho0;
  // Tolerances shrink by at least a factor 10 per tightening, even for ϱ < 10.
  const auto shrink_base = [&rho] { return std::max(rho, 10.0); };
  double omega = params.omega_init / std::pow(shrink_base(), params.omega_exponent);
  double eta = params.eta_init / std::pow(shrink_base(), params.eta_reset_exponent);
  for (int j = 1; j <= params.max_outer; ++j) {
    TrapParams inner = params.inner;
    inner.epsilon = std::max(omega, params.inner.epsilon);
    InnerOutcome o = inner_solve(p, s.coupling, s.partition, x, s.mu, rho, inner, options, j);
    x = o.report.x;
    OuterRow row = make_row(j, o, rho, inner.epsilon);
    rep.inner_traces.push_back(o.report.records);
    account_dual_update(options.ledger, p.node_sizes(), j);
    const bool done = o.cnorm <= params.outer_tol &&
                      (!params.require_inner_kkt || o.report.kkt <= params.inner.epsilon);
    if (o.cnorm <= eta || done) {
      s.mu += rho * o.c;
      omega /= std::pow(shrink_base(), params.omega_exponent);
      eta /= std::pow(shrink_base(), params.eta_success_exponent);
      row.update = "multiplier";
    } else {
      rho *= params.factor;
      omega = params.omega_init / std::pow(shrink_base(), params.omega_exponent);
      eta = params.eta_init / std::pow(shrink_base(), params.eta_reset_exponent);
      row.update = "penalty";
    }
    rep.rows.push_back(row);
    if (done) {
      rep.termination = OuterTermination::kConverged;
      break;
    }
  }
  finish(rep, p, x, s.mu, rho);
  return rep;
}

std::string table_csv(const OuterReport& report) {
  std::ostringstream out;
  out << "outer,inner_iters,cum_scg,inner_kkt,constraint_norm\n";
  char buf[256];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%ld,%.6e,%.6e\n", r.outer, r.inner_iters, r.cum_scg,
                  r.inner_kkt, r.constraint_norm);
    out << buf;
  }
  return out.str();
}

}  // namespace trap
