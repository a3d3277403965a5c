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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "trap/driver.hpp"
#include "trap/errors.hpp"
#include "trap/qp.hpp"

namespace trap {
namespace {

QuadraticProblem separable_qp(int n, const BoxSet& box) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  Vector c(n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = 1.0 + i;
    c[i] = (i % 2 == 0 ? 1.0 : -2.0) * (i + 1);
  }
  return QuadraticProblem(H, c, std::vector<int>(n, 1), box);
}

TEST(TrapSolve, CriticalStartTakesNoIterations) {
  const QuadraticProblem qp = separable_qp(4, BoxSet::unbounded(4));
  const Vector x_star = -qp.H().diagonal().cwiseInverse().cwiseProduct(qp.c());
  const TrapReport r = trap_solve(qp, x_star, TrapParams{});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.termination, TrapTermination::kKktTol);
  EXPECT_EQ(r.x, x_star);
}

TEST(TrapSolve, SeparableQpReachesUnconstrainedMinimiser) {
  const int n = 6;
  const BoxSet box(Vector::Constant(n, -100.0), Vector::Constant(n, 100.0));
  const QuadraticProblem qp = separable_qp(n, box);
  TrapParams params;
  params.epsilon = 1e-10;
  const TrapReport r = trap_solve(qp, Vector::Zero(n), params);
  const Vector x_star = -qp.H().diagonal().cwiseInverse().cwiseProduct(qp.c());
  EXPECT_EQ(r.termination, TrapTermination::kKktTol);
  EXPECT_LE((r.x - x_star).norm(), 1e-8);
  ASSERT_FALSE(r.records.empty());
  EXPECT_EQ(r.records.back().step, StepClass::kVerySuccessful);
}

TEST(TrapSolve, MatchesEnumeratedBoxQpOptimum) {
  for (int seed = 0; seed < 30; ++seed) {
    const int n = 8 + seed % 13;
    const int nb = std::min(n, 4 + seed % 7);
    const BoxQpWithSolution f = box_qp_with_solution(seed, n, nb);
    const BoxSet& box = f.problem.bounds();
    const oracle::BoxQpSolution sol =
        oracle::enumerate_box_qp(f.problem.H(), f.problem.c(), box.lower, box.upper);
    ASSERT_LE((sol.x - f.x_star).norm(), 1e-9);
    TrapParams params;
    params.epsilon = 1e-9;
    TrapOptions options;
    options.keep_iterates = true;
    const TrapReport r = trap_solve(f.problem, f.x0, params, options);
    EXPECT_EQ(r.termination, TrapTermination::kKktTol);
    EXPECT_LE((r.x - sol.x).norm(), 1e-7) << "seed " << seed;
    ActiveSet expected;
    expected.at_lower = sol.at_lower;
    expected.at_upper = sol.at_upper;
    const int m = static_cast<int>(r.active_sets.size());
    ASSERT_GE(m, 4);
    for (int k = m - 4; k < m; ++k) EXPECT_EQ(r.active_sets[k], expected) << "seed " << seed << " iterate " << k;
  }
}

TEST(TrapSolve, IteratesFeasibleAndMonotone) {
  for (int seed = 0; seed < 40; ++seed) {
    const QpFixture f = random_colored_qp(seed, 1 + seed % 3, seed % 2 == 0, 40);
    TrapParams params;
    params.max_iters = 60;
    TrapOptions options;
    options.keep_iterates = true;
    options.partition = f.partition;
    const TrapReport r = trap_solve(f.problem, f.x0, params, options);
    const BoxSet& box = f.problem.bounds();
    Vector prev = project_box(f.x0, box);
    double prev_value = f.problem.value(prev);
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      const Vector& x = r.iterates[k];
      EXPECT_TRUE(box.contains(x));
      const double value = f.problem.value(x);
      if (r.records[k].step == StepClass::kRejected) {
        EXPECT_EQ(x, prev);
      } else {
        const double slack = 1e-13 * std::max(1.0, std::abs(prev_value));
        EXPECT_LE(value, prev_value - params.eta1 * r.records[k].model_decrease + slack)
            << "seed " << seed << " iteration " << k + 1;
      }
      prev = x;
      prev_value = value;
    }
    if (r.termination == TrapTermination::kKktTol) EXPECT_LE(r.kkt, params.epsilon);
  }
}

TEST(TrapSolve, NonFiniteTrialObjectiveIsReported) {
  class Cliff : public QuadraticProblem {
   public:
    using QuadraticProblem::QuadraticProblem;
    double value(const Vector& x) const override {
      return x[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : QuadraticProblem::value(x);
    }
  };
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(1, 1);
  Vector c(1);
  c << -10.0;
  const Cliff problem(H, c, {1}, BoxSet::unbounded(1));
  EXPECT_THROW(trap_solve(problem, Vector::Zero(1), TrapParams{}), SolverError);
}

TEST(TrapParams, Validation) {
  TrapParams p;
  p.sigma2 = 0.2;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = TrapParams{};
  p.eta1 = 0.95;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = TrapParams{};
  p.sigma3 = 1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(StepClassification, BoundariesAreSuccessful) {
  const TrapParams p;
  EXPECT_EQ(classify_step(p.eta1, p), StepClass::kSuccessful);
  EXPECT_EQ(classify_step(p.eta2, p), StepClass::kSuccessful);
  EXPECT_EQ(classify_step(std::nextafter(p.eta1, 0.0), p), StepClass::kRejected);
  EXPECT_EQ(classify_step(std::nextafter(p.eta2, 1.0), p), StepClass::kVerySuccessful);
  EXPECT_EQ(classify_step(-3.0, p), StepClass::kRejected);
  EXPECT_EQ(classify_step(std::numeric_limits<double>::quiet_NaN(), p), StepClass::kRejected);
}

TEST(RadiusUpdate, EndpointPolicy) {
  TrapParams p;
  p.radius_policy = RadiusPolicy::kEndpoint;
  EXPECT_DOUBLE_EQ(update_radius(2.0, StepClass::kRejected, p), 1.0);
  EXPECT_DOUBLE_EQ(update_radius(2.0, StepClass::kSuccessful, p), 2.0);
  EXPECT_DOUBLE_EQ(update_radius(2.0, StepClass::kVerySuccessful, p), 4.0);
}

TEST(RadiusUpdate, StaysInAdmissibleIntervals) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rho_dist(-1.0, 1.5), frac(0.0, 1.1);
  for (RadiusPolicy policy : {RadiusPolicy::kEndpoint, RadiusPolicy::kStepAware}) {
    TrapParams p;
    p.radius_policy = policy;
    double delta = 1.0;
    for (int k = 0; k < 10000; ++k) {
      const double rho = rho_dist(rng);
      const double step = frac(rng) * p.refine.gamma2 * delta;
      const StepClass cls = classify_step(rho, p);
      const double next = update_radius(delta, cls, p, step);
      switch (cls) {
        case StepClass::kRejected:
          EXPECT_GE(next, p.sigma1 * delta);
          EXPECT_LE(next, p.sigma2 * delta);
          break;
        case StepClass::kSuccessful:
          EXPECT_GE(next, p.sigma1 * delta);
          EXPECT_LE(next, p.sigma3 * delta);
          break;
        case StepClass::kVerySuccessful:
          EXPECT_GE(next, delta);
          EXPECT_LE(next, p.sigma3 * delta);
          break;
      }
      delta = std::clamp(next, 1e-6, 1e6);
    }
  }
}

// Geometric mean of ‖x^{l+1} − x*‖ / ‖x^l − x*‖ over the last five iterations
// above the rounding floor.
double tail_rate(const BoxQpWithSolution& f, double sigma) {
  TrapParams params;
  params.epsilon = 1e-9;
  params.refine.sigma = sigma;
  TrapOptions options;
  options.keep_iterates = true;
  const TrapReport r = trap_solve(f.problem, f.x0, params, options);
  std::vector<double> err{(f.x0 - f.x_star).norm()};
  for (const Vector& x : r.iterates) {
    err.push_back((x - f.x_star).norm());
    if (err.back() < 1e-10 * err.front()) break;
  }
  const int last = static_cast<int>(err.size()) - 1;
  const int k = std::min(5, last);
  return std::pow(err[last] / err[last - k], 1.0 / k);
}

TEST(TrapSolve, LocalRateImprovesAsRegularisationVanishes) {
  double log_small = 0.0, log_large = 0.0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    const BoxQpWithSolution f = box_qp_with_solution(seed, 20, 10);
    const double small = tail_rate(f, 1e-10);
    const double large = tail_rate(f, 1e-2);
    EXPECT_LE(small, 0.1) << "seed " << seed;
    log_small += std::log(small);
    log_large += std::log(large);
  }
  EXPECT_GT(log_large / runs, log_small / runs + std::log(1.5));
}

TEST(TrapSolve, TraceCsvRows) {
  EXPECT_EQ(trace_csv_header(), "iter,delta,rho,class,kkt,m_dec,L,active_size,cum_scg");
  IterationRecord r;
  r.iter = 3;
  r.delta = 0.5;
  r.rho = 1.0;
  r.step = StepClass::kVerySuccessful;
  r.kkt = 0.25;
  r.model_decrease = 2.0;
  r.objective = -1.5;
  r.active_size = 4;
  r.cumulative_cg = 17;
  EXPECT_EQ(trace_csv_row(r), "3,0.5,1," + std::string(step_class_name(StepClass::kVerySuccessful)) +
                                  ",0.25,2,-1.5,4,17");
}

TEST(TrapSolve, ReportsIterationCallback) {
  const QpFixture f = random_colored_qp(3, 2, true, 20);
  int calls = 0;
  TrapOptions options;
  options.on_iteration = [&](const IterationRecord& rec) { EXPECT_EQ(rec.iter, ++calls); };
  const TrapReport r = trap_solve(f.problem, f.x0, TrapParams{}, options);
  EXPECT_EQ(calls, r.iterations);
  EXPECT_EQ(r.records.empty() ? 0L : r.records.back().cumulative_cg, r.cumulative_cg);
}

}  // namespace
}  // namespace trap
