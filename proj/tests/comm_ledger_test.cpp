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

#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "trap/auglag.hpp"
#include "trap/comm_ledger.hpp"
#include "trap/driver.hpp"
#include "trap/errors.hpp"
#include "trap/opf.hpp"
#include "trap/opf_case.hpp"
#include "trap/qp.hpp"

namespace trap {
namespace {

CouplingGraph path_graph(int n) {
  CouplingGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

TEST(CommLedger, NonEdgeExchangeNamesPair) {
  CommLedger ledger(path_graph(4));
  EXPECT_NO_THROW(ledger.neighbour_exchange(1, 2, 3, Phase::kCauchy));
  try {
    ledger.neighbour_exchange(0, 3, 1, Phase::kCauchy);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find('0'), std::string::npos);
    EXPECT_NE(what.find('3'), std::string::npos);
  }
}

TEST(CommLedger, CountersAndAttribution) {
  CommLedger ledger(path_graph(3));
  EXPECT_TRUE(ledger.empty());
  ledger.set_position(1, 1);
  ledger.neighbour_exchange(0, 1, 4, Phase::kCauchy);
  ledger.barrier(Phase::kCauchy);
  ledger.reduction(Phase::kScg, 2);
  ledger.broadcast(Phase::kScg);
  ledger.set_position(1, 2);
  ledger.reduction(Phase::kRatioTest);
  EXPECT_FALSE(ledger.empty());
  EXPECT_EQ(ledger.totals(Phase::kCauchy).local_msgs, 1);
  EXPECT_EQ(ledger.totals(Phase::kCauchy).local_floats, 4);
  EXPECT_EQ(ledger.totals(Phase::kCauchy).barriers, 1);
  EXPECT_EQ(ledger.at(1, 1, Phase::kScg).reductions, 2);
  EXPECT_EQ(ledger.at(1, 2, Phase::kScg).reductions, 0);
  CommCounters sum;
  for (int p = 0; p < kNumPhases; ++p) sum += ledger.totals(static_cast<Phase>(p));
  EXPECT_EQ(sum, ledger.totals());
}

TEST(CommLedger, CsvExport) {
  CommLedger ledger(path_graph(2));
  ledger.set_position(2, 5);
  ledger.reduction(Phase::kDualUpdate);
  ledger.broadcast(Phase::kDualUpdate);
  EXPECT_EQ(ledger.to_csv(),
            "outer,iter,phase,local_msgs,local_floats,reductions,broadcasts,barriers\n"
            "2,5," + std::string(phase_name(Phase::kDualUpdate)) + ",0,0,1,1,0\n");
}

TEST(CommLedger, ConcurrentUpdatesAreCounted) {
  CommLedger ledger(path_graph(2));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int k = 0; k < 1000; ++k) ledger.neighbour_exchange(0, 1, 1, Phase::kCauchy);
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ledger.totals(Phase::kCauchy).local_msgs, 8000);
}

TEST(CommLedger, ZeroIterationSolveLeavesLedgerEmpty) {
  const int n = 3;
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  const QuadraticProblem qp(H, Vector::Zero(n), std::vector<int>(n, 1), BoxSet::unbounded(n));
  CommLedger ledger(qp.coupling());
  TrapOptions options;
  options.ledger = &ledger;
  const TrapReport r = trap_solve(qp, Vector::Zero(n), TrapParams{}, options);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(ledger.empty());
}

struct NineBusSubproblem {
  OpfProblem opf;
  Partition partition;
  Vector x0;
};

NineBusSubproblem nine_bus() {
  const NetworkCase net = parse_case_file(std::string(TRAP_CASE_DIR) + "/case9.m");
  OpfProblem p = build_polar_opf(net);
  Partition part = opf_coloring(p.layout(), net);
  Vector x0 = opf_flat_start(p);
  return {std::move(p), std::move(part), std::move(x0)};
}

TEST(CommLedger, NineBusSolveCounts) {
  const NineBusSubproblem s = nine_bus();
  const AugLagOracle oracle = auglag_oracle(s.opf, Vector::Zero(s.opf.num_constraints()), 10.0);
  CommLedger ledger(oracle.coupling());
  TrapParams params;
  params.max_iters = 40;
  TrapOptions options;
  options.ledger = &ledger;
  options.partition = s.partition;
  const TrapReport r = trap_solve(oracle, s.x0, params, options);
  ASSERT_GT(r.iterations, 0);
  const CommCounters cauchy = ledger.totals(Phase::kCauchy);
  EXPECT_EQ(cauchy.reductions, 0);
  EXPECT_EQ(cauchy.broadcasts, 0);
  EXPECT_EQ(cauchy.barriers, 5L * r.iterations);
  EXPECT_GT(cauchy.local_msgs, 0);
  const CommCounters scg = ledger.totals(Phase::kScg);
  EXPECT_EQ(scg.reductions, 2 * r.cumulative_cg);
  EXPECT_EQ(scg.broadcasts, r.cumulative_cg);
  const CommCounters ratio = ledger.totals(Phase::kRatioTest);
  EXPECT_EQ(ratio.reductions, r.iterations);
  EXPECT_EQ(ratio.broadcasts, r.iterations);
  for (const IterationRecord& rec : r.records) {
    const CommCounters it = ledger.at(0, rec.iter, Phase::kScg);
    EXPECT_EQ(it.reductions, 2L * rec.cg_iterations);
    EXPECT_EQ(it.broadcasts, rec.cg_iterations);
  }
}

TEST(CommLedger, DeterministicAcrossRuns) {
  const NineBusSubproblem s = nine_bus();
  OuterParams params;
  params.max_outer = 2;
  params.inner.max_iters = 30;
  std::string first;
  for (int run = 0; run < 2; ++run) {
    CommLedger ledger(lagrangian_coupling(s.opf));
    OuterOptions options;
    options.ledger = &ledger;
    options.partition = s.partition;
    auglag_outer(s.opf, s.x0, params, options);
    EXPECT_GT(ledger.totals(Phase::kDualUpdate).reductions, 0);
    if (run == 0) {
      first = ledger.to_csv();
    } else {
      EXPECT_EQ(ledger.to_csv(), first);
    }
  }
}

}  // namespace
}  // namespace trap
