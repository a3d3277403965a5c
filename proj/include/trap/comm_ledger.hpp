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

#ifndef TRAP_COMM_LEDGER_HPP_
#define TRAP_COMM_LEDGER_HPP_

#include <array>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "trap/blockspace.hpp"

namespace trap {

enum class Phase { kCauchy = 0, kScg = 1, kRatioTest = 2, kDualUpdate = 3 };
inline constexpr int kNumPhases = 4;
const char* phase_name(Phase phase);

struct CommCounters {
  long local_msgs = 0;
  long local_floats = 0;
  long reductions = 0;
  long broadcasts = 0;
  long barriers = 0;

  CommCounters& operator+=(const CommCounters& o);
  bool operator==(const CommCounters& o) const = default;
  bool empty() const { return *this == CommCounters{}; }
};

// Counts the messages the distributed execution would send. Neighbour
// exchanges are only legal along edges of the coupling graph.
class CommLedger {
 public:
  explicit CommLedger(CouplingGraph graph);

  // Subsequent events are attributed to (outer, iteration).
  void set_position(int outer, int iteration);

  void neighbour_exchange(int from, int to, int floats, Phase phase);
  void reduction(Phase phase, int count = 1);
  void broadcast(Phase phase, int count = 1);
  void barrier(Phase phase, int count = 1);

  CommCounters totals(Phase phase) const;
  CommCounters totals() const;
  CommCounters at(int outer, int iteration, Phase phase) const;
  bool empty() const;
  const CouplingGraph& graph() const { return graph_; }

  // Header: outer,iter,phase,local_msgs,local_floats,reductions,broadcasts,barriers
  std::string to_csv() const;

 private:
  CommCounters& slot(Phase phase);

  CouplingGraph graph_;
  mutable std::mutex mutex_;
  std::pair<int, int> position_{0, 0};
  std::map<std::pair<int, int>, std::array<CommCounters, kNumPhases>> rows_;
};

}  // namespace trap

#endif  // TRAP_COMM_LEDGER_HPP_
