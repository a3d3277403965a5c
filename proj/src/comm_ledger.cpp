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

#include "trap/comm_ledger.hpp"

#include <sstream>

#include "trap/errors.hpp"

namespace trap {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::kCauchy: return "cauchy";
    case Phase::kScg: return "scg";
    case Phase::kRatioTest: return "ratio_test";
    case Phase::kDualUpdate: return "dual_update";
  }
  return "unknown";
}

CommCounters& CommCounters::operator+=(const CommCounters& o) {
  local_msgs += o.local_msgs;
  local_floats += o.local_floats;
  reductions += o.reductions;
  broadcasts += o.broadcasts;
  barriers += o.barriers;
  return *this;
}

CommLedger::CommLedger(CouplingGraph graph) : graph_(std::move(graph)) {}

void CommLedger::set_position(int outer, int iteration) {
  std::lock_guard<std::mutex> lock(mutex_);
  position_ = {outer, iteration};
}

CommCounters& CommLedger::slot(Phase phase) {
  return rows_[position_][static_cast<int>(phase)];
}

void CommLedger::neighbour_exchange(int from, int to, int floats, Phase phase) {
  if (!graph_.has_edge(from, to)) {
    throw InvalidArgument("CommLedger: nodes " + std::to_string(from) + " and " +
                          std::to_string(to) + " are not neighbours");
  }
  std::lock_guard<std::mutex> lock(mutex_);
  auto& c = slot(phase);
  c.local_msgs += 1;
  c.local_floats += floats;
}

void CommLedger::reduction(Phase phase, int count) {
  std::lock_guard<std::mutex> lock(mutex_);
  slot(phase).reductions += count;
}

void CommLedger::broadcast(Phase phase, int count) {
  std::lock_guard<std::mutex> lock(mutex_);
  slot(phase).broadcasts += count;
}

void CommLedger::barrier(Phase phase, int count) {
  std::lock_guard<std::mutex> lock(mutex_);
  slot(phase).barriers += count;
}

CommCounters CommLedger::totals(Phase phase) const {
  std::lock_guard<std::mutex> lock(mutex_);
  CommCounters sum;
  for (const auto& [key, row] : rows_) sum += row[static_cast<int>(phase)];
  return sum;
}

CommCounters CommLedger::totals() const {
  CommCounters sum;
  for (int p = 0; p < kNumPhases; ++p) sum += totals(static_cast<Phase>(p));
  return sum;
}

CommCounters CommLedger::at(int outer, int iteration, Phase phase) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = rows_.find({outer, iteration});
  if (it == rows_.end()) return {};
  return it->second[static_cast<int>(phase)];
}

bool CommLedger::empty() const { return totals().empty(); }

std::string CommLedger::to_csv() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::ostringstream out;
  out << "outer,iter,phase,local_msgs,local_floats,reductions,broadcasts,barriers\n";
  for (const auto& [key, row] : rows_) {
    for (int p = 0; p < kNumPhases; ++p) {
      const auto& c = row[p];
      if (c.empty()) continue;
      out << key.first << ',' << key.second << ',' << phase_name(static_cast<Phase>(p)) << ','
          << c.local_msgs << ',' << c.local_floats << ',' << c.reductions << ','
          << c.broadcasts << ',' << c.barriers << '\n';
    }
  }
  return out.str();
}

}  // namespace trap
