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

#ifndef TRAP_CAUCHY_HPP_
#define TRAP_CAUCHY_HPP_

#include <vector>

#include "trap/blockspace.hpp"
#include "trap/comm_ledger.hpp"
#include "trap/model.hpp"

namespace trap {

struct CauchyParams {
  double nu0 = 0.1;
  double nu1 = 0.5;
  double nu2 = 1.0;
  double nu3 = 0.5;
  double nu4 = 1.0;
  double nu5 = 1.0;
  int max_backtracks = 60;

  void validate() const;
  double chi() const;
};

struct CauchyResult {
  Vector z;
  // Per node.
  std::vector<double> alphas;
  std::vector<double> rejected_alphas;  // last rejected step, 0 if none
  std::vector<int> backtracks;
  // Groups of nodes sharing one step size: single nodes, or a whole colour
  // when that colour is internally coupled.
  std::vector<std::vector<int>> units;
  // m at the mixed point before colour 0 and after each colour.
  std::vector<double> sweep_values;
  double decrease = 0.0;
  int num_colors = 0;
  ActiveSet active;
};

// One Gauss-Seidel projected-gradient sweep over the colours.
// Throws BacktrackError when a node exhausts max_backtracks.
CauchyResult cauchy_sweep(const QuadraticModel& model, const Partition& partition,
                          const BoxSet& box, double delta, const CauchyParams& params,
                          CommLedger* ledger = nullptr);

// Sufficient decrease and containment test for the nodes `unit`. `trial`
// equals `mixed` except on the unit's nodes, where `mixed` holds x.
bool check_block_decrease(const QuadraticModel& model, const Partition& partition,
                          const std::vector<int>& unit, const Vector& trial,
                          const Vector& mixed, double delta, const CauchyParams& params);

double sufficient_decrease_bound(const CauchyResult& result, const QuadraticModel& model,
                                 const Partition& partition, double delta,
                                 const CauchyParams& params);

double relative_error_bound(const CauchyResult& result, const QuadraticModel& model,
                            const Partition& partition, const Vector& gradient_at_z);

}  // namespace trap

#endif  // TRAP_CAUCHY_HPP_
