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

#ifndef TRAP_OPF_HPP_
#define TRAP_OPF_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "trap/auglag.hpp"
#include "trap/opf_case.hpp"

namespace trap {

enum class Formulation { kPolar, kRectangular };
const char* formulation_name(Formulation f);

// Variable and residual slots. Every branch yields two directed line
// elements (from -> to, to -> from); nodes are the line elements (branch k
// gives nodes 2k and 2k+1) followed by the buses.
struct OpfLayout {
  struct LineElement {
    int branch = 0;
    bool reverse = false;
    int from_bus = 0, to_bus = 0;  // bus indices
    int node = 0;
    int p = 0, q = 0, s = 0;        // variable indices
    int row_p = 0, row_q = 0, row_s = 0;
    double g_self = 0.0, b_self = 0.0, g_mutual = 0.0, b_mutual = 0.0;
    double smax = 0.0;
  };
  struct BusSlots {
    int node = 0;
    int v = 0, theta = 0;  // polar (v, θ); rectangular (e, f)
    int s_lo = -1, s_hi = -1;
    std::vector<int> gens;  // generator indices
    std::vector<int> pg, qg;
    std::vector<int> out_elements;
    int row_p = 0, row_q = 0;
    int row_vlo = -1, row_vhi = -1;
  };

  Formulation formulation = Formulation::kPolar;
  std::vector<LineElement> elements;
  std::vector<BusSlots> buses;
  std::vector<int> node_sizes;
  int num_vars = 0;
  int num_rows = 0;

  int bus_node(int bus) const { return buses[bus].node; }
  std::string to_json() const;
};

class OpfProblem : public EqualityNlp {
 public:
  OpfProblem(const NetworkCase& network, Formulation formulation);

  const std::vector<int>& node_sizes() const override { return layout_.node_sizes; }
  const BoxSet& bounds() const override { return box_; }
  int num_constraints() const override { return layout_.num_rows; }
  const std::vector<std::vector<int>>& constraint_nodes() const override { return incidence_; }
  const CouplingGraph& objective_coupling() const override { return objective_coupling_; }

  double objective(const Vector& x) const override;
  Vector objective_gradient(const Vector& x) const override;
  void add_objective_hessian(const Vector& x, double scale, BlockSparseMatrix& H) const override;
  Vector constraints(const Vector& x) const override;
  std::vector<SparseRow> jacobian(const Vector& x) const override;
  void add_constraint_hessians(const Vector& x, const Vector& weights,
                               BlockSparseMatrix& H) const override;

  const OpfLayout& layout() const { return layout_; }
  const NetworkCase& network() const { return network_; }
  Formulation formulation() const { return layout_.formulation; }

 private:
  NetworkCase network_;
  OpfLayout layout_;
  BoxSet box_;
  std::vector<std::vector<int>> incidence_;
  CouplingGraph objective_coupling_;
};

OpfProblem build_polar_opf(const NetworkCase& network);
OpfProblem build_rect_opf(const NetworkCase& network);

// Colours line elements by branch (greedy on the branch line graph in file
// order, both directions sharing a colour), then buses (greedy in bus order);
// bus colours follow the line colours.
Partition opf_coloring(const OpfLayout& layout, const NetworkCase& network);

// Voltages at 1 pu (clamped), angles 0, generation shared in proportion to
// capacity, line variables consistent with the flow definitions.
Vector opf_flat_start(const OpfProblem& problem);
// Voltages and generation uniform in their bounds, angles uniform in
// [-π/6, π/6] (reference pinned), line variables consistent with the flows.
Vector opf_random_start(const OpfProblem& problem, std::uint64_t seed);

// Polar bus voltages (v, θ) from a point of either formulation.
void bus_voltages(const OpfProblem& problem, const Vector& x, Vector& v, Vector& theta);
// Maps a polar point to the rectangular formulation (e = v cos θ, f = v sin θ),
// copying line and generator variables and setting voltage slacks.
Vector polar_to_rect(const OpfProblem& polar, const OpfProblem& rect, const Vector& x);
// Generator active power in MW.
std::vector<double> generator_dispatch_mw(const OpfProblem& problem, const Vector& x);

}  // namespace trap

#endif  // TRAP_OPF_HPP_
