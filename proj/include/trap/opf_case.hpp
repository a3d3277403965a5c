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

#ifndef TRAP_OPF_CASE_HPP_
#define TRAP_OPF_CASE_HPP_

#include <map>
#include <string>
#include <vector>

namespace trap {

// Network data in per unit on base_mva. Bus, branch and generator references
// are 0-based indices into the vectors below.
struct Bus {
  int id = 0;
  int type = 1;
  double pd = 0.0, qd = 0.0;  // load
  double gs = 0.0, bs = 0.0;  // shunt at v = 1
  double vmin = 0.9, vmax = 1.1;
  int line = 0;
};

struct Branch {
  int from = 0, to = 0;
  double r = 0.0, x = 0.0, b = 0.0;
  double rate = 0.0;  // apparent-power limit, pu
  // π-model: series admittance g + jb, charging bc split evenly.
  double g = 0.0, bser = 0.0;
  double g_self() const { return g; }
  double b_self() const { return bser + 0.5 * b; }
  double g_mutual() const { return -g; }
  double b_mutual() const { return -bser; }
  int line = 0;
};

struct Generator {
  int bus = 0;
  double pmin = 0.0, pmax = 0.0, qmin = 0.0, qmax = 0.0;  // pu
  double c2 = 0.0, c1 = 0.0, c0 = 0.0;  // cost in money per MW^k
  int line = 0;
};

struct NetworkCase {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> gens;
  std::map<int, int> bus_index;  // external id -> index
  int reference = 0;             // index of the angle-reference bus
};

// MATPOWER-style text: mpc.baseMVA, mpc.bus, mpc.gen, mpc.branch and
// mpc.gencost. Throws ParseError carrying the offending line number.
NetworkCase parse_case(const std::string& text);
NetworkCase parse_case_file(const std::string& path);

}  // namespace trap

#endif  // TRAP_OPF_CASE_HPP_
