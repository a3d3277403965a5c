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

#include "trap/opf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"
#include "trap/errors.hpp"

namespace trap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flow expression of one line end in four local variables.
//   polar (va, vc, θa, θc):  k·va² + va·vc·(α cos d + β sin d), d = θa − θc
//   rect  (ea, fa, ec, fc):  k·(ea²+fa²) + α(ea ec + fa fc) + β(fa ec − ea fc)
struct Local {
  double value = 0.0;
  std::array<double, 4> grad{};
  std::array<std::array<double, 4>, 4> hess{};
};

Local polar_flow(double k, double alpha, double beta, double va, double vc, double ta, double tc) {
  const double d = ta - tc;
  const double c = std::cos(d), s = std::sin(d);
  const double T = alpha * c + beta * s;
  const double Tp = -alpha * s + beta * c;
  Local f;
  f.value = k * va * va + va * vc * T;
  f.grad = {2.0 * k * va + vc * T, va * T, va * vc * Tp, -va * vc * Tp};
  auto& h = f.hess;
  h[0][0] = 2.0 * k;
  h[0][1] = h[1][0] = T;
  h[0][2] = h[2][0] = vc * Tp;
  h[0][3] = h[3][0] = -vc * Tp;
  h[1][1] = 0.0;
  h[1][2] = h[2][1] = va * Tp;
  h[1][3] = h[3][1] = -va * Tp;
  h[2][2] = -va * vc * T;
  h[2][3] = h[3][2] = va * vc * T;
  h[3][3] = -va * vc * T;
  return f;
}

Local rect_flow(double k, double alpha, double beta, double ea, double fa, double ec, double fc) {
  Local f;
  auto& h = f.hess;
  h[0] = {2.0 * k, 0.0, alpha, -beta};
  h[1] = {0.0, 2.0 * k, beta, alpha};
  h[2] = {alpha, beta, 0.0, 0.0};
  h[3] = {-beta, alpha, 0.0, 0.0};
  const std::array<double, 4> w{ea, fa, ec, fc};
  for (int a = 0; a < 4; ++a) {
    double g = 0.0;
    for (int b = 0; b < 4; ++b) g += h[a][b] * w[b];
    f.grad[a] = g;
    f.value += 0.5 * w[a] * g;
  }
  return f;
}

struct ElementFlows {
  Local p, q;
  std::array<int, 4> vars{};
};

}  // namespace

const char* formulation_name(Formulation f) {
  return f == Formulation::kPolar ? "polar" : "rect";
}

std::string OpfLayout::to_json() const {
  nlohmann::json doc;
  doc["formulation"] = formulation_name(formulation);
  doc["num_vars"] = num_vars;
  doc["num_rows"] = num_rows;
  doc["node_sizes"] = node_sizes;
  for (const auto& e : elements) {
    doc["elements"].push_back({{"branch", e.branch}, {"reverse", e.reverse}, {"from", e.from_bus},
                               {"to", e.to_bus}, {"node", e.node}, {"vars", {e.p, e.q, e.s}},
                               {"rows", {e.row_p, e.row_q, e.row_s}}});
  }
  for (const auto& b : buses) {
    doc["buses"].push_back({{"node", b.node}, {"v", b.v}, {"theta", b.theta}, {"pg", b.pg},
                            {"qg", b.qg}, {"rows", {b.row_p, b.row_q}}});
  }
  return doc.dump(2);
}

OpfProblem::OpfProblem(const NetworkCase& network, Formulation formulation) : network_(network) {
  auto& L = layout_;
  L.formulation = formulation;
  const bool rect = formulation == Formulation::kRectangular;
  const int nb = static_cast<int>(network.buses.size());
  L.buses.resize(nb);

  double capacity = 0.0;
  for (const auto& g : network.gens) capacity += std::hypot(std::max(std::abs(g.pmin), std::abs(g.pmax)),
                                                            std::max(std::abs(g.qmin), std::abs(g.qmax)));
  const double unlimited = std::max(10.0 * capacity, 10.0);

  int var = 0, row = 0, node = 0;
  for (size_t k = 0; k < network.branches.size(); ++k) {
    const auto& br = network.branches[k];
    for (int dir = 0; dir < 2; ++dir) {
      OpfLayout::LineElement e;
      e.branch = static_cast<int>(k);
      e.reverse = dir == 1;
      e.from_bus = dir == 0 ? br.from : br.to;
      e.to_bus = dir == 0 ? br.to : br.from;
      e.node = node++;
      e.p = var++;
      e.q = var++;
      e.s = var++;
      e.row_p = row++;
      e.row_q = row++;
      e.row_s = row++;
      e.g_self = br.g_self();
      e.b_self = br.b_self();
      e.g_mutual = br.g_mutual();
      e.b_mutual = br.b_mutual();
      e.smax = br.rate > 0.0 ? br.rate : unlimited;
      L.node_sizes.push_back(3);
      L.buses[e.from_bus].out_elements.push_back(static_cast<int>(L.elements.size()));
      L.elements.push_back(e);
    }
  }
  for (size_t g = 0; g < network.gens.size(); ++g) L.buses[network.gens[g].bus].gens.push_back(static_cast<int>(g));
  for (int b = 0; b < nb; ++b) {
    auto& s = L.buses[b];
    s.node = node++;
    s.v = var++;
    s.theta = var++;
    int size = 2;
    if (rect) {
      s.s_lo = var++;
      s.s_hi = var++;
      size += 2;
    }
    for (size_t q = 0; q < s.gens.size(); ++q) {
      s.pg.push_back(var++);
      s.qg.push_back(var++);
      size += 2;
    }
    s.row_p = row++;
    s.row_q = row++;
    if (rect) {
      s.row_vlo = row++;
      s.row_vhi = row++;
    }
    L.node_sizes.push_back(size);
  }
  L.num_vars = var;
  L.num_rows = row;

  Vector lo = Vector::Constant(var, -kInf), hi = Vector::Constant(var, kInf);
  for (const auto& e : L.elements) {
    lo[e.s] = 0.0;
    hi[e.s] = e.smax * e.smax;
  }
  for (int b = 0; b < nb; ++b) {
    const auto& s = L.buses[b];
    const auto& bus = network.buses[b];
    if (rect) {
      lo[s.v] = b == network.reference ? 0.0 : -bus.vmax;
      hi[s.v] = bus.vmax;
      lo[s.theta] = b == network.reference ? 0.0 : -bus.vmax;
      hi[s.theta] = b == network.reference ? 0.0 : bus.vmax;
      const double span = bus.vmax * bus.vmax - bus.vmin * bus.vmin;
      lo[s.s_lo] = 0.0;
      hi[s.s_lo] = span;
      lo[s.s_hi] = 0.0;
      hi[s.s_hi] = span;
    } else {
      lo[s.v] = bus.vmin;
      hi[s.v] = bus.vmax;
      if (b == network.reference) lo[s.theta] = hi[s.theta] = 0.0;
    }
    for (size_t q = 0; q < s.gens.size(); ++q) {
      const auto& g = network.gens[s.gens[q]];
      lo[s.pg[q]] = g.pmin;
      hi[s.pg[q]] = g.pmax;
      lo[s.qg[q]] = g.qmin;
      hi[s.qg[q]] = g.qmax;
    }
  }
  box_ = BoxSet(lo, hi);

  incidence_.assign(row, {});
  for (const auto& e : L.elements) {
    const std::vector<int> flow{e.node, L.buses[e.from_bus].node, L.buses[e.to_bus].node};
    incidence_[e.row_p] = flow;
    incidence_[e.row_q] = flow;
    incidence_[e.row_s] = {e.node};
  }
  for (const auto& s : L.buses) {
    std::vector<int> bal{s.node};
    for (int e : s.out_elements) bal.push_back(L.elements[e].node);
    incidence_[s.row_p] = bal;
    incidence_[s.row_q] = bal;
    if (rect) {
      incidence_[s.row_vlo] = {s.node};
      incidence_[s.row_vhi] = {s.node};
    }
  }
  objective_coupling_ = CouplingGraph(static_cast<int>(L.node_sizes.size()));
}

double OpfProblem::objective(const Vector& x) const {
  const double base = network_.base_mva;
  double f = 0.0;
  for (const auto& s : layout_.buses) {
    for (size_t q = 0; q < s.gens.size(); ++q) {
      const auto& g = network_.gens[s.gens[q]];
      const double mw = base * x[s.pg[q]];
      f += g.c2 * mw * mw + g.c1 * mw + g.c0;
    }
  }
  return f;
}

Vector OpfProblem::objective_gradient(const Vector& x) const {
  const double base = network_.base_mva;
  Vector grad = Vector::Zero(x.size());
  for (const auto& s : layout_.buses) {
    for (size_t q = 0; q < s.gens.size(); ++q) {
      const auto& g = network_.gens[s.gens[q]];
      grad[s.pg[q]] = 2.0 * g.c2 * base * base * x[s.pg[q]] + g.c1 * base;
    }
  }
  return grad;
}

void OpfProblem::add_objective_hessian(const Vector&, double scale, BlockSparseMatrix& H) const {
  const double base = network_.base_mva;
  for (const auto& s : layout_.buses) {
    for (size_t q = 0; q < s.gens.size(); ++q) {
      const auto& g = network_.gens[s.gens[q]];
      H.add_symmetric(s.pg[q], s.pg[q], scale * 2.0 * g.c2 * base * base);
    }
  }
}

namespace {

ElementFlows element_flows(const OpfLayout& L, const OpfLayout::LineElement& e, const Vector& x) {
  const auto& a = L.buses[e.from_bus];
  const auto& c = L.buses[e.to_bus];
  ElementFlows out;
  if (L.formulation == Formulation::kPolar) {
    out.vars = {a.v, c.v, a.theta, c.theta};
    const double va = x[a.v], vc = x[c.v], ta = x[a.theta], tc = x[c.theta];
    out.p = polar_flow(e.g_self, e.g_mutual, e.b_mutual, va, vc, ta, tc);
    out.q = polar_flow(-e.b_self, -e.b_mutual, e.g_mutual, va, vc, ta, tc);
  } else {
    out.vars = {a.v, a.theta, c.v, c.theta};
    const double ea = x[a.v], fa = x[a.theta], ec = x[c.v], fc = x[c.theta];
    out.p = rect_flow(e.g_self, e.g_mutual, e.b_mutual, ea, fa, ec, fc);
    out.q = rect_flow(-e.b_self, -e.b_mutual, e.g_mutual, ea, fa, ec, fc);
  }
  return out;
}

// Squared voltage magnitude, its gradient entries and the Hessian diagonal.
struct VoltageSquare {
  double value;
  std::vector<std::pair<int, double>> grad;
  std::vector<std::pair<int, double>> hess_diag;
};

VoltageSquare voltage_square(const OpfLayout& L, const OpfLayout::BusSlots& s, const Vector& x) {
  if (L.formulation == Formulation::kPolar) {
    const double v = x[s.v];
    return {v * v, {{s.v, 2.0 * v}}, {{s.v, 2.0}}};
  }
  const double e = x[s.v], f = x[s.theta];
  return {e * e + f * f, {{s.v, 2.0 * e}, {s.theta, 2.0 * f}}, {{s.v, 2.0}, {s.theta, 2.0}}};
}

}  // namespace

Vector OpfProblem::constraints(const Vector& x) const {
  const auto& L = layout_;
  Vector c(L.num_rows);
  for (const auto& e : L.elements) {
    const ElementFlows fl = element_flows(L, e, x);
    c[e.row_p] = x[e.p] - fl.p.value;
    c[e.row_q] = x[e.q] - fl.q.value;
    c[e.row_s] = x[e.p] * x[e.p] + x[e.q] * x[e.q] + x[e.s] - e.smax * e.smax;
  }
  for (size_t b = 0; b < L.buses.size(); ++b) {
    const auto& s = L.buses[b];
    const auto& bus = network_.buses[b];
    const double vsq = voltage_square(L, s, x).value;
    double p = -bus.pd - bus.gs * vsq;
    double q = -bus.qd + bus.bs * vsq;
    for (int pg : s.pg) p += x[pg];
    for (int qg : s.qg) q += x[qg];
    for (int e : s.out_elements) {
      p -= x[L.elements[e].p];
      q -= x[L.elements[e].q];
    }
    c[s.row_p] = p;
    c[s.row_q] = q;
    if (s.row_vlo >= 0) {
      c[s.row_vlo] = vsq - x[s.s_lo] - bus.vmin * bus.vmin;
      c[s.row_vhi] = vsq + x[s.s_hi] - bus.vmax * bus.vmax;
    }
  }
  return c;
}

std::vector<SparseRow> OpfProblem::jacobian(const Vector& x) const {
  const auto& L = layout_;
  std::vector<SparseRow> J(L.num_rows);
  for (const auto& e : L.elements) {
    const ElementFlows fl = element_flows(L, e, x);
    auto& rp = J[e.row_p];
    auto& rq = J[e.row_q];
    rp.emplace_back(e.p, 1.0);
    rq.emplace_back(e.q, 1.0);
    for (int a = 0; a < 4; ++a) {
      rp.emplace_back(fl.vars[a], -fl.p.grad[a]);
      rq.emplace_back(fl.vars[a], -fl.q.grad[a]);
    }
    J[e.row_s] = {{e.p, 2.0 * x[e.p]}, {e.q, 2.0 * x[e.q]}, {e.s, 1.0}};
  }
  for (size_t b = 0; b < L.buses.size(); ++b) {
    const auto& s = L.buses[b];
    const auto& bus = network_.buses[b];
    const VoltageSquare vs = voltage_square(L, s, x);
    auto& rp = J[s.row_p];
    auto& rq = J[s.row_q];
    for (const auto& [i, d] : vs.grad) {
      rp.emplace_back(i, -bus.gs * d);
      rq.emplace_back(i, bus.bs * d);
    }
    for (int pg : s.pg) rp.emplace_back(pg, 1.0);
    for (int qg : s.qg) rq.emplace_back(qg, 1.0);
    for (int e : s.out_elements) {
      rp.emplace_back(L.elements[e].p, -1.0);
      rq.emplace_back(L.elements[e].q, -1.0);
    }
    if (s.row_vlo >= 0) {
      J[s.row_vlo] = vs.grad;
      J[s.row_vlo].emplace_back(s.s_lo, -1.0);
      J[s.row_vhi] = vs.grad;
      J[s.row_vhi].emplace_back(s.s_hi, 1.0);
    }
  }
  return J;
}

void OpfProblem::add_constraint_hessians(const Vector& x, const Vector& weights,
                                         BlockSparseMatrix& H) const {
  const auto& L = layout_;
  for (const auto& e : L.elements) {
    const ElementFlows fl = element_flows(L, e, x);
    const double wp = weights[e.row_p], wq = weights[e.row_q], ws = weights[e.row_s];
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        const double v = -(wp * fl.p.hess[a][b] + wq * fl.q.hess[a][b]);
        if (v == 0.0) continue;
        const int ia = fl.vars[a], ib = fl.vars[b];
        // A repeated variable (a line end on itself) cannot occur: a != b buses.
        H.add_symmetric(ia, ib, v);
      }
    }
    H.add_symmetric(e.p, e.p, 2.0 * ws);
    H.add_symmetric(e.q, e.q, 2.0 * ws);
  }
  for (size_t b = 0; b < L.buses.size(); ++b) {
    const auto& s = L.buses[b];
    const auto& bus = network_.buses[b];
    const VoltageSquare vs = voltage_square(L, s, x);
    double w = -bus.gs * weights[s.row_p] + bus.bs * weights[s.row_q];
    if (s.row_vlo >= 0) w += weights[s.row_vlo] + weights[s.row_vhi];
    for (const auto& [i, d] : vs.hess_diag) H.add_symmetric(i, i, w * d);
  }
}

OpfProblem build_polar_opf(const NetworkCase& network) { return OpfProblem(network, Formulation::kPolar); }
OpfProblem build_rect_opf(const NetworkCase& network) { return OpfProblem(network, Formulation::kRectangular); }

Partition opf_coloring(const OpfLayout& layout, const NetworkCase& network) {
  const int nbr = static_cast<int>(network.branches.size());
  const int nb = static_cast<int>(network.buses.size());
  CouplingGraph lines(nbr);
  for (int a = 0; a < nbr; ++a) {
    for (int b = a + 1; b < nbr; ++b) {
      const auto& x = network.branches[a];
      const auto& y = network.branches[b];
      if (x.from == y.from || x.from == y.to || x.to == y.from || x.to == y.to) lines.add_edge(a, b);
    }
  }
  CouplingGraph buses(nb);
  for (const auto& br : network.branches) buses.add_edge(br.from, br.to);
  const Partition line_colors = greedy_coloring(lines);
  const Partition bus_colors = greedy_coloring(buses);
  const int offset = nbr > 0 ? line_colors.num_colors() : 0;
  std::vector<int> colors(layout.node_sizes.size());
  for (const auto& e : layout.elements) colors[e.node] = line_colors.color_of(e.branch);
  for (int b = 0; b < nb; ++b) colors[layout.buses[b].node] = offset + bus_colors.color_of(b);
  return Partition(layout.node_sizes, colors);
}

namespace {

void fill_lines(const OpfProblem& problem, Vector& x) {
  const auto& L = problem.layout();
  for (const auto& e : L.elements) {
    const ElementFlows fl = element_flows(L, e, x);
    x[e.p] = fl.p.value;
    x[e.q] = fl.q.value;
    x[e.s] = std::clamp(e.smax * e.smax - x[e.p] * x[e.p] - x[e.q] * x[e.q], 0.0, e.smax * e.smax);
  }
}

void fill_voltage_slacks(const OpfProblem& problem, Vector& x) {
  const auto& L = problem.layout();
  const auto& box = problem.bounds();
  for (size_t b = 0; b < L.buses.size(); ++b) {
    const auto& s = L.buses[b];
    if (s.s_lo < 0) continue;
    const auto& bus = problem.network().buses[b];
    const double vsq = x[s.v] * x[s.v] + x[s.theta] * x[s.theta];
    x[s.s_lo] = std::clamp(vsq - bus.vmin * bus.vmin, box.lower[s.s_lo], box.upper[s.s_lo]);
    x[s.s_hi] = std::clamp(bus.vmax * bus.vmax - vsq, box.lower[s.s_hi], box.upper[s.s_hi]);
  }
}

void set_voltage(const OpfProblem& problem, Vector& x, int b, double v, double theta) {
  const auto& s = problem.layout().buses[b];
  if (problem.formulation() == Formulation::kPolar) {
    x[s.v] = v;
    x[s.theta] = theta;
  } else {
    x[s.v] = v * std::cos(theta);
    x[s.theta] = v * std::sin(theta);
  }
}

}  // namespace

Vector opf_flat_start(const OpfProblem& problem) {
  const auto& L = problem.layout();
  const auto& net = problem.network();
  Vector x = Vector::Zero(L.num_vars);
  double pd = 0.0, qd = 0.0, pcap = 0.0, qcap = 0.0;
  for (const auto& b : net.buses) {
    pd += b.pd;
    qd += b.qd;
  }
  for (const auto& g : net.gens) {
    pcap += g.pmax;
    qcap += g.qmax;
  }
  for (size_t b = 0; b < L.buses.size(); ++b) {
    const auto& bus = net.buses[b];
    set_voltage(problem, x, static_cast<int>(b), std::clamp(1.0, bus.vmin, bus.vmax), 0.0);
    const auto& s = L.buses[b];
    for (size_t q = 0; q < s.gens.size(); ++q) {
      const auto& g = net.gens[s.gens[q]];
      x[s.pg[q]] = std::clamp(pcap > 0.0 ? pd * g.pmax / pcap : 0.0, g.pmin, g.pmax);
      x[s.qg[q]] = std::clamp(qcap > 0.0 ? qd * g.qmax / qcap : 0.0, g.qmin, g.qmax);
    }
  }
  fill_lines(problem, x);
  fill_voltage_slacks(problem, x);
  return x;
}

Vector opf_random_start(const OpfProblem& problem, std::uint64_t seed) {
  const auto& L = problem.layout();
  const auto& net = problem.network();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double span = std::acos(-1.0) / 6.0;
  Vector x = Vector::Zero(L.num_vars);
  for (size_t b = 0; b < L.buses.size(); ++b) {
    const auto& bus = net.buses[b];
    const double v = bus.vmin + unit(rng) * (bus.vmax - bus.vmin);
    double theta = -span + 2.0 * span * unit(rng);
    if (static_cast<int>(b) == net.reference) theta = 0.0;
    set_voltage(problem, x, static_cast<int>(b), v, theta);
    const auto& s = L.buses[b];
    for (size_t q = 0; q < s.gens.size(); ++q) {
      const auto& g = net.gens[s.gens[q]];
      x[s.pg[q]] = g.pmin + unit(rng) * (g.pmax - g.pmin);
      x[s.qg[q]] = g.qmin + unit(rng) * (g.qmax - g.qmin);
    }
  }
  fill_lines(problem, x);
  fill_voltage_slacks(problem, x);
  return project_box(x, problem.bounds());
}

void bus_voltages(const OpfProblem& problem, const Vector& x, Vector& v, Vector& theta) {
  const auto& L = problem.layout();
  const int nb = static_cast<int>(L.buses.size());
  v.resize(nb);
  theta.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const auto& s = L.buses[b];
    if (problem.formulation() == Formulation::kPolar) {
      v[b] = x[s.v];
      theta[b] = x[s.theta];
    } else {
      v[b] = std::hypot(x[s.v], x[s.theta]);
      theta[b] = std::atan2(x[s.theta], x[s.v]);
    }
  }
}

Vector polar_to_rect(const OpfProblem& polar, const OpfProblem& rect, const Vector& x) {
  if (polar.formulation() != Formulation::kPolar || rect.formulation() != Formulation::kRectangular) {
    throw InvalidArgument("polar_to_rect: formulations do not match");
  }
  const auto& P = polar.layout();
  const auto& R = rect.layout();
  if (P.elements.size() != R.elements.size() || P.buses.size() != R.buses.size()) {
    throw InvalidArgument("polar_to_rect: layouts from different networks");
  }
  Vector y = Vector::Zero(R.num_vars);
  for (size_t k = 0; k < P.elements.size(); ++k) {
    y[R.elements[k].p] = x[P.elements[k].p];
    y[R.elements[k].q] = x[P.elements[k].q];
    y[R.elements[k].s] = x[P.elements[k].s];
  }
  for (size_t b = 0; b < P.buses.size(); ++b) {
    const auto& ps = P.buses[b];
    const auto& rs = R.buses[b];
    y[rs.v] = x[ps.v] * std::cos(x[ps.theta]);
    y[rs.theta] = x[ps.v] * std::sin(x[ps.theta]);
    for (size_t q = 0; q < ps.pg.size(); ++q) {
      y[rs.pg[q]] = x[ps.pg[q]];
      y[rs.qg[q]] = x[ps.qg[q]];
    }
  }
  fill_voltage_slacks(rect, y);
  return y;
}

std::vector<double> generator_dispatch_mw(const OpfProblem& problem, const Vector& x) {
  std::vector<double> mw(problem.network().gens.size(), 0.0);
  for (const auto& s : problem.layout().buses) {
    for (size_t q = 0; q < s.gens.size(); ++q) mw[s.gens[q]] = problem.network().base_mva * x[s.pg[q]];
  }
  return mw;
}

}  // namespace trap
