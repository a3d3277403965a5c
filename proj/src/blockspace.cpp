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

#include "trap/blockspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "trap/errors.hpp"

namespace trap {
namespace {

void check_dims(const Vector& x, const BoxSet& box, const char* what) {
  if (x.size() != box.dimension()) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(x.size()) + " vs box " +
                          std::to_string(box.dimension()) + ")");
  }
}

// Feasibility slack for points produced by projections upstream.
bool within(double xi, double lo, double hi) {
  const double slack_lo = 1e-12 * (1.0 + (std::isfinite(lo) ? std::abs(lo) : 0.0));
  const double slack_hi = 1e-12 * (1.0 + (std::isfinite(hi) ? std::abs(hi) : 0.0));
  return xi >= lo - slack_lo && xi <= hi + slack_hi;
}

void check_feasible(const Vector& x, const BoxSet& box, const char* what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!within(x[i], box.lower[i], box.upper[i])) {
      throw InvalidArgument(std::string(what) + ": point infeasible at coordinate " +
                            std::to_string(i));
    }
  }
}

}  // namespace

CouplingGraph::CouplingGraph(int num_nodes) : adjacency_(num_nodes) {
  if (num_nodes < 0) throw InvalidArgument("CouplingGraph: negative node count");
}

void CouplingGraph::add_edge(int i, int j) {
  if (i == j) throw InvalidArgument("CouplingGraph: self-loop at node " + std::to_string(i));
  if (i < 0 || j < 0 || i >= num_nodes() || j >= num_nodes()) {
    throw InvalidArgument("CouplingGraph: edge (" + std::to_string(i) + ", " +
                          std::to_string(j) + ") out of range");
  }
  if (i > j) std::swap(i, j);
  if (!edges_.emplace(i, j).second) return;
  auto insert_sorted = [](std::vector<int>& v, int value) {
    v.insert(std::lower_bound(v.begin(), v.end(), value), value);
  };
  insert_sorted(adjacency_[i], j);
  insert_sorted(adjacency_[j], i);
}

bool CouplingGraph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return edges_.count({i, j}) > 0;
}

Partition::Partition(std::vector<int> node_sizes, std::vector<int> color_of_node)
    : node_sizes_(std::move(node_sizes)), colors_(std::move(color_of_node)) {
  if (node_sizes_.size() != colors_.size()) {
    throw InvalidArgument("Partition: node_sizes and colours differ in length");
  }
  offsets_.resize(node_sizes_.size());
  int num_colors = 0;
  for (size_t i = 0; i < node_sizes_.size(); ++i) {
    if (node_sizes_[i] <= 0) throw InvalidArgument("Partition: node sizes must be positive");
    if (colors_[i] < 0) throw InvalidArgument("Partition: negative colour");
    offsets_[i] = dimension_;
    dimension_ += node_sizes_[i];
    num_colors = std::max(num_colors, colors_[i] + 1);
  }
  groups_.assign(num_colors, {});
  for (size_t i = 0; i < colors_.size(); ++i) groups_[colors_[i]].push_back(static_cast<int>(i));
  for (int k = 0; k < num_colors; ++k) {
    if (groups_[k].empty()) throw InvalidArgument("Partition: colour " + std::to_string(k) + " is empty");
  }
  node_of_index_.resize(dimension_);
  for (size_t i = 0; i < node_sizes_.size(); ++i) {
    std::fill_n(node_of_index_.begin() + offsets_[i], node_sizes_[i], static_cast<int>(i));
  }
}

Partition Partition::single_color(std::vector<int> node_sizes) {
  std::vector<int> colors(node_sizes.size(), 0);
  return Partition(std::move(node_sizes), std::move(colors));
}

std::vector<int> Partition::node_order() const {
  std::vector<int> order;
  order.reserve(node_sizes_.size());
  for (const auto& group : groups_) order.insert(order.end(), group.begin(), group.end());
  return order;
}

bool Partition::is_valid_for(const CouplingGraph& graph) const {
  if (graph.num_nodes() != num_nodes()) return false;
  for (const auto& [i, j] : graph.edges()) {
    if (colors_[i] == colors_[j]) return false;
  }
  return true;
}

void Partition::validate(const CouplingGraph& graph) const {
  if (graph.num_nodes() != num_nodes()) {
    throw InvalidArgument("Partition: graph has " + std::to_string(graph.num_nodes()) +
                          " nodes, partition " + std::to_string(num_nodes()));
  }
  for (const auto& [i, j] : graph.edges()) {
    if (colors_[i] == colors_[j]) {
      throw InvalidArgument("Partition: coupled nodes " + std::to_string(i) + " and " +
                            std::to_string(j) + " share colour " + std::to_string(colors_[i]));
    }
  }
}

bool Partition::color_is_independent(int color, const CouplingGraph& graph) const {
  for (int node : groups_[color]) {
    for (int nb : graph.neighbours(node)) {
      if (colors_[nb] == color) return false;
    }
  }
  return true;
}

BoxSet::BoxSet(Vector lower_bounds, Vector upper_bounds)
    : lower(std::move(lower_bounds)), upper(std::move(upper_bounds)) {
  if (lower.size() != upper.size()) throw InvalidArgument("BoxSet: bound sizes differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i] ||
        lower[i] == std::numeric_limits<double>::infinity() ||
        upper[i] == -std::numeric_limits<double>::infinity()) {
      throw InvalidArgument("BoxSet: empty interval at coordinate " + std::to_string(i));
    }
  }
}

BoxSet BoxSet::unbounded(int n) {
  const double inf = std::numeric_limits<double>::infinity();
  return BoxSet(Vector::Constant(n, -inf), Vector::Constant(n, inf));
}

bool BoxSet::contains(const Vector& x, double tol) const {
  if (x.size() != dimension()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
  }
  return true;
}

int ActiveSet::size() const {
  std::vector<int> all = at_lower;
  all.insert(all.end(), at_upper.begin(), at_upper.end());
  std::sort(all.begin(), all.end());
  return static_cast<int>(std::unique(all.begin(), all.end()) - all.begin());
}

bool ActiveSet::contains(int index) const {
  return std::binary_search(at_lower.begin(), at_lower.end(), index) ||
         std::binary_search(at_upper.begin(), at_upper.end(), index);
}

bool ActiveSet::is_subset_of(const ActiveSet& other) const {
  return std::includes(other.at_lower.begin(), other.at_lower.end(), at_lower.begin(),
                       at_lower.end()) &&
         std::includes(other.at_upper.begin(), other.at_upper.end(), at_upper.begin(),
                       at_upper.end());
}

Vector project_box(const Vector& x, const BoxSet& box) {
  check_dims(x, box, "project_box");
  return x.cwiseMax(box.lower).cwiseMin(box.upper);
}

double criticality(const Vector& x, const Vector& g, const BoxSet& box) {
  check_dims(x, box, "criticality");
  check_dims(g, box, "criticality");
  check_feasible(x, box, "criticality");
  return (project_box(x - g, box) - x).norm();
}

Vector projected_gradient(const Vector& x, const Vector& g, const BoxSet& box) {
  check_dims(x, box, "projected_gradient");
  check_dims(g, box, "projected_gradient");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool lo = x[i] <= box.lower[i];
    const bool up = x[i] >= box.upper[i];
    double d = -g[i];
    if (lo && up) {
      d = 0.0;
    } else if (lo) {
      d = std::max(d, 0.0);
    } else if (up) {
      d = std::min(d, 0.0);
    }
    out[i] = d;
  }
  return out;
}

ActiveSet active_set(const Vector& x, const BoxSet& box, double tol) {
  check_dims(x, box, "active_set");
  ActiveSet result;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // An infinite bound is never active.
    if (std::isfinite(box.lower[i]) && x[i] - box.lower[i] <= tol) {
      result.at_lower.push_back(static_cast<int>(i));
    }
    if (std::isfinite(box.upper[i]) && box.upper[i] - x[i] <= tol) {
      result.at_upper.push_back(static_cast<int>(i));
    }
  }
  return result;
}

Partition greedy_coloring(const CouplingGraph& graph, std::vector<int> node_sizes) {
  const int n = graph.num_nodes();
  if (node_sizes.empty()) node_sizes.assign(n, 1);
  if (static_cast<int>(node_sizes.size()) != n) {
    throw InvalidArgument("greedy_coloring: node_sizes length differs from graph");
  }
  std::vector<int> color(n, -1);
  std::vector<char> taken;
  for (int i = 0; i < n; ++i) {
    taken.assign(graph.neighbours(i).size() + 1, 0);
    for (int nb : graph.neighbours(i)) {
      if (color[nb] >= 0 && color[nb] < static_cast<int>(taken.size())) taken[color[nb]] = 1;
    }
    int c = 0;
    while (taken[c]) ++c;
    color[i] = c;
  }
  return Partition(std::move(node_sizes), std::move(color));
}

std::string partition_to_json(const Partition& partition, const CouplingGraph& graph) {
  nlohmann::json doc;
  doc["node_sizes"] = partition.node_sizes();
  doc["colors"] = partition.colors();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [i, j] : graph.edges()) edges.push_back({i, j});
  doc["edges"] = edges;
  return doc.dump(2);
}

std::pair<Partition, CouplingGraph> partition_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  auto sizes = doc.at("node_sizes").get<std::vector<int>>();
  auto colors = doc.at("colors").get<std::vector<int>>();
  CouplingGraph graph(static_cast<int>(sizes.size()));
  for (const auto& e : doc.at("edges")) graph.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  return {Partition(std::move(sizes), std::move(colors)), std::move(graph)};
}

}  // namespace trap
