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

#ifndef TRAP_BLOCKSPACE_HPP_
#define TRAP_BLOCKSPACE_HPP_

// Variable partitioning, colouring and box geometry.
//
// The decision vector is split into N nodes (sub-vectors). A Partition groups
// the nodes into K colours; nodes sharing a colour must not be coupled in the
// objective, so a Gauss-Seidel sweep over colours can update each colour in
// parallel. The feasible set is a box; infinite bounds are IEEE infinities.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace trap {

using Vector = Eigen::VectorXd;

// Default absolute tolerance for deciding that a coordinate sits on a bound.
inline constexpr double kActiveTolerance = 1e-10;

// Undirected coupling between nodes. Edges are stored as (i, j) with i < j.
class CouplingGraph {
 public:
  CouplingGraph() = default;
  explicit CouplingGraph(int num_nodes);

  // Throws InvalidArgument on self-loops or out-of-range nodes. Duplicate
  // edges are merged.
  void add_edge(int i, int j);

  int num_nodes() const { return static_cast<int>(adjacency_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::set<std::pair<int, int>>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;
  // Sorted ascending.
  const std::vector<int>& neighbours(int node) const { return adjacency_[node]; }

  bool operator==(const CouplingGraph& other) const { return edges_ == other.edges_ && num_nodes() == other.num_nodes(); }

 private:
  std::set<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// Node layout plus a colouring. Colours are 0-based and contiguous; nodes keep
// their storage order inside the flat vector, the sweep order is colour by
// colour with ascending node index inside a colour.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<int> node_sizes, std::vector<int> color_of_node);

  // Every node in colour 0: the centralised (monolithic) schedule.
  static Partition single_color(std::vector<int> node_sizes);

  int num_nodes() const { return static_cast<int>(node_sizes_.size()); }
  int num_colors() const { return static_cast<int>(groups_.size()); }
  int dimension() const { return dimension_; }

  int node_size(int node) const { return node_sizes_[node]; }
  int node_offset(int node) const { return offsets_[node]; }
  int color_of(int node) const { return colors_[node]; }
  int node_of_index(int index) const { return node_of_index_[index]; }

  const std::vector<int>& node_sizes() const { return node_sizes_; }
  const std::vector<int>& colors() const { return colors_; }
  const std::vector<int>& nodes_in_color(int color) const { return groups_[color]; }

  // Permutation realising the colour-major sweep order.
  std::vector<int> node_order() const;

  template <typename Derived>
  auto segment(Eigen::MatrixBase<Derived>& v, int node) const {
    return v.segment(offsets_[node], node_sizes_[node]);
  }
  template <typename Derived>
  auto segment(const Eigen::MatrixBase<Derived>& v, int node) const {
    return v.segment(offsets_[node], node_sizes_[node]);
  }

  // True iff no edge of `graph` joins two nodes of the same colour.
  bool is_valid_for(const CouplingGraph& graph) const;
  // Throws InvalidArgument naming the first offending pair.
  void validate(const CouplingGraph& graph) const;
  // True iff colour `color` contains no internal edge of `graph`.
  bool color_is_independent(int color, const CouplingGraph& graph) const;

 private:
  std::vector<int> node_sizes_;
  std::vector<int> offsets_;
  std::vector<int> colors_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> node_of_index_;
  int dimension_ = 0;
};

struct BoxSet {
  Vector lower;
  Vector upper;

  BoxSet() = default;
  // Throws InvalidArgument if sizes differ, a bound is NaN or lower > upper.
  BoxSet(Vector lower_bounds, Vector upper_bounds);
  static BoxSet unbounded(int n);

  int dimension() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;
};

struct ActiveSet {
  std::vector<int> at_lower;
  std::vector<int> at_upper;

  // Number of distinct active coordinates.
  int size() const;
  bool contains(int index) const;
  // True iff every active coordinate of *this is active in `other` on the
  // same side (a pinned coordinate with lower == upper counts on both).
  bool is_subset_of(const ActiveSet& other) const;
  bool operator==(const ActiveSet& other) const = default;
};

Vector project_box(const Vector& x, const BoxSet& box);

// ||P(x - g) - x||_2, zero exactly at first-order critical points.
double criticality(const Vector& x, const Vector& g, const BoxSet& box);

// Projection of -g onto the tangent cone of the box at x.
Vector projected_gradient(const Vector& x, const Vector& g, const BoxSet& box);

ActiveSet active_set(const Vector& x, const BoxSet& box, double tol = kActiveTolerance);

// Smallest-available-colour greedy colouring in ascending node order.
Partition greedy_coloring(const CouplingGraph& graph, std::vector<int> node_sizes = {});

// JSON dump of node sizes, edges and colours (debugging aid).
std::string partition_to_json(const Partition& partition, const CouplingGraph& graph);
std::pair<Partition, CouplingGraph> partition_from_json(const std::string& text);

}  // namespace trap

#endif  // TRAP_BLOCKSPACE_HPP_
