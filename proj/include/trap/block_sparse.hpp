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

#ifndef TRAP_BLOCK_SPARSE_HPP_
#define TRAP_BLOCK_SPARSE_HPP_

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "trap/blockspace.hpp"

namespace trap {

// Symmetric matrix stored as dense node blocks. Only the upper block triangle
// (i <= j) is kept; block (j, i) is the transpose of block (i, j).
class BlockSparseMatrix {
 public:
  BlockSparseMatrix() = default;
  explicit BlockSparseMatrix(std::vector<int> node_sizes);
  // Pre-allocates zero blocks for every edge of `pattern` and every diagonal.
  BlockSparseMatrix(std::vector<int> node_sizes, const CouplingGraph& pattern);

  int num_nodes() const { return static_cast<int>(sizes_.size()); }
  int dimension() const { return dimension_; }
  const std::vector<int>& node_sizes() const { return sizes_; }
  int node_offset(int node) const { return offsets_[node]; }
  int node_of_index(int index) const { return owner_[index]; }

  // Adds v to entries (r, c) and (c, r) of the full matrix (once if r == c).
  void add_symmetric(int r, int c, double v);
  // Adds `block` to the (i, j) block (and its transpose to (j, i)). For i == j
  // the block must be symmetric.
  void add_block(int i, int j, const Eigen::MatrixXd& block);

  bool has_block(int i, int j) const;
  // Block (i, j) of the full matrix; zero matrix if not stored.
  Eigen::MatrixXd block(int i, int j) const;
  Eigen::MatrixXd diag_block(int i) const { return block(i, i); }
  // Nodes j with a stored block (i, j), ascending, including i if stored.
  const std::vector<int>& row_nodes(int i) const { return rows_[i]; }

  Vector hess_vec(const Vector& v) const;
  // Σ_j M(i, j) v_j for a single block row.
  Vector block_row_product(int i, const Vector& v) const;

  Eigen::MatrixXd dense() const;
  // Maximum absolute row sum; bounds the spectral norm of a symmetric matrix.
  double norm_upper_bound() const;
  // Off-diagonal blocks holding an entry with |value| > tol.
  CouplingGraph pattern(double tol = 0.0) const;

  void scale(double factor);
  void add_identity(double shift);

 private:
  Eigen::MatrixXd& upper_block(int i, int j);

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<int> owner_;
  std::vector<std::vector<int>> rows_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> blocks_;
  int dimension_ = 0;
};

}  // namespace trap

#endif  // TRAP_BLOCK_SPARSE_HPP_
