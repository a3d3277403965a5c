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

#include "trap/block_sparse.hpp"

#include <algorithm>
#include <cmath>

#include "trap/errors.hpp"

namespace trap {

BlockSparseMatrix::BlockSparseMatrix(std::vector<int> node_sizes)
    : sizes_(std::move(node_sizes)), rows_(sizes_.size()) {
  offsets_.reserve(sizes_.size());
  for (size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] <= 0) throw InvalidArgument("BlockSparseMatrix: node sizes must be positive");
    offsets_.push_back(dimension_);
    dimension_ += sizes_[i];
    owner_.insert(owner_.end(), sizes_[i], static_cast<int>(i));
  }
}

BlockSparseMatrix::BlockSparseMatrix(std::vector<int> node_sizes, const CouplingGraph& pattern)
    : BlockSparseMatrix(std::move(node_sizes)) {
  if (pattern.num_nodes() != num_nodes()) {
    throw InvalidArgument("BlockSparseMatrix: pattern size differs from node count");
  }
  for (int i = 0; i < num_nodes(); ++i) upper_block(i, i);
  for (const auto& [i, j] : pattern.edges()) upper_block(i, j);
}

Eigen::MatrixXd& BlockSparseMatrix::upper_block(int i, int j) {
  auto key = std::make_pair(std::min(i, j), std::max(i, j));
  auto it = blocks_.find(key);
  if (it == blocks_.end()) {
    it = blocks_.emplace(key, Eigen::MatrixXd::Zero(sizes_[key.first], sizes_[key.second])).first;
    auto& a = rows_[key.first];
    a.insert(std::lower_bound(a.begin(), a.end(), key.second), key.second);
    if (key.first != key.second) {
      auto& b = rows_[key.second];
      b.insert(std::lower_bound(b.begin(), b.end(), key.first), key.first);
    }
  }
  return it->second;
}

void BlockSparseMatrix::add_symmetric(int r, int c, double v) {
  if (r < 0 || c < 0 || r >= dimension_ || c >= dimension_) {
    throw InvalidArgument("BlockSparseMatrix: entry out of range");
  }
  const int i = owner_[r];
  const int j = owner_[c];
  const int ri = r - offsets_[i];
  const int cj = c - offsets_[j];
  if (i == j) {
    auto& b = upper_block(i, i);
    b(ri, cj) += v;
    if (ri != cj) b(cj, ri) += v;
  } else if (i < j) {
    upper_block(i, j)(ri, cj) += v;
  } else {
    upper_block(j, i)(cj, ri) += v;
  }
}

void BlockSparseMatrix::add_block(int i, int j, const Eigen::MatrixXd& block) {
  if (block.rows() != sizes_[i] || block.cols() != sizes_[j]) {
    throw InvalidArgument("BlockSparseMatrix: block shape mismatch");
  }
  if (i <= j) {
    upper_block(i, j) += block;
  } else {
    upper_block(j, i) += block.transpose();
  }
}

bool BlockSparseMatrix::has_block(int i, int j) const {
  return blocks_.count({std::min(i, j), std::max(i, j)}) > 0;
}

Eigen::MatrixXd BlockSparseMatrix::block(int i, int j) const {
  auto it = blocks_.find({std::min(i, j), std::max(i, j)});
  if (it == blocks_.end()) return Eigen::MatrixXd::Zero(sizes_[i], sizes_[j]);
  if (i <= j) return it->second;
  return it->second.transpose();
}

Vector BlockSparseMatrix::hess_vec(const Vector& v) const {
  if (v.size() != dimension_) throw InvalidArgument("hess_vec: dimension mismatch");
  Vector y = Vector::Zero(dimension_);
  for (const auto& [key, m] : blocks_) {
    const auto [i, j] = key;
    y.segment(offsets_[i], sizes_[i]).noalias() += m * v.segment(offsets_[j], sizes_[j]);
    if (i != j) {
      y.segment(offsets_[j], sizes_[j]).noalias() +=
          m.transpose() * v.segment(offsets_[i], sizes_[i]);
    }
  }
  return y;
}

Vector BlockSparseMatrix::block_row_product(int i, const Vector& v) const {
  Vector y = Vector::Zero(sizes_[i]);
  for (int j : rows_[i]) {
    const auto& m = blocks_.at({std::min(i, j), std::max(i, j)});
    if (i <= j) {
      y.noalias() += m * v.segment(offsets_[j], sizes_[j]);
    } else {
      y.noalias() += m.transpose() * v.segment(offsets_[j], sizes_[j]);
    }
  }
  return y;
}

Eigen::MatrixXd BlockSparseMatrix::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const auto& [key, m] : blocks_) {
    const auto [i, j] = key;
    d.block(offsets_[i], offsets_[j], sizes_[i], sizes_[j]) = m;
    if (i != j) d.block(offsets_[j], offsets_[i], sizes_[j], sizes_[i]) = m.transpose();
  }
  return d;
}

double BlockSparseMatrix::norm_upper_bound() const {
  Vector rows = Vector::Zero(dimension_);
  for (const auto& [key, m] : blocks_) {
    const auto [i, j] = key;
    rows.segment(offsets_[i], sizes_[i]) += m.cwiseAbs().rowwise().sum();
    if (i != j) rows.segment(offsets_[j], sizes_[j]) += m.cwiseAbs().colwise().sum().transpose();
  }
  return dimension_ == 0 ? 0.0 : rows.maxCoeff();
}

CouplingGraph BlockSparseMatrix::pattern(double tol) const {
  CouplingGraph g(num_nodes());
  for (const auto& [key, m] : blocks_) {
    if (key.first != key.second && m.cwiseAbs().maxCoeff() > tol) g.add_edge(key.first, key.second);
  }
  return g;
}

void BlockSparseMatrix::scale(double factor) {
  for (auto& entry : blocks_) entry.second *= factor;
}

void BlockSparseMatrix::add_identity(double shift) {
  for (int i = 0; i < num_nodes(); ++i) {
    upper_block(i, i).diagonal().array() += shift;
  }
}

}  // namespace trap
