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

#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "trap/block_sparse.hpp"
#include "trap/errors.hpp"

namespace trap {
namespace {

BlockSparseMatrix random_block_matrix(std::mt19937_64& rng, const std::vector<int>& sizes,
                                      double density) {
  BlockSparseMatrix M(sizes);
  std::normal_distribution<double> n01;
  std::bernoulli_distribution keep(density);
  for (int i = 0; i < static_cast<int>(sizes.size()); ++i) {
    for (int j = i; j < static_cast<int>(sizes.size()); ++j) {
      if (i != j && !keep(rng)) continue;
      Eigen::MatrixXd b(sizes[i], sizes[j]);
      for (int r = 0; r < b.rows(); ++r) {
        for (int c = 0; c < b.cols(); ++c) b(r, c) = n01(rng);
      }
      if (i == j) b = 0.5 * (b + b.transpose()).eval();
      M.add_block(i, j, b);
    }
  }
  return M;
}

TEST(HessVec, IdentityBlocksReturnInput) {
  BlockSparseMatrix M({2, 3});
  M.add_identity(1.0);
  Vector v(5);
  v << 1, -2, 3, 0.5, 7;
  EXPECT_EQ(M.hess_vec(v), v);
}

TEST(HessVec, ZeroVector) {
  std::mt19937_64 rng(3);
  const BlockSparseMatrix M = random_block_matrix(rng, {2, 2, 1}, 1.0);
  EXPECT_EQ(M.hess_vec(Vector::Zero(5)), Vector::Zero(5));
}

TEST(HessVec, MatchesDenseProduct) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> sizes;
    for (int i = 0; i < 2 + trial % 6; ++i) sizes.push_back(1 + (i * 7 + trial) % 3);
    const BlockSparseMatrix M = random_block_matrix(rng, sizes, 0.4);
    // Dense oracle assembled entry by entry from the stored blocks.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M.dimension(), M.dimension());
    for (int i = 0; i < M.num_nodes(); ++i) {
      for (int j = 0; j < M.num_nodes(); ++j) {
        D.block(M.node_offset(i), M.node_offset(j), sizes[i], sizes[j]) = M.block(i, j);
      }
    }
    EXPECT_LT((D - D.transpose()).norm(), 1e-15);
    Vector v(M.dimension());
    for (int k = 0; k < v.size(); ++k) v[k] = n01(rng);
    const Vector expected = D * v;
    EXPECT_LE((M.hess_vec(v) - expected).norm(), 1e-14 * std::max(1.0, expected.norm()));
    EXPECT_LE((M.dense() - D).norm(), 0.0);
    for (int i = 0; i < M.num_nodes(); ++i) {
      EXPECT_LE((M.block_row_product(i, v) - expected.segment(M.node_offset(i), sizes[i])).norm(),
                1e-13);
    }
  }
}

TEST(BlockSparse, AddSymmetricWritesBothTriangles) {
  BlockSparseMatrix M({1, 2});
  M.add_symmetric(0, 2, 4.0);
  M.add_symmetric(1, 1, 3.0);
  const Eigen::MatrixXd D = M.dense();
  EXPECT_EQ(D(0, 2), 4.0);
  EXPECT_EQ(D(2, 0), 4.0);
  EXPECT_EQ(D(1, 1), 3.0);
  EXPECT_TRUE(M.has_block(0, 1));
  EXPECT_TRUE(M.has_block(1, 0));
}

TEST(BlockSparse, NormBoundDominatesSpectralNorm) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const BlockSparseMatrix M = random_block_matrix(rng, {2, 1, 3, 2}, 0.5);
    const Eigen::MatrixXd D = M.dense();
    const double spectral = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(D).eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(M.norm_upper_bound(), spectral - 1e-12);
  }
}

TEST(BlockSparse, PatternListsNonzeroOffDiagonalBlocks) {
  BlockSparseMatrix M({1, 1, 1});
  M.add_symmetric(0, 2, 1.0);
  M.add_symmetric(1, 1, 1.0);
  const CouplingGraph g = M.pattern();
  EXPECT_EQ(g.num_edges(), 1);
  EXPECT_TRUE(g.has_edge(0, 2));
}

TEST(BlockSparse, ScaleAndShift) {
  BlockSparseMatrix M({2});
  M.add_symmetric(0, 1, 2.0);
  M.scale(3.0);
  M.add_identity(1.0);
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 6, 6, 1;
  EXPECT_EQ(M.dense(), expected);
}

}  // namespace
}  // namespace trap
