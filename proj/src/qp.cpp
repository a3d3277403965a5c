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

#include "trap/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "trap/errors.hpp"

namespace trap {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CouplingGraph blocks_of(const Eigen::MatrixXd& H, const std::vector<int>& sizes) {
  CouplingGraph g(static_cast<int>(sizes.size()));
  std::vector<int> off(sizes.size(), 0);
  for (size_t i = 1; i < sizes.size(); ++i) off[i] = off[i - 1] + sizes[i - 1];
  for (size_t i = 0; i < sizes.size(); ++i) {
    for (size_t j = i + 1; j < sizes.size(); ++j) {
      if (H.block(off[i], off[j], sizes[i], sizes[j]).cwiseAbs().maxCoeff() > 0.0) {
        g.add_edge(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }
  return g;
}

BlockSparseMatrix to_blocks(const Eigen::MatrixXd& H, const std::vector<int>& sizes,
                            const CouplingGraph& pattern) {
  BlockSparseMatrix B(sizes, pattern);
  for (int i = 0; i < B.num_nodes(); ++i) {
    for (int j : B.row_nodes(i)) {
      if (j < i) continue;
      B.add_block(i, j, H.block(B.node_offset(i), B.node_offset(j), sizes[i], sizes[j]));
    }
  }
  return B;
}

}  // namespace

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd H, Vector c, std::vector<int> node_sizes,
                                   BoxSet box, double c0)
    : H_(std::move(H)), c_(std::move(c)), c0_(c0), sizes_(std::move(node_sizes)), box_(std::move(box)) {
  const int n = static_cast<int>(c_.size());
  int total = 0;
  for (int s : sizes_) total += s;
  if (H_.rows() != n || H_.cols() != n || box_.dimension() != n || total != n) {
    throw InvalidArgument("QuadraticProblem: inconsistent dimensions");
  }
  if ((H_ - H_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + H_.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("QuadraticProblem: H must be symmetric");
  }
  coupling_ = blocks_of(H_, sizes_);
}

double QuadraticProblem::value(const Vector& x) const { return 0.5 * x.dot(H_ * x) + c_.dot(x) + c0_; }
Vector QuadraticProblem::gradient(const Vector& x) const { return H_ * x + c_; }
BlockSparseMatrix QuadraticProblem::hessian(const Vector&) const {
  return to_blocks(H_, sizes_, coupling_);
}

SoftplusQuadratic::SoftplusQuadratic(Eigen::MatrixXd H, Vector c, Vector w,
                                     std::vector<int> node_sizes, BoxSet box)
    : base_(std::move(H), std::move(c), std::move(node_sizes), std::move(box)), w_(std::move(w)) {
  if (w_.size() != base_.dimension()) throw InvalidArgument("SoftplusQuadratic: weight size mismatch");
}

double SoftplusQuadratic::value(const Vector& x) const {
  double s = base_.value(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += w_[i] * (std::max(x[i], 0.0) + std::log1p(std::exp(-std::abs(x[i]))));
  }
  return s;
}

Vector SoftplusQuadratic::gradient(const Vector& x) const {
  Vector g = base_.gradient(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) g[i] += w_[i] / (1.0 + std::exp(-x[i]));
  return g;
}

BlockSparseMatrix SoftplusQuadratic::hessian(const Vector& x) const {
  BlockSparseMatrix B = base_.hessian(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-x[i]));
    B.add_symmetric(static_cast<int>(i), static_cast<int>(i), w_[i] * s * (1.0 - s));
  }
  return B;
}

QpFixture random_colored_qp(std::uint64_t seed, int num_colors, bool convex, int max_n) {
  if (num_colors < 1) throw InvalidArgument("random_colored_qp: need at least one colour");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> size_dist(1, 3);

  std::vector<int> sizes, colors;
  int n = 0;
  const int target = std::uniform_int_distribution<int>(std::max(num_colors, 4), max_n)(rng);
  while (true) {
    const int s = size_dist(rng);
    if (n + s > target && static_cast<int>(sizes.size()) >= num_colors) break;
    if (n + s > max_n) break;
    sizes.push_back(s);
    n += s;
  }
  const int N = static_cast<int>(sizes.size());
  for (int i = 0; i < N; ++i) colors.push_back(i < num_colors ? i : static_cast<int>(rng() % num_colors));

  std::vector<int> off(N, 0);
  for (int i = 1; i < N; ++i) off[i] = off[i - 1] + sizes[i - 1];
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  std::bernoulli_distribution link(std::min(1.0, 3.0 / std::max(N, 1)));
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const bool allowed = num_colors == 1 || colors[i] != colors[j];
      if (!allowed || !link(rng)) continue;
      for (int a = 0; a < sizes[i]; ++a) {
        for (int b = 0; b < sizes[j]; ++b) {
          const double v = unif(rng);
          H(off[i] + a, off[j] + b) = v;
          H(off[j] + b, off[i] + a) = v;
        }
      }
    }
    for (int a = 0; a < sizes[i]; ++a) {
      for (int b = a; b < sizes[i]; ++b) {
        const double v = unif(rng);
        H(off[i] + a, off[i] + b) = v;
        H(off[i] + b, off[i] + a) = v;
      }
    }
  }
  if (convex) {
    for (int r = 0; r < n; ++r) {
      const double off_sum = H.row(r).cwiseAbs().sum() - std::abs(H(r, r));
      H(r, r) = off_sum + 0.1 + std::abs(unif(rng)) * 2.0;
    }
  } else {
    for (int r = 0; r < n; ++r) H(r, r) = 3.0 * unif(rng);
  }

  Vector c(n), lo(n), hi(n), x0(n);
  for (int i = 0; i < n; ++i) {
    c[i] = 3.0 * unif(rng);
    const double kind = std::abs(unif(rng));
    const double a = 2.0 * unif(rng);
    const double width = 0.1 + 2.0 * std::abs(unif(rng));
    if (kind < 0.15) {
      lo[i] = -kInf;
      hi[i] = kInf;
    } else if (kind < 0.3) {
      lo[i] = a;
      hi[i] = kInf;
    } else if (kind < 0.4) {
      lo[i] = -kInf;
      hi[i] = a;
    } else {
      lo[i] = a;
      hi[i] = a + width;
    }
    const double base = std::isfinite(lo[i]) ? lo[i] : (std::isfinite(hi[i]) ? hi[i] - 1.0 : 0.0);
    x0[i] = base + 1.5 * std::abs(unif(rng));
    x0[i] = std::clamp(x0[i], lo[i], hi[i]);
    if (kind > 0.85) x0[i] = std::isfinite(lo[i]) ? lo[i] : x0[i];
  }
  Partition partition(sizes, colors);
  QuadraticProblem problem(std::move(H), std::move(c), sizes, BoxSet(lo, hi));
  const double delta = std::pow(10.0, 2.0 * unif(rng));
  return QpFixture{std::move(problem), std::move(partition), std::move(x0), delta};
}

BoxQpWithSolution box_qp_with_solution(std::uint64_t seed, int n, int n_bounded) {
  if (n_bounded > n) throw InvalidArgument("box_qp_with_solution: n_bounded exceeds n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  std::bernoulli_distribution link(std::min(1.0, 2.5 / n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!link(rng)) continue;
      H(i, j) = H(j, i) = unif(rng);
    }
  }
  for (int r = 0; r < n; ++r) {
    H(r, r) = H.row(r).cwiseAbs().sum() + 0.5 + std::abs(unif(rng));
  }
  Vector x_star(n), lo(n), hi(n), grad(n), x0(n);
  ActiveSet active;
  for (int i = 0; i < n; ++i) {
    if (i >= n_bounded) {
      lo[i] = -kInf;
      hi[i] = kInf;
      x_star[i] = 2.0 * unif(rng);
      grad[i] = 0.0;
      x0[i] = x_star[i] + 3.0 * unif(rng);
      continue;
    }
    lo[i] = -1.0 + 0.5 * unif(rng);
    hi[i] = lo[i] + 1.0 + std::abs(unif(rng));
    const double lambda = 0.5 + std::abs(unif(rng));
    const int pattern = static_cast<int>(rng() % 3);
    if (pattern == 0) {
      x_star[i] = lo[i];
      grad[i] = lambda;
      active.at_lower.push_back(i);
    } else if (pattern == 1) {
      x_star[i] = hi[i];
      grad[i] = -lambda;
      active.at_upper.push_back(i);
    } else {
      x_star[i] = lo[i] + (0.2 + 0.6 * std::abs(unif(rng))) * (hi[i] - lo[i]);
      grad[i] = 0.0;
    }
    // Start on the opposite side of the interval from the optimum.
    x0[i] = std::clamp(hi[i] + lo[i] - x_star[i], lo[i], hi[i]);
  }
  Vector c = grad - H * x_star;
  std::vector<int> sizes(n, 1);
  QuadraticProblem problem(std::move(H), std::move(c), sizes, BoxSet(lo, hi));
  return BoxQpWithSolution{std::move(problem), std::move(x_star), std::move(x0), std::move(active)};
}

EqualityQp::EqualityQp(Eigen::MatrixXd H, Vector c, Eigen::MatrixXd A, Vector b, BoxSet box)
    : H_(std::move(H)), c_(std::move(c)), A_(std::move(A)), b_(std::move(b)), box_(std::move(box)) {
  const int n = static_cast<int>(c_.size());
  if (H_.rows() != n || A_.cols() != n || A_.rows() != b_.size() || box_.dimension() != n) {
    throw InvalidArgument("EqualityQp: inconsistent dimensions");
  }
  sizes_.assign(n, 1);
  objective_coupling_ = blocks_of(H_, sizes_);
  for (Eigen::Index j = 0; j < A_.rows(); ++j) {
    std::vector<int> nodes;
    for (int i = 0; i < n; ++i) {
      if (A_(j, i) != 0.0) nodes.push_back(i);
    }
    incidence_.push_back(nodes);
  }
}

double EqualityQp::objective(const Vector& x) const { return 0.5 * x.dot(H_ * x) + c_.dot(x); }
Vector EqualityQp::objective_gradient(const Vector& x) const { return H_ * x + c_; }

void EqualityQp::add_objective_hessian(const Vector&, double scale, BlockSparseMatrix& H) const {
  for (Eigen::Index i = 0; i < H_.rows(); ++i) {
    for (Eigen::Index j = i; j < H_.cols(); ++j) {
      if (H_(i, j) != 0.0) H.add_symmetric(static_cast<int>(i), static_cast<int>(j), scale * H_(i, j));
    }
  }
}

Vector EqualityQp::constraints(const Vector& x) const { return A_ * x - b_; }

std::vector<SparseRow> EqualityQp::jacobian(const Vector&) const {
  std::vector<SparseRow> rows(A_.rows());
  for (Eigen::Index j = 0; j < A_.rows(); ++j) {
    for (int i : incidence_[j]) rows[j].emplace_back(i, A_(j, i));
  }
  return rows;
}

void EqualityQp::add_constraint_hessians(const Vector&, const Vector&, BlockSparseMatrix&) const {}

EqualityQp simplex_projection_qp(int n) {
  return EqualityQp(Eigen::MatrixXd::Identity(n, n), Vector::Zero(n), Eigen::MatrixXd::Ones(1, n),
                    Vector::Ones(1), BoxSet::unbounded(n));
}

}  // namespace trap
