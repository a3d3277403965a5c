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

#ifndef TRAP_REFINE_HPP_
#define TRAP_REFINE_HPP_

#include <vector>

#include <Eigen/Cholesky>

#include "trap/cauchy.hpp"
#include "trap/comm_ledger.hpp"
#include "trap/model.hpp"

namespace trap {

struct RefineParams {
  double sigma = 1e-10;
  // Fixed forcing term in (0,1); 0 selects min(0.5, sqrt(||Z^T g||)).
  double xi = 0.0;
  double gamma1 = 0.1;
  double gamma2 = 1.1;
  // 0 selects 5n.
  int max_cg_iters = 0;
  bool precondition = false;

  void validate() const;
};

enum class CgTermination { kConverged, kNegativeCurvature, kBoundaryHit, kMaxIters };
const char* termination_name(CgTermination t);

struct RefineResult {
  Vector y;
  int cg_iterations = 0;
  CgTermination termination = CgTermination::kConverged;
  double model_decrease_from_cauchy = 0.0;
  double forcing = 0.0;
  double tolerance = 0.0;
  std::vector<double> residual_history;
  // Regularised model value after each accepted CG update (starting at z).
  std::vector<double> regularised_values;
  // True when the fraction-of-Cauchy-decrease test failed numerically and y
  // was reset to z.
  bool fell_back_to_cauchy = false;
};

// g_σ = g - σ(z - x) and v -> (B + σI) v.
struct RegularisedModel {
  Vector g_sigma;
  double sigma = 0.0;
  const BlockSparseMatrix* B = nullptr;

  Vector apply(const Vector& v) const { return B->hess_vec(v) + sigma * v; }
  // Value at step p = y - x, without the constant L(x).
  double value(const Vector& p) const { return g_sigma.dot(p) + 0.5 * p.dot(apply(p)); }
};

RegularisedModel regularised_model(const QuadraticModel& model, const Vector& z, double sigma);

// Inverse of the node-diagonal blocks of B + σI restricted to free
// coordinates. Indefinite blocks are shifted by τI, τ doubling from 1e-8.
class BlockJacobiPreconditioner {
 public:
  BlockJacobiPreconditioner(const BlockSparseMatrix& B, double sigma,
                            const std::vector<char>& free_mask);
  Vector apply(const Vector& r) const;
  int shifted_blocks() const { return shifted_; }
  int identity_blocks() const { return identity_; }

 private:
  struct Block {
    std::vector<int> index;
    Eigen::LLT<Eigen::MatrixXd> llt;
    bool identity = false;
  };
  std::vector<Block> blocks_;
  int dimension_ = 0;
  int shifted_ = 0;
  int identity_ = 0;
};

RefineResult scg_refine(const QuadraticModel& model, const Partition& partition,
                        const BoxSet& box, const CauchyResult& cauchy, double delta,
                        const RefineParams& params, CommLedger* ledger = nullptr);

}  // namespace trap

#endif  // TRAP_REFINE_HPP_
