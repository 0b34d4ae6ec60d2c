// Copyright 2026 The isir authors
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

#pragma once

#include "isir/linalg.hpp"
#include "isir/moments.hpp"

namespace isir {

// Result of the regularized inverse regression step. Columns of A span the
// estimated index space and are orthonormal under the (sigma + mu2 I) inner
// product; truncating to the first d columns yields the best rank-d fit, so
// consumers may slice A and C without refitting.
struct RidgeFit {
  MatrixXd A;            // p x d
  VectorXd eigenvalues;  // d, nonincreasing
  MatrixXd C;            // d x H, C(:, h) = A' (slice mean h - grand mean)
  double mu2 = 0;
  int d = 0;
  MomentSet moments;     // retained for the downstream shrinkage steps
};

// Solves the generalized eigenproblem gamma a = lambda (sigma + mu2 I) a by
// whitening with inv_sqrt and keeping the leading d_max directions.
// Requires 1 <= d_max <= min(p, H - 1), mu2 >= 0, and mu2 > 0 when p >= n.
RidgeFit ridge_sir_fit(const MomentSet& m, double mu2, int d_max);

// Index scores X * A for downstream regressors.
MatrixXd edr_scores(const MatrixXd& X, const MatrixXd& A);

// Weighted least squares objective the slice scores C minimize given A.
// Exposed so tests can probe optimality by perturbation.
double ridge_objective(const MomentSet& m, const MatrixXd& A, double mu2,
                       const MatrixXd& C);

}  // namespace isir
