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

#include <string>
#include <utility>
#include <vector>

#include "isir/ridge_sir.hpp"

namespace isir {

struct TuneGrid {
  std::vector<double> mu2_values;  // strictly positive; empty picks decades
                                   // from 1e-2 to 1e5
  int d0 = 0;                      // largest dimension tried; 0 picks H - 1
  int folds = 10;
};

struct TuneResult {
  double mu2_star = 0;
  int d_star = 0;
  MatrixXd cv_err;  // |mu2_values| x d0
  MatrixXd r_hat;   // |mu2_values| x d0
  std::vector<std::pair<double, int>> trace;  // (mu2, d) per alternation
  bool stabilized = false;
  std::vector<std::string> warnings;
};

// Oblique projector A (A' M A)^{-1} A' M onto span(A), self adjoint in the
// M inner product. Throws RankDeficient when A' M A is numerically singular
// (condition number above 1e12).
MatrixXd ridge_projector(const MatrixXd& A, const MatrixXd& M);

// Fold averaged projection error of the rank-d ridge fit, evaluated on each
// held out fold's own slice statistics in the inverse covariance metric of
// that fold (ridged by 1e-8 tr(sigma)/p). Rows follow mu2_values; column
// j holds dimension d = j + 1.
MatrixXd cv_error_grid(const Dataset& data, int H, const TuneGrid& grid);

// Subspace stability curve for one mu2: R(d) = d minus the fold averaged
// trace of the product of leave-fold-out and full-data projectors of rank d.
VectorXd r_hat_curve(const Dataset& data, int H, double mu2, int d0,
                     int folds);

// Largest dimension before the sharpest collapse of the growth of r_curve:
// argmax over d of (delta_d - delta_{d+1}) with delta_d = r(d+1) - r(d),
// ties toward the smallest d; a curve of length 2 yields 1.
int elbow(const VectorXd& r_curve);

// Alternating argmin on precomputed tables, exposed for direct testing.
struct AlternationResult {
  int mu2_index = 0;
  int d_star = 0;
  std::vector<std::pair<int, int>> trace;  // (mu2 index, d) per round
  bool stabilized = false;
};

AlternationResult alternate_select(const MatrixXd& cv_err,
                                   const MatrixXd& r_hat,
                                   int max_rounds = 20);

// One cross validation pass filling both tables, then the alternation
// starting from d = d0.
TuneResult joint_tune(const Dataset& data, int H, const TuneGrid& grid);

}  // namespace isir
