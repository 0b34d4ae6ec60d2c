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

#include <vector>

#include "isir/types.hpp"

namespace isir {

// Equal-count slicing of the response. Slice ids are 0-based: slice h gets a
// contiguous block of ranks of y sorted ascending (ties broken by original
// row index), and block sizes differ by at most one, the first n % H slices
// taking the extra observation.
struct SliceAssignment {
  std::vector<int> slice_of;  // n entries in [0, H)
  std::vector<int> counts;    // H entries, each >= 1

  int H() const { return static_cast<int>(counts.size()); }
  int n() const { return static_cast<int>(slice_of.size()); }
};

// Requires 2 <= H <= n and finite y.
SliceAssignment make_slices(const VectorXd& y, int H);

// First and second moment summaries feeding the regularized inverse
// regression eigenproblem. sigma uses the 1/n divisor; gamma is the
// between-slice covariance of the centered slice means.
struct MomentSet {
  VectorXd grand_mean;   // p
  MatrixXd slice_means;  // H x p
  VectorXd freqs;        // H, sums to 1
  MatrixXd sigma;        // p x p
  MatrixXd gamma;        // p x p
  int n = 0;

  int H() const { return static_cast<int>(freqs.size()); }
  int p() const { return static_cast<int>(grand_mean.size()); }
};

MomentSet compute_moments(const MatrixXd& X, const SliceAssignment& slices);

// Deterministic fold split for cross validation: observation i goes to fold
// rank(y_i) mod folds (ties by row index), so every fold covers the whole
// response range and the split survives row permutations.
std::vector<int> fold_assignment(const VectorXd& y, int folds);

}  // namespace isir
