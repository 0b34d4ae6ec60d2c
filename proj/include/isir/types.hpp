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

#include <Eigen/Dense>

#include "isir/errors.hpp"

namespace isir {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// A functional dataset on a shared observation grid. Row i of X is the i-th
// curve sampled at the grid points; y holds the scalar responses.
struct Dataset {
  MatrixXd X;      // n x p
  VectorXd y;      // n
  VectorXd grid;   // p, strictly increasing

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }

  // Throws InvalidData unless sizes agree, everything is finite, n >= 2,
  // p >= 1 and the grid strictly increases.
  void validate() const;
};

}  // namespace isir
