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

#include "isir/types.hpp"

namespace isir {

// Symmetric eigendecomposition with a deterministic presentation:
// eigenvalues nonincreasing, ties (gap below 1e-12) ordered by the index of
// the first nonvanishing eigenvector component, and every eigenvector
// flipped so its largest magnitude component is positive.
struct SymEigen {
  VectorXd values;   // nonincreasing
  MatrixXd vectors;  // orthonormal columns, one per eigenvalue
};

SymEigen sym_eigen(const MatrixXd& M);

// Inverse square root of a symmetric PSD matrix after adding ridge to the
// diagonal. Throws SingularMatrix when the ridged spectrum is not safely
// positive (smallest eigenvalue plus ridge at or below 1e-12).
MatrixXd inv_sqrt(const MatrixXd& M, double ridge);

}  // namespace isir
