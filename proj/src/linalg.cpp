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

#include "isir/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace isir {

namespace {

constexpr double kTieGap = 1e-12;
constexpr double kZeroComponent = 1e-12;

int first_nonzero_index(const Eigen::Ref<const VectorXd>& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kZeroComponent) return i;
  }
  return static_cast<int>(v.size());
}

}  // namespace

SymEigen sym_eigen(const MatrixXd& M) {
  if (M.rows() != M.cols())
    throw InvalidArgument("sym_eigen: matrix must be square");
  if (!M.allFinite()) throw InvalidData("sym_eigen: non-finite entries");

  const MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("sym_eigen: eigensolver did not converge");

  const int p = static_cast<int>(M.rows());
  // Eigen returns eigenvalues in increasing order; flip to nonincreasing.
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::reverse(idx.begin(), idx.end());

  // Within groups of numerically tied eigenvalues, order deterministically
  // by the first nonvanishing component of each eigenvector.
  int lo = 0;
  while (lo < p) {
    int hi = lo + 1;
    while (hi < p && std::abs(es.eigenvalues()[idx[hi - 1]] -
                              es.eigenvalues()[idx[hi]]) < kTieGap) {
      ++hi;
    }
    if (hi - lo > 1) {
      std::stable_sort(idx.begin() + lo, idx.begin() + hi, [&](int a, int b) {
        return first_nonzero_index(es.eigenvectors().col(a)) <
               first_nonzero_index(es.eigenvectors().col(b));
      });
    }
    lo = hi;
  }

  SymEigen out;
  out.values = VectorXd(p);
  out.vectors = MatrixXd(p, p);
  for (int j = 0; j < p; ++j) {
    out.values[j] = es.eigenvalues()[idx[j]];
    VectorXd v = es.eigenvectors().col(idx[j]);
    int arg = 0;
    for (int i = 1; i < p; ++i) {
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    }
    if (v[arg] < 0) v = -v;
    out.vectors.col(j) = v;
  }
  return out;
}

MatrixXd inv_sqrt(const MatrixXd& M, double ridge) {
  if (ridge < 0) throw InvalidArgument("inv_sqrt: ridge must be nonnegative");
  const SymEigen e = sym_eigen(M);
  const VectorXd lam = e.values.array() + ridge;
  if (lam.minCoeff() <= 1e-12)
    throw SingularMatrix(
        "inv_sqrt: ridged spectrum not safely positive; smallest value " +
        std::to_string(lam.minCoeff()));
  const VectorXd s = lam.array().rsqrt();
  MatrixXd W = e.vectors * s.asDiagonal() * e.vectors.transpose();
  return 0.5 * (W + W.transpose());
}

}  // namespace isir
