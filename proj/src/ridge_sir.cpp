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

#include "isir/ridge_sir.hpp"

#include <string>

namespace isir {

RidgeFit ridge_sir_fit(const MomentSet& m, double mu2, int d_max) {
  const int p = m.p();
  const int H = m.H();
  if (d_max < 1) throw InvalidArgument("ridge_sir_fit: d_max must be >= 1");
  if (d_max > H - 1)
    throw InvalidArgument("ridge_sir_fit: d_max must be <= H - 1, got " +
                          std::to_string(d_max) + " with H=" +
                          std::to_string(H));
  if (d_max > p)
    throw InvalidArgument("ridge_sir_fit: d_max must be <= p");
  if (mu2 < 0) throw InvalidArgument("ridge_sir_fit: mu2 must be >= 0");
  if (mu2 == 0 && p >= m.n)
    throw InvalidArgument(
        "ridge_sir_fit: mu2 must be positive when p >= n (covariance is "
        "singular)");

  const MatrixXd W = inv_sqrt(m.sigma, mu2);
  MatrixXd K = W * m.gamma * W;
  K = 0.5 * (K + K.transpose());
  const SymEigen e = sym_eigen(K);

  RidgeFit fit;
  fit.A = W * e.vectors.leftCols(d_max);
  fit.eigenvalues = e.values.head(d_max);
  fit.mu2 = mu2;
  fit.d = d_max;
  const MatrixXd Mc =
      (m.slice_means.rowwise() - m.grand_mean.transpose()).transpose();
  fit.C = fit.A.transpose() * Mc;  // d x H
  fit.moments = m;
  return fit;
}

MatrixXd edr_scores(const MatrixXd& X, const MatrixXd& A) {
  if (X.cols() != A.rows())
    throw InvalidArgument("edr_scores: X columns must match rows of A");
  return X * A;
}

double ridge_objective(const MomentSet& m, const MatrixXd& A, double mu2,
                       const MatrixXd& C) {
  if (A.rows() != m.p() || C.rows() != A.cols() || C.cols() != m.H())
    throw InvalidArgument("ridge_objective: dimension mismatch");
  const MatrixXd G =
      A.transpose() * (m.sigma + mu2 * MatrixXd::Identity(m.p(), m.p())) * A;
  double obj = 0;
  for (int h = 0; h < m.H(); ++h) {
    const VectorXd diff =
        m.slice_means.row(h).transpose() - m.grand_mean;
    const VectorXd ch = C.col(h);
    obj += m.freqs[h] *
           (ch.dot(G * ch) - 2.0 * diff.dot(A * ch));
  }
  return obj;
}

}  // namespace isir
