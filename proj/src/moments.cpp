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

#include "isir/moments.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace isir {

void Dataset::validate() const {
  if (X.rows() < 2) throw InvalidData("dataset: need at least 2 observations");
  if (X.cols() < 1) throw InvalidData("dataset: need at least 1 grid point");
  if (y.size() != X.rows())
    throw InvalidData("dataset: y length does not match rows of X");
  if (grid.size() != X.cols())
    throw InvalidData("dataset: grid length does not match columns of X");
  if (!X.allFinite() || !y.allFinite() || !grid.allFinite())
    throw InvalidData("dataset: non-finite values");
  for (int j = 1; j < grid.size(); ++j) {
    if (!(grid[j] > grid[j - 1]))
      throw InvalidData("dataset: grid must be strictly increasing");
  }
}

SliceAssignment make_slices(const VectorXd& y, int H) {
  const int n = static_cast<int>(y.size());
  if (!y.allFinite()) throw InvalidData("make_slices: non-finite response");
  if (H < 2 || H > n)
    throw InvalidArgument("make_slices: H must satisfy 2 <= H <= n, got H=" +
                          std::to_string(H) + " n=" + std::to_string(n));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return y[a] < y[b]; });

  SliceAssignment s;
  s.slice_of.assign(n, -1);
  s.counts.assign(H, 0);
  const int base = n / H;
  const int extra = n % H;
  int rank = 0;
  for (int h = 0; h < H; ++h) {
    s.counts[h] = base + (h < extra ? 1 : 0);
    for (int c = 0; c < s.counts[h]; ++c) s.slice_of[order[rank++]] = h;
  }
  return s;
}

MomentSet compute_moments(const MatrixXd& X, const SliceAssignment& slices) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const int H = slices.H();
  if (n != slices.n())
    throw InvalidArgument("compute_moments: X rows do not match slicing");
  if (n < 1 || p < 1) throw InvalidArgument("compute_moments: empty input");
  if (!X.allFinite()) throw InvalidData("compute_moments: non-finite X");
  for (int h = 0; h < H; ++h) {
    if (slices.counts[h] < 1)
      throw InvalidArgument("compute_moments: empty slice " +
                            std::to_string(h));
  }

  MomentSet m;
  m.n = n;
  m.grand_mean = X.colwise().mean().transpose();

  m.slice_means = MatrixXd::Zero(H, p);
  for (int i = 0; i < n; ++i) m.slice_means.row(slices.slice_of[i]) += X.row(i);
  m.freqs = VectorXd(H);
  for (int h = 0; h < H; ++h) {
    m.slice_means.row(h) /= slices.counts[h];
    m.freqs[h] = static_cast<double>(slices.counts[h]) / n;
  }

  const MatrixXd Xc = X.rowwise() - m.grand_mean.transpose();
  m.sigma = (Xc.adjoint() * Xc) / n;

  const MatrixXd Mc = m.slice_means.rowwise() - m.grand_mean.transpose();
  m.gamma = Mc.adjoint() * m.freqs.asDiagonal() * Mc;
  return m;
}

std::vector<int> fold_assignment(const VectorXd& y, int folds) {
  const int n = static_cast<int>(y.size());
  if (folds < 1 || folds > n)
    throw InvalidArgument("fold_assignment: folds must lie in [1, n]");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return y[a] < y[b]; });
  std::vector<int> fold_of(n);
  for (int rank = 0; rank < n; ++rank) fold_of[order[rank]] = rank % folds;
  return fold_of;
}

}  // namespace isir
