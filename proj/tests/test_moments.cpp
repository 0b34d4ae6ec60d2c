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

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "isir/errors.hpp"
#include "isir/linalg.hpp"
#include "isir/moments.hpp"
#include "isir/types.hpp"

namespace {

using isir::MatrixXd;
using isir::VectorXd;

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

TEST(Slices, EqualCountWithRemainderUpFront) {
  const VectorXd y = vec({0.3, 1.2, 0.1, 0.7, 0.5, 0.9, 0.2});
  const isir::SliceAssignment s = isir::make_slices(y, 3);
  ASSERT_EQ(s.H(), 3);
  ASSERT_EQ(s.n(), 7);
  EXPECT_EQ(s.counts, (std::vector<int>{3, 2, 2}));
  EXPECT_EQ(s.slice_of, (std::vector<int>{0, 2, 0, 1, 1, 2, 0}));
}

TEST(Slices, TiesKeepOriginalOrder) {
  const VectorXd y = vec({1.0, 1.0, 1.0, 2.0});
  const isir::SliceAssignment s = isir::make_slices(y, 2);
  EXPECT_EQ(s.slice_of, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(s.counts, (std::vector<int>{2, 2}));
}

TEST(Slices, EveryObservationAssignedOnce) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> dist;
  VectorXd y(23);
  for (int i = 0; i < y.size(); ++i) y[i] = dist(gen);
  const isir::SliceAssignment s = isir::make_slices(y, 5);
  std::vector<int> seen(5, 0);
  for (int h : s.slice_of) {
    ASSERT_GE(h, 0);
    ASSERT_LT(h, 5);
    ++seen[h];
  }
  EXPECT_EQ(seen, s.counts);
  EXPECT_EQ(s.counts, (std::vector<int>{5, 5, 5, 4, 4}));
}

TEST(Slices, RejectsBadSliceCounts) {
  const VectorXd y = vec({1.0, 2.0, 3.0});
  EXPECT_THROW(isir::make_slices(y, 1), isir::InvalidArgument);
  EXPECT_THROW(isir::make_slices(y, 4), isir::InvalidArgument);
}

TEST(Moments, UnivariateHandComputed) {
  MatrixXd X(4, 1);
  X << 1, 2, 3, 4;
  const VectorXd y = vec({1.0, 2.0, 3.0, 4.0});
  const isir::MomentSet m = isir::compute_moments(X, isir::make_slices(y, 2));
  EXPECT_NEAR(m.grand_mean[0], 2.5, 1e-15);
  EXPECT_NEAR(m.sigma(0, 0), 1.25, 1e-15);
  EXPECT_NEAR(m.slice_means(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(m.slice_means(1, 0), 3.5, 1e-15);
  EXPECT_NEAR(m.freqs[0], 0.5, 1e-15);
  EXPECT_NEAR(m.freqs[1], 0.5, 1e-15);
  EXPECT_NEAR(m.gamma(0, 0), 1.0, 1e-15);
}

TEST(Moments, BivariateHandComputed) {
  MatrixXd X(4, 2);
  X << 0, 0,
       1, 0,
       0, 1,
       1, 1;
  const VectorXd y = vec({1.0, 2.0, 3.0, 4.0});
  const isir::MomentSet m = isir::compute_moments(X, isir::make_slices(y, 2));
  MatrixXd sigma_expect(2, 2);
  sigma_expect << 0.25, 0.0, 0.0, 0.25;
  MatrixXd gamma_expect(2, 2);
  gamma_expect << 0.0, 0.0, 0.0, 0.25;
  EXPECT_LT((m.sigma - sigma_expect).norm(), 1e-15);
  EXPECT_LT((m.gamma - gamma_expect).norm(), 1e-15);
}

TEST(Moments, BetweenSliceCovarianceStaysBelowTotal) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> dist;
  const int n = 60, p = 8, H = 5;
  MatrixXd X(n, p);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = dist(gen);
    y[i] = dist(gen);
  }
  const isir::MomentSet m = isir::compute_moments(X, isir::make_slices(y, H));
  const isir::SymEigen diff = isir::sym_eigen(m.sigma - m.gamma);
  EXPECT_GE(diff.values.minCoeff(), -1e-12);
  const isir::SymEigen gam = isir::sym_eigen(m.gamma);
  for (int k = H - 1; k < p; ++k) EXPECT_LT(gam.values[k], 1e-10);
}

TEST(Moments, FoldAssignmentInterleavesRanks) {
  const VectorXd y = vec({0.3, 1.2, 0.1, 0.7, 0.5, 0.9, 0.2});
  const std::vector<int> folds = isir::fold_assignment(y, 3);
  EXPECT_EQ(folds, (std::vector<int>{2, 0, 0, 1, 0, 2, 1}));
}

TEST(Dataset, ValidationRejectsBadInput) {
  isir::Dataset d;
  d.X = MatrixXd::Zero(3, 2);
  d.y = VectorXd::Zero(3);
  d.grid = vec({0.0, 1.0});
  EXPECT_NO_THROW(d.validate());

  isir::Dataset bad_grid = d;
  bad_grid.grid = vec({1.0, 1.0});
  EXPECT_THROW(bad_grid.validate(), isir::InvalidData);

  isir::Dataset nan_x = d;
  nan_x.X(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(nan_x.validate(), isir::InvalidData);

  isir::Dataset short_y = d;
  short_y.y = VectorXd::Zero(2);
  EXPECT_THROW(short_y.validate(), isir::InvalidData);

  isir::Dataset one_row = d;
  one_row.X = MatrixXd::Zero(1, 2);
  one_row.y = VectorXd::Zero(1);
  EXPECT_THROW(one_row.validate(), isir::InvalidData);
}

}  // namespace
