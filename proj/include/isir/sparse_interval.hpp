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

#include "isir/ridge_sir.hpp"

namespace isir {

// Contiguous partition of the grid into D intervals. Interval k covers grid
// columns [begin_k, end_k) and the closed time range [t_lo_k, t_hi_k].
struct IntervalPartition {
  struct Interval {
    int begin = 0;
    int end = 0;
    double t_lo = 0;
    double t_hi = 0;
  };
  std::vector<Interval> intervals;

  int D() const { return static_cast<int>(intervals.size()); }
  int p() const { return intervals.empty() ? 0 : intervals.back().end; }
  double length(int k) const {
    return intervals[k].t_hi - intervals[k].t_lo;
  }

  // One singleton interval per grid point.
  static IntervalPartition singletons(const VectorXd& grid);

  // Throws InvalidArgument unless intervals are nonempty and tile [0, p).
  void validate() const;
};

// Stacked shrinkage problem: one block of n rows per index direction. The
// target entry for observation i in block j is the slice score C(j, h(i));
// design column k of block j aggregates centered X columns over interval k
// weighted by direction j (build_sparse_problem subtracts the column means
// so the design matches the centered target).
struct SparseProblem {
  VectorXd target;  // d * n
  MatrixXd design;  // (d * n) x D
  IntervalPartition partition;
  int d = 0;
  int n = 0;
};

VectorXd projection_target(const RidgeFit& fit, const SliceAssignment& slices);
MatrixXd interval_design(const MatrixXd& X, const MatrixXd& A,
                         const IntervalPartition& part);
SparseProblem build_sparse_problem(const MatrixXd& X, const RidgeFit& fit,
                                   const SliceAssignment& slices,
                                   const IntervalPartition& part);

// Cached quadratic pieces of the least squares term, enough to run
// coordinate descent and evaluate the objective without the raw design.
struct QuadForm {
  MatrixXd gram;  // design' design
  VectorXd dtp;   // design' target
  double ptp = 0;  // target' target
  double m = 0;    // d * n normalizer
};

QuadForm make_quadform(const VectorXd& target, const MatrixXd& design);

// Penalized objective (1 / (2m)) |target - design alpha|^2 + mu1 |alpha|_1
// evaluated from the cached quadratic pieces.
double lasso_objective(const QuadForm& q, const VectorXd& alpha, double mu1);

// Cyclic coordinate descent at a single penalty, warm started from alpha.
// Stops when the largest coordinate update falls below
// tol * (1 + max |alpha|). Returns the number of sweeps; optionally records
// the objective after each sweep.
int lasso_cd(const QuadForm& q, double mu1, VectorXd& alpha,
             double tol = 1e-7, std::vector<double>* sweep_objectives = nullptr);

// Regularization path on a geometric penalty grid from mu_max down to
// eps_ratio * mu_max, warm starting each solve from the previous one.
// Design columns are deliberately not rescaled: interval aggregation sets
// their natural relative size.
struct LassoPath {
  VectorXd mu1_grid;    // G, decreasing
  MatrixXd alphas;      // G x D
  std::vector<int> nnz;  // G
  VectorXd gcv;         // G
  double mu_max = 0;
  bool degenerate = false;  // target carries no signal for the design
};

LassoPath lasso_path(const SparseProblem& prob, int grid_size = 100,
                     double eps_ratio = 1e-3);

// Generalized cross validation choice along a path: smallest GCV, ties
// resolved toward the larger penalty.
struct GcvChoice {
  int index = -1;
  double mu1 = 0;
  VectorXd alpha;
  double gcv = 0;
};

GcvChoice select_gcv(const LassoPath& path);

// Boundary solutions of the path at sparsity proportion prop, and the index
// sets that drive interval fusion. alpha_plus is the densest solution with
// at most ceil(prop * D) nonzeros (last such when scanning from mu_max
// down); alpha_minus is the densest solution with at least ceil(prop * D)
// zeros (first such when scanning from the dense end). Strong nonzeros are
// the support of alpha_plus, strong zeros the zero set of alpha_minus;
// indices falling in both sets are ambiguous and dropped from each.
struct ThresholdSets {
  VectorXd alpha_plus;
  VectorXd alpha_minus;
  bool plus_found = false;
  bool minus_found = false;
  std::vector<int> strong_nonzeros;
  std::vector<int> strong_zeros;
};

ThresholdSets threshold_solutions(const LassoPath& path, double prop);

// Rescale the fitted directions by the interval coefficients and
// re-orthonormalize under the (sigma + metric_ridge I) inner product.
// Rows in zeroed intervals stay exactly zero; columns whose norm collapses
// below 1e-10 are dropped.
struct SparseDirections {
  MatrixXd A_sparse;         // p x d_kept
  std::vector<int> support;  // intervals with nonzero alpha
  bool empty_model = false;
  int dropped_columns = 0;
};

SparseDirections sparse_directions(const RidgeFit& fit, const VectorXd& alpha,
                                   const IntervalPartition& part,
                                   double metric_ridge);

}  // namespace isir
