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
#include <vector>

#include "isir/sparse_interval.hpp"

namespace isir {

struct FusionConfig {
  double P0 = 0.05;       // sparsity proportion added on every escalation
  int grid_size = 100;    // penalty grid resolution
  double eps_ratio = 1e-3;  // smallest penalty relative to mu_max
  int cv_folds = 10;
  int max_iterations = 0;  // 0 picks the default of 2 * p
};

// One fitted model along the fusion trajectory.
struct ModelRecord {
  IntervalPartition partition;
  VectorXd alpha;       // one coefficient per interval
  double mu1 = 0;       // GCV chosen penalty for this partition
  double cv_error = 0;
  int iteration = 0;
};

struct ModelCollection {
  std::vector<ModelRecord> records;  // strictly decreasing interval counts
  int selected = -1;                 // index of the smallest cv_error
  bool reached_iteration_cap = false;
  bool stalled = false;  // no fusion possible even after escalation
  std::vector<std::string> warnings;
};

// Merge consecutive intervals according to the evidence sets. Runs of two
// or more adjacent indices lying entirely in one set fuse into one group; a
// short interval squeezed between two same-set neighbors whose lengths
// dominate its own joins them as well. Overlapping groups are unioned.
// The two sets must be disjoint.
IntervalPartition merge_step(const IntervalPartition& part,
                             const std::vector<int>& strong_nonzeros,
                             const std::vector<int>& strong_zeros);

// K-fold prediction error of the response under one interval model. The
// fitted directions are rescaled by the interval coefficients and
// re-orthonormalized; each held-out row is projected onto them and its
// response predicted by averaging the nearest training rows in index space,
// with the neighborhood sized to the slice resolution. An all-zero model
// falls back to the training mean. Folds are assigned by response rank so
// each fold spans the whole response range. folds == 1 evaluates in sample.
double cv_model_error(const Dataset& data, const RidgeFit& fit,
                      const IntervalPartition& part, const VectorXd& alpha,
                      int folds, std::vector<std::string>* warnings = nullptr);

// Iterative interval fusion. Starts from singleton intervals, records the
// GCV model for every visited partition, merges intervals driven by the
// boundary solutions of the current path (escalating the sparsity
// proportion on the same path when no merge fires), and stops once a single
// interval remains. The returned collection has the cross validation
// minimizer marked as selected.
ModelCollection run_fusion(const Dataset& data, const RidgeFit& fit,
                           const FusionConfig& cfg = {});

}  // namespace isir
