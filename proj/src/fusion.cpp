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

#include "isir/fusion.hpp"

#include <algorithm>
#include <string>

namespace isir {

namespace {

// Sparsity escalation gives up once the proportion passes this bound; by
// then the budget exceeds the interval count and every merge rule has had
// its chance, so continuing cannot change the sets any further.
constexpr double kMaxProp = 2.0;

}  // namespace

IntervalPartition merge_step(const IntervalPartition& part,
                             const std::vector<int>& strong_nonzeros,
                             const std::vector<int>& strong_zeros) {
  part.validate();
  const int D = part.D();
  std::vector<char> in1(D, 0), in2(D, 0);
  for (int k : strong_nonzeros) {
    if (k < 0 || k >= D)
      throw InvalidArgument("merge_step: strong nonzero index out of range");
    in1[k] = 1;
  }
  for (int k : strong_zeros) {
    if (k < 0 || k >= D)
      throw InvalidArgument("merge_step: strong zero index out of range");
    if (in1[k])
      throw InvalidArgument("merge_step: evidence sets must be disjoint");
    in2[k] = 1;
  }

  std::vector<char> bond(D > 1 ? D - 1 : 0, 0);
  for (int k = 0; k + 1 < D; ++k) {
    if ((in1[k] && in1[k + 1]) || (in2[k] && in2[k + 1])) bond[k] = 1;
  }
  for (int k = 0; k + 2 < D; ++k) {
    const bool ends_nonzero = in1[k] && in1[k + 2] && !in2[k + 1];
    const bool ends_zero = in2[k] && in2[k + 2] && !in1[k + 1];
    if ((ends_nonzero || ends_zero) &&
        part.length(k) + part.length(k + 2) > part.length(k + 1)) {
      bond[k] = 1;
      bond[k + 1] = 1;
    }
  }

  IntervalPartition out;
  int k = 0;
  while (k < D) {
    int j = k;
    while (j + 1 < D && bond[j]) ++j;
    out.intervals.push_back({part.intervals[k].begin, part.intervals[j].end,
                             part.intervals[k].t_lo, part.intervals[j].t_hi});
    k = j + 1;
  }
  return out;
}

double cv_model_error(const Dataset& data, const RidgeFit& fit,
                      const IntervalPartition& part, const VectorXd& alpha,
                      int folds, std::vector<std::string>* warnings) {
  data.validate();
  part.validate();
  const int n = data.n();
  const int p = data.p();
  if (part.p() != p || fit.A.rows() != p)
    throw InvalidArgument("cv_model_error: dimension mismatch");
  if (alpha.size() != part.D())
    throw InvalidArgument("cv_model_error: alpha does not match partition");
  if (folds < 1 || folds > n / 2) {
    if (folds != 1)
      throw InvalidArgument("cv_model_error: folds must lie in [2, n/2]");
  }

  // Judge the model on what it is for: predicting the response through its
  // index. The directions are rescaled by the interval coefficients and
  // re-orthonormalized once; each fold projects held-out rows onto them and
  // predicts y by averaging the responses of the nearest training rows in
  // index space. Errors measured against the projected slice structure
  // cannot do this job: the slice scores are built from the full-support
  // directions, so the unrestricted model reproduces them by construction
  // and masking support can only ever look worse. Held-out response error
  // instead rewards supports that keep the real signal and drop the mass
  // fitted to noise.
  const MatrixXd As = sparse_directions(fit, alpha, part, fit.mu2).A_sparse;
  if (As.cols() == 0 && warnings)
    warnings->push_back("cv: empty model, falling back to the mean response");
  const MatrixXd scores = data.X * As;
  const int H = fit.moments.H();
  const std::vector<int> fold_of = fold_assignment(data.y, folds);

  double total = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
    if (folds == 1) train = test;  // in-sample evaluation

    const int ntr = static_cast<int>(train.size());
    // Neighborhood sized to the slice resolution: the link is never observed
    // finer than n / H responses per slice.
    const int k = std::max(1, std::min(ntr, (2 * ntr + H) / (2 * H)));
    double err = 0;
    for (int i : test) {
      double pred = 0;
      if (As.cols() == 0) {
        for (int j : train) pred += data.y[j];
        pred /= ntr;
      } else {
        std::vector<std::pair<double, int>> near;
        near.reserve(ntr);
        for (int j : train)
          near.emplace_back((scores.row(j) - scores.row(i)).squaredNorm(), j);
        std::nth_element(near.begin(), near.begin() + (k - 1), near.end(),
                         [](const auto& a, const auto& b) {
                           return a.first < b.first ||
                                  (a.first == b.first && a.second < b.second);
                         });
        for (int j = 0; j < k; ++j) pred += data.y[near[j].second];
        pred /= k;
      }
      const double r = data.y[i] - pred;
      err += r * r;
    }
    total += err / static_cast<double>(test.size());
  }
  return total / folds;
}

ModelCollection run_fusion(const Dataset& data, const RidgeFit& fit,
                           const FusionConfig& cfg) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  if (fit.A.rows() != p)
    throw InvalidArgument("run_fusion: directions do not match the grid");
  if (!(cfg.P0 > 0 && cfg.P0 <= 1))
    throw InvalidArgument("run_fusion: P0 must lie in (0, 1]");
  if (cfg.cv_folds < 2 || cfg.cv_folds > n / 2)
    throw InvalidArgument("run_fusion: cv_folds must lie in [2, n/2]");
  if (cfg.max_iterations < 0)
    throw InvalidArgument("run_fusion: max_iterations must be >= 0");
  const int max_iter = cfg.max_iterations > 0 ? cfg.max_iterations : 2 * p;

  const SliceAssignment slices = make_slices(data.y, fit.moments.H());
  IntervalPartition part = IntervalPartition::singletons(data.grid);
  double prop = cfg.P0;

  ModelCollection coll;
  for (int iter = 0;; ++iter) {
    const SparseProblem prob =
        build_sparse_problem(data.X, fit, slices, part);
    const LassoPath path = lasso_path(prob, cfg.grid_size, cfg.eps_ratio);
    const GcvChoice choice = select_gcv(path);
    const double cv = cv_model_error(data, fit, part, choice.alpha,
                                     cfg.cv_folds, &coll.warnings);
    coll.records.push_back({part, choice.alpha, choice.mu1, cv, iter});

    if (part.D() == 1) break;
    if (static_cast<int>(coll.records.size()) >= max_iter) {
      coll.reached_iteration_cap = true;
      coll.warnings.push_back(
          "run_fusion: iteration cap reached before a single interval");
      break;
    }

    bool merged = false;
    while (prop <= kMaxProp) {
      const ThresholdSets th = threshold_solutions(path, prop);
      const IntervalPartition next =
          merge_step(part, th.strong_nonzeros, th.strong_zeros);
      if (next.D() < part.D()) {
        part = next;
        merged = true;
        break;
      }
      prop += cfg.P0;
    }
    if (!merged) {
      coll.stalled = true;
      coll.warnings.push_back(
          "run_fusion: no fusion possible after sparsity escalation");
      break;
    }
  }

  for (size_t r = 0; r < coll.records.size(); ++r) {
    if (coll.selected < 0 ||
        coll.records[r].cv_error <=
            coll.records[static_cast<size_t>(coll.selected)].cv_error)
      coll.selected = static_cast<int>(r);
  }
  return coll;
}

}  // namespace isir
