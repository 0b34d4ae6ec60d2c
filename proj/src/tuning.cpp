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

#include "isir/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isir/linalg.hpp"

namespace isir {

namespace {

constexpr double kCondLimit = 1e12;

std::vector<double> default_mu2_grid() {
  return {1e-2, 1e-1, 1, 10, 100, 1e3, 1e4, 1e5};
}

struct TuneTables {
  MatrixXd cv_err;
  MatrixXd r_hat;
  std::vector<std::string> warnings;
};

MatrixXd take_rows(const MatrixXd& X, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = X.row(rows[i]);
  return out;
}

VectorXd take(const VectorXd& v, const std::vector<int>& rows) {
  VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

// Condition check of a small Gram matrix; true when usable.
bool gram_ok(const MatrixXd& G) {
  const SymEigen e = sym_eigen(G);
  const double lo = e.values[e.values.size() - 1];
  const double hi = e.values[0];
  return lo > 0 && hi / lo < kCondLimit;
}

int argmin_col(const MatrixXd& table, int col) {
  int best = 0;
  for (int g = 1; g < table.rows(); ++g)
    if (table(g, col) < table(best, col)) best = g;
  return best;
}

TuneTables tune_tables(const Dataset& data, int H,
                       const std::vector<double>& mu2_values, int d0,
                       int folds) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  if (H < 2 || H > n) throw InvalidArgument("tune: H must lie in [2, n]");
  if (d0 < 1 || d0 > H - 1)
    throw InvalidArgument("tune: d0 must lie in [1, H - 1]");
  if (mu2_values.empty()) throw InvalidArgument("tune: empty mu2 grid");
  for (double v : mu2_values)
    if (!(v > 0)) throw InvalidArgument("tune: mu2 values must be positive");
  if (folds < 1 || folds > n / 2) {
    if (folds != 1)
      throw InvalidArgument("tune: folds must lie in [2, n/2]");
  }

  const int G = static_cast<int>(mu2_values.size());
  TuneTables tables;
  tables.cv_err = MatrixXd::Zero(G, d0);
  tables.r_hat = MatrixXd::Zero(G, d0);

  const MomentSet mom_full = compute_moments(data.X, make_slices(data.y, H));
  std::vector<RidgeFit> full_fits;
  std::vector<MatrixXd> full_MA;  // (sigma_full + mu2 I) * A_full per mu2
  full_fits.reserve(G);
  for (int gi = 0; gi < G; ++gi) {
    full_fits.push_back(ridge_sir_fit(mom_full, mu2_values[gi], d0));
    full_MA.push_back(mom_full.sigma * full_fits[gi].A +
                      mu2_values[gi] * full_fits[gi].A);
  }

  const std::vector<int> fold_of = fold_assignment(data.y, folds);
  MatrixXd tr_acc = MatrixXd::Zero(G, d0);
  std::vector<int> valid(G, 0);

  for (int f = 0; f < folds; ++f) {
    std::vector<int> train, test;
    for (int i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
    if (folds == 1) train = test;  // in-sample evaluation for testing

    if (static_cast<int>(train.size()) < H)
      throw InvalidArgument("tune: a fold retains fewer than H observations");
    const MatrixXd Xtr = take_rows(data.X, train);
    const VectorXd ytr = take(data.y, train);
    const MomentSet mom_tr = compute_moments(Xtr, make_slices(ytr, H));

    const MatrixXd Xte = take_rows(data.X, test);
    const VectorXd yte = take(data.y, test);
    const int H_te = std::min<int>(H, static_cast<int>(test.size()));
    if (H_te < H)
      tables.warnings.push_back(
          "tune: test fold smaller than H, slices merged");
    if (H_te < 2)
      throw InvalidArgument("tune: test fold too small to slice");
    const MomentSet mom_te = compute_moments(Xte, make_slices(yte, H_te));
    const double eps =
        std::max(1e-8 * mom_te.sigma.trace() / p, 1e-300);
    const Eigen::LDLT<MatrixXd> metric_te(
        mom_te.sigma + eps * MatrixXd::Identity(p, p));

    for (int gi = 0; gi < G; ++gi) {
      const double mu2 = mu2_values[gi];
      const RidgeFit fit_tr = ridge_sir_fit(mom_tr, mu2, d0);

      // Held out projection error, incremental over the dimension.
      const MatrixXd MA = mom_te.sigma * fit_tr.A;  // p x d0
      for (int h = 0; h < H_te; ++h) {
        const int h_tr =
            H_te == H ? h
                      : static_cast<int>((h + 0.5) * H / H_te);
        VectorXd resid =
            mom_te.slice_means.row(h).transpose() - mom_te.grand_mean;
        for (int d = 1; d <= d0; ++d) {
          resid -= MA.col(d - 1) * fit_tr.C(d - 1, h_tr);
          tables.cv_err(gi, d - 1) +=
              mom_te.freqs[h] * resid.dot(metric_te.solve(resid));
        }
      }

      // Stability traces between leave-fold-out and full-data projectors.
      const MatrixXd MAtr = mom_tr.sigma * fit_tr.A + mu2 * fit_tr.A;
      const MatrixXd G_tr = fit_tr.A.transpose() * MAtr;
      const MatrixXd G_full = full_fits[gi].A.transpose() * full_MA[gi];
      if (!gram_ok(G_tr) || !gram_ok(G_full)) {
        tables.warnings.push_back(
            "tune: rank deficient directions, fold skipped for stability");
        continue;
      }
      const MatrixXd U = full_fits[gi].A.transpose() * MAtr;   // A_f' M_tr A_tr
      const MatrixXd V = fit_tr.A.transpose() * full_MA[gi];   // A_tr' M_f A_f
      ++valid[gi];
      for (int d = 1; d <= d0; ++d) {
        const MatrixXd T1 =
            G_tr.topLeftCorner(d, d).ldlt().solve(U.topLeftCorner(d, d).transpose());
        const MatrixXd T2 =
            G_full.topLeftCorner(d, d).ldlt().solve(V.topLeftCorner(d, d).transpose());
        tr_acc(gi, d - 1) += (T1 * T2).trace();
      }
    }
  }

  tables.cv_err /= folds;
  for (int gi = 0; gi < G; ++gi) {
    if (valid[gi] < (folds + 1) / 2)
      throw RankDeficient(
          "tune: too many folds skipped for the stability curve");
    for (int d = 1; d <= d0; ++d)
      tables.r_hat(gi, d - 1) = d - tr_acc(gi, d - 1) / valid[gi];
  }
  return tables;
}

}  // namespace

MatrixXd ridge_projector(const MatrixXd& A, const MatrixXd& M) {
  if (A.rows() != M.rows() || M.rows() != M.cols())
    throw InvalidArgument("ridge_projector: dimension mismatch");
  const MatrixXd G = A.transpose() * M * A;
  if (!gram_ok(0.5 * (G + G.transpose())))
    throw RankDeficient("ridge_projector: A' M A numerically singular");
  return A * G.ldlt().solve(A.transpose() * M);
}

MatrixXd cv_error_grid(const Dataset& data, int H, const TuneGrid& grid) {
  const std::vector<double> mu2s =
      grid.mu2_values.empty() ? default_mu2_grid() : grid.mu2_values;
  const int d0 = grid.d0 > 0 ? grid.d0 : H - 1;
  return tune_tables(data, H, mu2s, d0, grid.folds).cv_err;
}

VectorXd r_hat_curve(const Dataset& data, int H, double mu2, int d0,
                     int folds) {
  const TuneTables t = tune_tables(data, H, {mu2}, d0, folds);
  return t.r_hat.row(0).transpose();
}

int elbow(const VectorXd& r_curve) {
  const int d0 = static_cast<int>(r_curve.size());
  if (d0 < 2) throw InvalidArgument("elbow: need at least two dimensions");
  if (d0 == 2) return 1;
  int best = 0;
  double best_drop = -std::numeric_limits<double>::infinity();
  for (int i = 0; i + 2 < d0; ++i) {
    const double delta_here = r_curve[i + 1] - r_curve[i];
    const double delta_next = r_curve[i + 2] - r_curve[i + 1];
    const double drop = delta_here - delta_next;
    if (drop > best_drop) {
      best_drop = drop;
      best = i;
    }
  }
  return best + 1;
}

AlternationResult alternate_select(const MatrixXd& cv_err,
                                   const MatrixXd& r_hat, int max_rounds) {
  if (cv_err.rows() != r_hat.rows() || cv_err.cols() != r_hat.cols())
    throw InvalidArgument("alternate_select: table shapes differ");
  if (cv_err.rows() < 1 || cv_err.cols() < 1)
    throw InvalidArgument("alternate_select: empty tables");

  const int d0 = static_cast<int>(cv_err.cols());
  AlternationResult out;
  out.d_star = d0;
  out.mu2_index = argmin_col(cv_err, d0 - 1);
  out.trace.push_back({out.mu2_index, out.d_star});
  for (int round = 0; round < max_rounds; ++round) {
    const int d_new = elbow(r_hat.row(out.mu2_index).transpose());
    const int mu_new = argmin_col(cv_err, d_new - 1);
    out.trace.push_back({mu_new, d_new});
    if (mu_new == out.mu2_index && d_new == out.d_star) {
      out.stabilized = true;
      break;
    }
    out.mu2_index = mu_new;
    out.d_star = d_new;
  }
  return out;
}

TuneResult joint_tune(const Dataset& data, int H, const TuneGrid& grid) {
  const std::vector<double> mu2s =
      grid.mu2_values.empty() ? default_mu2_grid() : grid.mu2_values;
  const int d0 = grid.d0 > 0 ? grid.d0 : H - 1;
  TuneTables tables = tune_tables(data, H, mu2s, d0, grid.folds);
  const AlternationResult alt = alternate_select(tables.cv_err, tables.r_hat);

  TuneResult res;
  res.mu2_star = mu2s[alt.mu2_index];
  res.d_star = alt.d_star;
  res.cv_err = std::move(tables.cv_err);
  res.r_hat = std::move(tables.r_hat);
  for (const auto& [gi, d] : alt.trace) res.trace.push_back({mu2s[gi], d});
  res.stabilized = alt.stabilized;
  res.warnings = std::move(tables.warnings);
  if (!alt.stabilized)
    res.warnings.push_back("tune: alternation did not stabilize, kept the "
                           "last iterate");
  return res;
}

}  // namespace isir
