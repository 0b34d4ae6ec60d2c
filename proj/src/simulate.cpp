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

#include "isir/simulate.hpp"

#include <cmath>
#include <random>
#include <string>

namespace isir {

namespace {

constexpr double kInnerFloor = 1e-12;
constexpr int kMaxRedraws = 100;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 row_engine(std::uint64_t seed, int row) {
  return std::mt19937_64(
      splitmix64(seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(row) + 1)));
}

double mean_curve(double t) { return -5.0 + 4.0 * t - 4.0 * t * t; }

// Lower Cholesky factor of the Matern kernel matrix with jitter escalation.
MatrixXd gp_chol(const VectorXd& grid, double ell, double var) {
  const int p = static_cast<int>(grid.size());
  MatrixXd K(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j <= i; ++j)
      K(i, j) = K(j, i) = matern32(grid[i], grid[j], ell, var);
  double jitter = 1e-10 * var;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::LLT<MatrixXd> llt(K + jitter * MatrixXd::Identity(p, p));
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter *= 100;
  }
  throw NumericalFailure("gp_sample: kernel factorization failed");
}

VectorXd draw_path(const MatrixXd& L, const VectorXd& grid, double noise_sd,
                   std::mt19937_64& eng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int p = static_cast<int>(grid.size());
  VectorXd z(p);
  for (int l = 0; l < p; ++l) z[l] = normal(eng);
  VectorXd row = L * z;
  for (int l = 0; l < p; ++l) row[l] += mean_curve(grid[l]);
  if (noise_sd > 0) {
    for (int l = 0; l < p; ++l) row[l] += noise_sd * normal(eng);
  }
  return row;
}

}  // namespace

double matern32(double s, double t, double ell, double var) {
  if (!(ell > 0) || !(var > 0))
    throw InvalidArgument("matern32: ell and var must be positive");
  const double r = std::abs(s - t);
  const double a = std::sqrt(3.0) * r / ell;
  return var * (1.0 + a) * std::exp(-a);
}

MatrixXd gp_sample(int n, const VectorXd& grid, double ell, double var,
                   double noise_sd, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("gp_sample: n must be >= 1");
  if (grid.size() < 1) throw InvalidArgument("gp_sample: empty grid");
  if (noise_sd < 0) throw InvalidArgument("gp_sample: noise_sd must be >= 0");
  const MatrixXd L = gp_chol(grid, ell, var);
  MatrixXd X(n, grid.size());
  for (int i = 0; i < n; ++i) {
    std::mt19937_64 eng = row_engine(seed, i);
    X.row(i) = draw_path(L, grid, noise_sd, eng).transpose();
  }
  return X;
}

TrueModel true_directions(const VectorXd& grid, SimSpec::Model model) {
  TrueModel tm;
  tm.supports = model == SimSpec::Model::One
                    ? std::vector<std::pair<double, double>>{{0.2, 0.4}}
                    : std::vector<std::pair<double, double>>{
                          {0.0, 0.1}, {0.5, 0.65}, {0.65, 0.78}};
  const int d = static_cast<int>(tm.supports.size());
  const int p = static_cast<int>(grid.size());
  tm.directions = MatrixXd::Zero(p, d);
  for (int j = 0; j < d; ++j) {
    const auto [lo, hi] = tm.supports[j];
    for (int l = 0; l < p; ++l) {
      const double t = grid[l];
      if (t >= lo - 1e-12 && t <= hi + 1e-12) {
        tm.directions(l, j) =
            std::sin(t * (2 + (j + 1)) * M_PI / 2.0 - j * M_PI / 3.0);
      }
    }
  }
  return tm;
}

Simulated simulate_dataset(const SimSpec& spec) {
  if (spec.n < 2) throw InvalidArgument("simulate_dataset: n must be >= 2");
  const int p =
      spec.p > 0 ? spec.p : (spec.model == SimSpec::Model::One ? 200 : 300);
  if (p < 2) throw InvalidArgument("simulate_dataset: p must be >= 2");

  Simulated sim;
  sim.data.grid = VectorXd::LinSpaced(p, 0.0, 1.0);
  sim.truth = true_directions(sim.data.grid, spec.model);
  const int d = static_cast<int>(sim.truth.directions.cols());

  const MatrixXd L = gp_chol(sim.data.grid, spec.ell, spec.var);
  sim.data.X = MatrixXd(spec.n, p);
  sim.data.y = VectorXd(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    std::mt19937_64 eng = row_engine(spec.seed, i);
    double yi = 0;
    bool ok = false;
    for (int attempt = 0; attempt <= kMaxRedraws && !ok; ++attempt) {
      const VectorXd row = draw_path(L, sim.data.grid, spec.noise_sd, eng);
      ok = true;
      yi = 0;
      for (int j = 0; j < d; ++j) {
        const double inner = row.dot(sim.truth.directions.col(j)) / p;
        if (std::abs(inner) < kInnerFloor) {
          ok = false;
          break;
        }
        yi += std::log(std::abs(inner));
      }
      if (ok) sim.data.X.row(i) = row.transpose();
    }
    if (!ok)
      throw SimulationFailure(
          "simulate_dataset: row " + std::to_string(i) +
          " kept collapsing onto a direction after redraws");
    sim.data.y[i] = yi;
  }
  sim.data.validate();
  return sim;
}

}  // namespace isir
