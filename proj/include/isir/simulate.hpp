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

#include <cstdint>
#include <utility>
#include <vector>

#include "isir/types.hpp"

namespace isir {

// Benchmark generator settings. Model one drives the response through a
// single interval-supported direction, model two through three of them.
struct SimSpec {
  enum class Model { One, Two };
  Model model = Model::One;
  int n = 100;
  int p = 0;  // 0 picks the model default (200 for model one, 300 for two)
  double ell = 0.1;      // Matern correlation length
  double var = 1.0;      // Matern variance
  double noise_sd = 0.1;  // sd of the additive measurement noise on X
  std::uint64_t seed = 0;
};

struct TrueModel {
  MatrixXd directions;  // p x d, exactly zero outside the supports
  std::vector<std::pair<double, double>> supports;
};

// Matern kernel with smoothness 3/2.
double matern32(double s, double t, double ell, double var);

// n Gaussian process paths with mean -5 + 4t - 4t^2 on the grid, plus iid
// measurement noise. Row i is drawn from a substream of seed so that any
// row is reproducible in isolation.
MatrixXd gp_sample(int n, const VectorXd& grid, double ell, double var,
                   double noise_sd, std::uint64_t seed);

TrueModel true_directions(const VectorXd& grid, SimSpec::Model model);

struct Simulated {
  Dataset data;
  TrueModel truth;
};

// Full benchmark draw: paths, interval directions, and the log absolute
// index response. Rows whose inner product with any direction collapses
// numerically are redrawn from the same substream (at most 100 times).
Simulated simulate_dataset(const SimSpec& spec);

}  // namespace isir
