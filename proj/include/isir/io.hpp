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
#include <string>
#include <utility>
#include <vector>

#include "isir/fusion.hpp"

namespace isir {

// Dataset CSV: first column the response, remaining columns the curves,
// header carrying the strictly increasing grid values. Writing uses %.17g
// so that a save/load cycle is an exact fixpoint. All writes in this module
// go to a temporary file first and are renamed into place.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

// Fitted model container, persisted as versioned JSON with a fixed key
// order so identical models serialize byte for byte.
struct ModelFile {
  int format_version = 1;
  VectorXd grid;
  IntervalPartition partition;
  VectorXd alpha_star;
  double mu1_star = 0;
  double mu2 = 0;
  int d = 0;               // retained direction count
  MatrixXd A_sparse;       // p x d
  std::vector<std::pair<int, double>> cv_trace;  // (intervals, cv error)
  std::uint64_t seed = 0;
  std::string config_hash;
};

ModelFile load_model(const std::string& path);
void save_model(const ModelFile& m, const std::string& path);

// Fusion trajectory with the selected model embedded, so picking a model
// out of a stored collection needs no refitting.
struct CollectionFile {
  int format_version = 1;
  struct Record {
    int intervals = 0;
    double mu1 = 0;
    double cv_error = 0;
    int iteration = 0;
    std::vector<int> begins;
    VectorXd alpha;
  };
  std::vector<Record> records;
  int selected = -1;
  bool reached_iteration_cap = false;
  bool stalled = false;
  ModelFile selected_model;
};

CollectionFile load_collection(const std::string& path);
void save_collection(const CollectionFile& c, const std::string& path);

// Stable 64-bit FNV-1a digest of a canonical option rendering, hex encoded.
std::string config_hash(const std::string& canonical);

}  // namespace isir
