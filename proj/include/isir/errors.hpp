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

#include <stdexcept>
#include <string>
#include <utility>

namespace isir {

// Error taxonomy shared by the library and the command line tool. The
// category string is stable and machine readable; the CLI prints it on
// failure so callers can branch on it without parsing prose.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}
  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& what)
      : Error("invalid-argument", what) {}
};

struct InvalidData : Error {
  explicit InvalidData(const std::string& what) : Error("invalid-data", what) {}
};

struct NumericalFailure : Error {
  explicit NumericalFailure(const std::string& what)
      : Error("numerical-failure", what) {}
};

struct SingularMatrix : Error {
  explicit SingularMatrix(const std::string& what)
      : Error("singular-matrix", what) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what)
      : Error("rank-deficient", what) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error("parse-error", what) {}
};

struct ModelFileError : Error {
  explicit ModelFileError(const std::string& what)
      : Error("model-file-error", what) {}
};

struct SimulationFailure : Error {
  explicit SimulationFailure(const std::string& what)
      : Error("simulation-failure", what) {}
};

}  // namespace isir
