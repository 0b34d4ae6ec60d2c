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

#include "isir/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace isir {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& cell, int line, int col) {
  double v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ParseError("csv: line " + std::to_string(line) + " column " +
                     std::to_string(col) + ": cannot parse number '" + cell +
                     "'");
  return v;
}

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

// Write-then-rename so a failed write never clobbers an existing artifact.
void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("io-failure", "cannot open " + tmp + " for writing");
    out << contents;
    if (!out.flush())
      throw Error("io-failure", "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error("io-failure",
                "cannot move " + tmp + " into place: " + ec.message());
}

ordered_json model_to_json(const ModelFile& m) {
  ordered_json j;
  j["format_version"] = m.format_version;
  j["kind"] = "isir-model";
  j["mu1_star"] = m.mu1_star;
  j["mu2"] = m.mu2;
  j["d"] = m.d;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  j["grid"] = std::vector<double>(m.grid.data(), m.grid.data() + m.grid.size());
  std::vector<int> begins;
  for (const auto& iv : m.partition.intervals) begins.push_back(iv.begin);
  j["interval_begins"] = begins;
  j["alpha_star"] = std::vector<double>(
      m.alpha_star.data(), m.alpha_star.data() + m.alpha_star.size());
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.A_sparse.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.A_sparse.cols(); ++c) row.push_back(m.A_sparse(i, c));
    rows.push_back(std::move(row));
  }
  j["a_sparse"] = std::move(rows);
  ordered_json trace = ordered_json::array();
  for (const auto& [D, err] : m.cv_trace) trace.push_back({D, err});
  j["cv_trace"] = std::move(trace);
  return j;
}

IntervalPartition partition_from_begins(const std::vector<int>& begins,
                                        const VectorXd& grid) {
  const int p = static_cast<int>(grid.size());
  if (begins.empty() || begins.front() != 0)
    throw ModelFileError("model: interval begins must start at 0");
  IntervalPartition part;
  for (size_t k = 0; k < begins.size(); ++k) {
    const int b = begins[k];
    const int e = k + 1 < begins.size() ? begins[k + 1] : p;
    if (b < 0 || e <= b || e > p)
      throw ModelFileError("model: interval begins must increase within the "
                           "grid");
    part.intervals.push_back({b, e, grid[b], grid[e - 1]});
  }
  return part;
}

ModelFile model_from_json(const ordered_json& j) {
  try {
    ModelFile m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1)
      throw ModelFileError("model: unsupported format version " +
                           std::to_string(m.format_version));
    if (j.at("kind").get<std::string>() != "isir-model")
      throw ModelFileError("model: unexpected kind");
    m.mu1_star = j.at("mu1_star").get<double>();
    m.mu2 = j.at("mu2").get<double>();
    m.d = j.at("d").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.config_hash = j.at("config_hash").get<std::string>();
    const auto grid = j.at("grid").get<std::vector<double>>();
    if (grid.size() < 1) throw ModelFileError("model: empty grid");
    m.grid = Eigen::Map<const VectorXd>(grid.data(), grid.size());
    for (size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw ModelFileError("model: grid must be strictly increasing");
    m.partition = partition_from_begins(
        j.at("interval_begins").get<std::vector<int>>(), m.grid);
    const auto alpha = j.at("alpha_star").get<std::vector<double>>();
    if (alpha.size() != static_cast<size_t>(m.partition.D()))
      throw ModelFileError("model: alpha length does not match intervals");
    m.alpha_star = Eigen::Map<const VectorXd>(alpha.data(), alpha.size());
    const auto& rows = j.at("a_sparse");
    if (rows.size() != grid.size())
      throw ModelFileError("model: direction rows do not match the grid");
    m.A_sparse = MatrixXd(rows.size(), m.d);
    for (size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(rows[i].size()) != m.d)
        throw ModelFileError("model: direction columns do not match d");
      for (int c = 0; c < m.d; ++c) m.A_sparse(i, c) = rows[i][c].get<double>();
    }
    for (const auto& entry : j.at("cv_trace"))
      m.cv_trace.push_back({entry.at(0).get<int>(), entry.at(1).get<double>()});
    return m;
  } catch (const ordered_json::exception& e) {
    throw ModelFileError(std::string("model: malformed document: ") + e.what());
  }
}

ordered_json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFileError(std::string(what) + ": cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const ordered_json::exception& e) {
    throw ModelFileError(std::string(what) + ": invalid JSON in " + path +
                         ": " + e.what());
  }
  return j;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: empty file " + path);
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2)
    throw ParseError("csv: header must contain the response label and at "
                     "least one grid value");
  const int p = static_cast<int>(header.size()) - 1;
  VectorXd grid(p);
  for (int j = 0; j < p; ++j) grid[j] = parse_double(header[j + 1], 1, j + 2);
  for (int j = 1; j < p; ++j)
    if (!(grid[j] > grid[j - 1]))
      throw ParseError("csv: header grid must be strictly increasing");

  std::vector<double> ys;
  std::vector<double> xs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_line(line);
    if (static_cast<int>(cells.size()) != p + 1)
      throw ParseError("csv: line " + std::to_string(lineno) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(p + 1));
    ys.push_back(parse_double(cells[0], lineno, 1));
    for (int j = 0; j < p; ++j)
      xs.push_back(parse_double(cells[j + 1], lineno, j + 2));
  }

  Dataset data;
  const int n = static_cast<int>(ys.size());
  data.y = Eigen::Map<const VectorXd>(ys.data(), n);
  data.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                          Eigen::Dynamic, Eigen::RowMajor>>(
      xs.data(), n, p);
  data.grid = grid;
  data.validate();
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ostringstream out;
  out << "y";
  for (int j = 0; j < data.p(); ++j) out << ',' << fmt_double(data.grid[j]);
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    out << fmt_double(data.y[i]);
    for (int j = 0; j < data.p(); ++j)
      out << ',' << fmt_double(data.X(i, j));
    out << '\n';
  }
  atomic_write(path, out.str());
}

ModelFile load_model(const std::string& path) {
  return model_from_json(load_json_file(path, "model"));
}

void save_model(const ModelFile& m, const std::string& path) {
  atomic_write(path, model_to_json(m).dump(2) + "\n");
}

CollectionFile load_collection(const std::string& path) {
  const ordered_json j = load_json_file(path, "collection");
  try {
    CollectionFile c;
    c.format_version = j.at("format_version").get<int>();
    if (c.format_version != 1)
      throw ModelFileError("collection: unsupported format version");
    if (j.at("kind").get<std::string>() != "isir-collection")
      throw ModelFileError("collection: unexpected kind");
    c.selected = j.at("selected").get<int>();
    c.reached_iteration_cap = j.at("reached_iteration_cap").get<bool>();
    c.stalled = j.at("stalled").get<bool>();
    for (const auto& rj : j.at("records")) {
      CollectionFile::Record r;
      r.intervals = rj.at("intervals").get<int>();
      r.mu1 = rj.at("mu1").get<double>();
      r.cv_error = rj.at("cv_error").get<double>();
      r.iteration = rj.at("iteration").get<int>();
      r.begins = rj.at("begins").get<std::vector<int>>();
      const auto alpha = rj.at("alpha").get<std::vector<double>>();
      r.alpha = Eigen::Map<const VectorXd>(alpha.data(), alpha.size());
      c.records.push_back(std::move(r));
    }
    if (c.selected < 0 || c.selected >= static_cast<int>(c.records.size()))
      throw ModelFileError("collection: selected index out of range");
    c.selected_model = model_from_json(j.at("model"));
    return c;
  } catch (const ordered_json::exception& e) {
    throw ModelFileError(std::string("collection: malformed document: ") +
                         e.what());
  }
}

void save_collection(const CollectionFile& c, const std::string& path) {
  ordered_json j;
  j["format_version"] = c.format_version;
  j["kind"] = "isir-collection";
  j["selected"] = c.selected;
  j["reached_iteration_cap"] = c.reached_iteration_cap;
  j["stalled"] = c.stalled;
  ordered_json records = ordered_json::array();
  for (const auto& r : c.records) {
    ordered_json rj;
    rj["intervals"] = r.intervals;
    rj["mu1"] = r.mu1;
    rj["cv_error"] = r.cv_error;
    rj["iteration"] = r.iteration;
    rj["begins"] = r.begins;
    rj["alpha"] =
        std::vector<double>(r.alpha.data(), r.alpha.data() + r.alpha.size());
    records.push_back(std::move(rj));
  }
  j["records"] = std::move(records);
  j["model"] = model_to_json(c.selected_model);
  atomic_write(path, j.dump(2) + "\n");
}

std::string config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace isir
