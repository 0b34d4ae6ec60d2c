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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isir/io.hpp"
#include "isir/simulate.hpp"
#include "isir/tuning.hpp"

namespace {

using isir::Dataset;
using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write_text(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw isir::Error("io-failure", "cannot open " + tmp + " for writing");
    out << contents;
    if (!out.flush()) throw isir::Error("io-failure", "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw isir::Error("io-failure",
                      "cannot move " + tmp + " into place: " + ec.message());
}

void require_option(const CLI::App& cmd, const std::string& name) {
  if (cmd.count(name) == 0)
    throw CLI::RequiredError(name + " (for subcommand " + cmd.get_name() + ")");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct SimulateArgs {
  std::string model = "m1";
  int n = 100;
  int p = 0;
  double ell = 0.1;
  double var = 1.0;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  isir::SimSpec spec;
  if (a.model == "m1") {
    spec.model = isir::SimSpec::Model::One;
  } else if (a.model == "m2") {
    spec.model = isir::SimSpec::Model::Two;
  } else {
    throw isir::InvalidArgument("simulate: model must be m1 or m2");
  }
  spec.n = a.n;
  spec.p = a.p;
  spec.ell = a.ell;
  spec.var = a.var;
  spec.noise_sd = a.noise_sd;
  spec.seed = a.seed;
  const isir::Simulated sim = isir::simulate_dataset(spec);
  isir::save_csv(sim.data, a.out);
  std::cout << "wrote " << sim.data.n() << " curves on " << sim.data.p()
            << " grid points to " << a.out << "\n";
  return 0;
}

struct TuneArgs {
  std::string data;
  int slices = 10;
  int folds = 10;
  int d0 = 0;
  std::vector<double> mu2_grid;
  std::string out;
  std::string cv_table;
  std::string rhat_table;
};

std::string table_csv(const std::vector<double>& mu2s,
                      const isir::MatrixXd& table) {
  std::ostringstream out;
  out << "mu2";
  for (int d = 1; d <= table.cols(); ++d) out << ",d" << d;
  out << '\n';
  for (int g = 0; g < table.rows(); ++g) {
    out << fmt(mu2s[g]);
    for (int d = 0; d < table.cols(); ++d) out << ',' << fmt(table(g, d));
    out << '\n';
  }
  return out.str();
}

int run_tune(const TuneArgs& a) {
  const Dataset data = isir::load_csv(a.data);
  isir::TuneGrid grid;
  grid.mu2_values = a.mu2_grid;
  grid.d0 = a.d0;
  grid.folds = a.folds;
  const isir::TuneResult res = isir::joint_tune(data, a.slices, grid);
  print_warnings(res.warnings);

  const std::vector<double> mu2s =
      a.mu2_grid.empty()
          ? std::vector<double>{1e-2, 1e-1, 1, 10, 100, 1e3, 1e4, 1e5}
          : a.mu2_grid;
  ordered_json j;
  j["format_version"] = 1;
  j["kind"] = "isir-tune";
  j["mu2_star"] = res.mu2_star;
  j["d_star"] = res.d_star;
  j["stabilized"] = res.stabilized;
  ordered_json trace = ordered_json::array();
  for (const auto& [mu2, d] : res.trace) trace.push_back({mu2, d});
  j["trace"] = std::move(trace);
  j["mu2_grid"] = mu2s;
  ordered_json cv = ordered_json::array();
  ordered_json rh = ordered_json::array();
  for (int g = 0; g < res.cv_err.rows(); ++g) {
    std::vector<double> cvrow(res.cv_err.cols()), rhrow(res.r_hat.cols());
    for (int d = 0; d < res.cv_err.cols(); ++d) {
      cvrow[d] = res.cv_err(g, d);
      rhrow[d] = res.r_hat(g, d);
    }
    cv.push_back(cvrow);
    rh.push_back(rhrow);
  }
  j["cv_err"] = std::move(cv);
  j["r_hat"] = std::move(rh);
  j["warnings"] = res.warnings;
  if (!a.out.empty()) atomic_write_text(a.out, j.dump(2) + "\n");
  if (!a.cv_table.empty())
    atomic_write_text(a.cv_table, table_csv(mu2s, res.cv_err));
  if (!a.rhat_table.empty())
    atomic_write_text(a.rhat_table, table_csv(mu2s, res.r_hat));

  std::cout << "mu2_star=" << fmt(res.mu2_star) << " d_star=" << res.d_star
            << (res.stabilized ? "" : " (not stabilized)") << "\n";
  return 0;
}

struct FitArgs {
  std::string data;
  double mu2 = 1.0;
  int d = 1;
  int slices = 10;
  double p0 = 0.05;
  int grid_size = 100;
  double eps_ratio = 1e-3;
  int folds = 10;
  int max_iterations = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string hash;
};

int run_fit(const FitArgs& a) {
  const Dataset data = isir::load_csv(a.data);
  const isir::SliceAssignment slices = isir::make_slices(data.y, a.slices);
  const isir::MomentSet moments = isir::compute_moments(data.X, slices);
  const isir::RidgeFit fit = isir::ridge_sir_fit(moments, a.mu2, a.d);

  isir::FusionConfig cfg;
  cfg.P0 = a.p0;
  cfg.grid_size = a.grid_size;
  cfg.eps_ratio = a.eps_ratio;
  cfg.cv_folds = a.folds;
  cfg.max_iterations = a.max_iterations;
  const isir::ModelCollection coll = isir::run_fusion(data, fit, cfg);
  print_warnings(coll.warnings);
  const isir::ModelRecord& sel =
      coll.records[static_cast<size_t>(coll.selected)];
  const isir::SparseDirections dirs =
      isir::sparse_directions(fit, sel.alpha, sel.partition, a.mu2);
  if (dirs.empty_model)
    std::cerr << "warning: selected model has no active interval\n";

  isir::ModelFile mf;
  mf.grid = data.grid;
  mf.partition = sel.partition;
  mf.alpha_star = sel.alpha;
  mf.mu1_star = sel.mu1;
  mf.mu2 = a.mu2;
  mf.d = static_cast<int>(dirs.A_sparse.cols());
  mf.A_sparse = dirs.A_sparse;
  for (const auto& r : coll.records)
    mf.cv_trace.push_back({r.partition.D(), r.cv_error});
  mf.seed = a.seed;
  mf.config_hash = a.hash;

  isir::CollectionFile cf;
  for (const auto& r : coll.records) {
    isir::CollectionFile::Record cr;
    cr.intervals = r.partition.D();
    cr.mu1 = r.mu1;
    cr.cv_error = r.cv_error;
    cr.iteration = r.iteration;
    for (const auto& iv : r.partition.intervals) cr.begins.push_back(iv.begin);
    cr.alpha = r.alpha;
    cf.records.push_back(std::move(cr));
  }
  cf.selected = coll.selected;
  cf.reached_iteration_cap = coll.reached_iteration_cap;
  cf.stalled = coll.stalled;
  cf.selected_model = mf;
  isir::save_collection(cf, a.out);

  std::cout << "fit " << coll.records.size() << " models; selected "
            << sel.partition.D() << " intervals (cv error "
            << fmt(sel.cv_error) << ") -> " << a.out << "\n";
  return 0;
}

int run_select(const std::string& collection, const std::string& out) {
  const isir::CollectionFile cf = isir::load_collection(collection);
  isir::save_model(cf.selected_model, out);
  std::cout << "selected model with "
            << cf.selected_model.partition.D() << " intervals -> " << out
            << "\n";
  return 0;
}

int run_project(const std::string& model, const std::string& data_path,
                const std::string& out) {
  const isir::ModelFile mf = isir::load_model(model);
  const Dataset data = isir::load_csv(data_path);
  if (data.p() != mf.grid.size() ||
      (data.grid - mf.grid).lpNorm<Eigen::Infinity>() > 1e-12)
    throw isir::InvalidData("project: dataset grid does not match the model");
  const isir::MatrixXd scores = isir::edr_scores(data.X, mf.A_sparse);
  std::ostringstream os;
  os << "y";
  for (int c = 1; c <= scores.cols(); ++c) os << ",score_" << c;
  os << '\n';
  for (int i = 0; i < scores.rows(); ++i) {
    os << fmt(data.y[i]);
    for (int c = 0; c < scores.cols(); ++c) os << ',' << fmt(scores(i, c));
    os << '\n';
  }
  atomic_write_text(out, os.str());
  std::cout << "wrote " << scores.rows() << " score rows -> " << out << "\n";
  return 0;
}

std::string report_text(const isir::ModelFile& mf) {
  // Display bounds tile the observed range: each interval ends where the
  // next one begins.
  std::ostringstream os;
  os << "interval,t_lo,t_hi,alpha,selected\n";
  const int D = mf.partition.D();
  const int p = static_cast<int>(mf.grid.size());
  for (int k = 0; k < D; ++k) {
    const auto& iv = mf.partition.intervals[k];
    const double lo = mf.grid[iv.begin];
    const double hi =
        k + 1 < D ? mf.grid[mf.partition.intervals[k + 1].begin]
                  : mf.grid[p - 1];
    os << (k + 1) << ',' << fmt(lo) << ',' << fmt(hi) << ','
       << fmt(mf.alpha_star[k]) << ',' << (mf.alpha_star[k] != 0 ? 1 : 0)
       << '\n';
  }
  return os.str();
}

int run_report(const std::string& model, const std::string& out) {
  const isir::ModelFile mf = isir::load_model(model);
  const std::string text = report_text(mf);
  std::cout << text;
  if (!out.empty()) atomic_write_text(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("ISIR_THREADS")) {
    const int t = std::atoi(threads);
    if (t > 0) Eigen::setNbThreads(t);
  }

  CLI::App app{"interval selecting inverse regression for functional data"};
  app.option_defaults()->always_capture_default(true);
  app.set_config("--config", "", "read options from an INI or TOML file");
  app.require_subcommand(0, 1);
  bool show_config = false;
  app.add_flag("--show-config", show_config,
               "print the resolved options and exit");

  SimulateArgs sa;
  CLI::App* sim = app.add_subcommand("simulate", "draw a benchmark dataset");
  sim->add_option("--model", sa.model, "benchmark model, m1 or m2")
      ->check(CLI::IsMember({"m1", "m2"}));
  sim->add_option("--n", sa.n, "number of curves");
  sim->add_option("--p", sa.p, "grid size (0 for the model default)");
  sim->add_option("--ell", sa.ell, "Matern correlation length");
  sim->add_option("--var", sa.var, "Matern variance");
  sim->add_option("--noise-sd", sa.noise_sd, "measurement noise sd");
  sim->add_option("--seed", sa.seed, "random seed");
  sim->add_option("--out", sa.out, "output CSV path");

  TuneArgs ta;
  CLI::App* tune = app.add_subcommand("tune", "pick mu2 and the dimension");
  tune->add_option("--data", ta.data, "dataset CSV");
  tune->add_option("--slices", ta.slices, "slice count H");
  tune->add_option("--folds", ta.folds, "cross validation folds");
  tune->add_option("--d0", ta.d0, "largest dimension tried (0 for H-1)");
  tune->add_option("--mu2-grid", ta.mu2_grid, "ridge grid values")
      ->delimiter(',');
  tune->add_option("--out", ta.out, "tuning summary JSON");
  tune->add_option("--cv-table", ta.cv_table, "CSV table of cv errors");
  tune->add_option("--rhat-table", ta.rhat_table, "CSV table of r-hat values");

  FitArgs fa;
  CLI::App* fit = app.add_subcommand("fit", "run the interval fusion fit");
  fit->add_option("--data", fa.data, "dataset CSV");
  fit->add_option("--mu2", fa.mu2, "ridge regularization");
  fit->add_option("--d", fa.d, "index space dimension");
  fit->add_option("--slices", fa.slices, "slice count H");
  fit->add_option("--p0", fa.p0, "sparsity proportion step");
  fit->add_option("--grid-size", fa.grid_size, "penalty grid resolution");
  fit->add_option("--eps-ratio", fa.eps_ratio,
                  "smallest penalty relative to mu_max");
  fit->add_option("--folds", fa.folds, "cross validation folds");
  fit->add_option("--max-iterations", fa.max_iterations,
                  "fusion iteration cap (0 for 2p)");
  fit->add_option("--seed", fa.seed, "seed recorded in the model provenance");
  fit->add_option("--out", fa.out, "output collection JSON");

  std::string sel_collection, sel_out;
  CLI::App* sel = app.add_subcommand("select",
                                     "extract the chosen model from a "
                                     "collection");
  sel->add_option("--collection", sel_collection, "collection JSON from fit");
  sel->add_option("--out", sel_out, "output model JSON");

  std::string proj_model, proj_data, proj_out;
  CLI::App* proj = app.add_subcommand("project", "index scores for a dataset");
  proj->add_option("--model", proj_model, "model JSON");
  proj->add_option("--data", proj_data, "dataset CSV");
  proj->add_option("--out", proj_out, "output scores CSV");

  std::string rep_model, rep_out;
  CLI::App* rep = app.add_subcommand("report", "print the interval table");
  rep->add_option("--model", rep_model, "model JSON");
  rep->add_option("--out", rep_out, "also write the table to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (show_config) {
      std::cout << app.config_to_str(true, true);
      return 0;
    }
    if (sim->parsed()) {
      require_option(*sim, "--out");
      return run_simulate(sa);
    }
    if (tune->parsed()) {
      require_option(*tune, "--data");
      return run_tune(ta);
    }
    if (fit->parsed()) {
      require_option(*fit, "--data");
      require_option(*fit, "--out");
      std::ostringstream canon;
      canon << "data=" << fa.data << ";mu2=" << fa.mu2 << ";d=" << fa.d
            << ";slices=" << fa.slices << ";p0=" << fa.p0
            << ";grid_size=" << fa.grid_size << ";eps_ratio=" << fa.eps_ratio
            << ";folds=" << fa.folds << ";max_iterations=" << fa.max_iterations
            << ";seed=" << fa.seed;
      fa.hash = isir::config_hash(canon.str());
      return run_fit(fa);
    }
    if (sel->parsed()) {
      require_option(*sel, "--collection");
      require_option(*sel, "--out");
      return run_select(sel_collection, sel_out);
    }
    if (proj->parsed()) {
      require_option(*proj, "--model");
      require_option(*proj, "--data");
      require_option(*proj, "--out");
      return run_project(proj_model, proj_data, proj_out);
    }
    if (rep->parsed()) {
      require_option(*rep, "--model");
      return run_report(rep_model, rep_out);
    }
    std::cerr << app.help();
    return 2;
  } catch (const CLI::RequiredError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const isir::Error& e) {
    std::cerr << "error: category=" << e.category() << " message=" << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: category=internal message=" << e.what() << "\n";
    return 1;
  }
}
