/*
 * Copyright 2026 The mvproc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "mvproc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "mvproc/backtest.hpp"
#include "mvproc/csv.hpp"
#include "mvproc/errors.hpp"
#include "mvproc/evaluation.hpp"
#include "mvproc/model.hpp"
#include "mvproc/model_io.hpp"

namespace mvproc {

const char* version() { return "1.0.0"; }

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (const char c : s) {
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  }
  return out;
}

std::string basename_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Every report starts with a provenance line: tool version, seed, and a
// hash of the effective configuration.
std::ofstream open_report(const std::string& out_dir, const std::string& name,
                          const ExperimentConfig& config) {
  std::filesystem::create_directories(out_dir);
  const std::string path =
      (std::filesystem::path(out_dir) / name).string();
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot open report file for writing: " + path);
  }
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config.hash()));
  out << "# mvproc " << version() << " seed=" << config.get_seed("seed", 42)
      << " config=" << hash_hex << "\n";
  return out;
}

FitOptions fit_options_from(const ExperimentConfig& config) {
  FitOptions opts;
  opts.restarts = config.get_int("restarts", 10);
  opts.max_iters = config.get_int("max_iters", 200);
  opts.grad_tol = config.get_double("grad_tol", 1e-6);
  opts.seed = config.get_seed("seed", 42);
  opts.workers = config.get_int("workers", 1);
  if (opts.restarts < 1 || opts.max_iters < 1 || opts.workers < 1 ||
      !(opts.grad_tol > 0.0)) {
    throw ConfigError("restarts, max_iters, workers must be >= 1 and "
                      "grad_tol > 0");
  }
  return opts;
}

// The four study models of the experiments: joint multivariate fits plus
// the per-output scalar reductions.
struct StudyModel {
  std::string name;
  ModelFamily family;
  bool joint;
};

const std::vector<StudyModel>& all_study_models() {
  static const std::vector<StudyModel> models = {
      {"mvgp", ModelFamily::kGP, true},
      {"mvtp", ModelFamily::kTP, true},
      {"gp", ModelFamily::kGP, false},
      {"tp", ModelFamily::kTP, false},
  };
  return models;
}

std::vector<StudyModel> study_models_from(const ExperimentConfig& config) {
  std::vector<StudyModel> out;
  for (const std::string& name : config.get_list("models", "mvgp,mvtp,gp,tp")) {
    bool found = false;
    for (const StudyModel& m : all_study_models()) {
      if (m.name == name) {
        out.push_back(m);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("unknown model '" + name +
                        "' in models (expected mvgp|mvtp|gp|tp)");
    }
  }
  if (out.empty()) {
    throw ConfigError("models list is empty");
  }
  return out;
}

// Fits per the study model: one joint fit or one scalar fit per output.
// Returns the predictive means at xstar, column per output.
Matrix study_predict(const StudyModel& model, const KernelSpec& spec,
                     const Matrix& xtr, const Matrix& ytr, const Matrix& xstar,
                     const FitOptions& opts) {
  if (model.joint) {
    const TrainedModel fitted = fit_model(model.family, xtr, ytr, spec, opts);
    return predict_model(fitted, xstar).mean;
  }
  Matrix mean(xstar.rows(), ytr.cols());
  for (Index j = 0; j < ytr.cols(); ++j) {
    FitOptions col_opts = opts;
    col_opts.seed = opts.seed + static_cast<std::uint64_t>(j) * 104729;
    const TrainedModel fitted =
        fit_model(model.family, xtr, ytr.col(j), spec, col_opts);
    mean.col(j) = predict_model(fitted, xstar).mean;
  }
  return mean;
}

void parallel_for(int jobs, int workers, const std::function<void(int)>& body) {
  workers = std::min(std::max(1, workers), jobs);
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::string> errors(static_cast<std::size_t>(jobs));
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (const std::exception& e) {
          errors[static_cast<std::size_t>(i)] = e.what();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError(e);
  }
}

ColumnManifest manifest_from(const ExperimentConfig& config) {
  if (config.has("manifest")) {
    return read_manifest(config.require("manifest"));
  }
  ColumnManifest m;
  m.inputs = split_list(config.require("inputs"));
  m.outputs = split_list(config.require("outputs"));
  if (m.inputs.empty() || m.outputs.empty()) {
    throw ConfigError("inputs and outputs must both be non-empty");
  }
  return m;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << " is not 'key = value': " << line;
      throw ConfigError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      std::ostringstream msg;
      msg << "config line " << line_no << " has an empty key";
      throw ConfigError(msg.str());
    }
    config.kv_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

bool ExperimentConfig::has(const std::string& key) const {
  return kv_.count(key) > 0;
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::string ExperimentConfig::require(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) {
    throw ConfigError("missing required setting '" + key + "'");
  }
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key,
                                    double fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw ConfigError("setting '" + key + "' is not a number: " + it->second);
  }
  return v;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("setting '" + key + "' is not an integer");
  }
  return i;
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key,
                                         std::uint64_t fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("setting '" + key +
                      "' is not a non-negative integer: " + it->second);
  }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("setting '" + key + "' is not a boolean: " + v);
}

std::vector<std::string> ExperimentConfig::get_list(
    const std::string& key, const std::string& fallback) const {
  return split_list(get(key, fallback));
}

void ExperimentConfig::check_keys(
    const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : kv_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::ostringstream msg;
      msg << "unknown setting '" << key << "' (allowed:";
      for (const auto& a : allowed) msg << ' ' << a;
      msg << ')';
      throw ConfigError(msg.str());
    }
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [key, value] : kv_) {
    out << key << " = " << value << '\n';
  }
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the canonical text.
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

void cmd_simulate(const ExperimentConfig& config) {
  config.check_keys({"out", "seed", "reps", "noise", "kernel", "restarts",
                     "max_iters", "grad_tol", "workers", "models"});
  const std::string out_dir = config.get("out", ".");
  const int reps = config.get_int("reps", 100);
  if (reps < 1) throw ConfigError("reps must be >= 1");
  const std::string noise = config.get("noise", "both");
  std::vector<NoiseFamily> families;
  if (noise == "both") {
    families = {NoiseFamily::kMGP, NoiseFamily::kMTP};
  } else {
    families = {noise_family_from_string(noise)};
  }
  const KernelSpec spec =
      KernelSpec::make(kernel_family_from_string(config.get("kernel", "se")), 1);
  const FitOptions base_opts = fit_options_from(config);
  const std::vector<StudyModel> models = study_models_from(config);

  std::ofstream armse_out = open_report(out_dir, "simulate_armse.csv", config);
  std::ofstream raw_out = open_report(out_dir, "simulate_rmse_raw.csv", config);
  armse_out << "noise,output";
  for (const auto& m : models) armse_out << ',' << m.name;
  armse_out << '\n';
  raw_out << "noise,rep,model,output,rmse\n";

  for (const NoiseFamily family : families) {
    const std::uint64_t family_base =
        base_opts.seed + (family == NoiseFamily::kMGP ? 0u : (1u << 20));
    // rmse[model][output][rep]
    std::vector<std::vector<std::vector<double>>> rmse(
        models.size(),
        std::vector<std::vector<double>>(2, std::vector<double>(reps, 0.0)));

    parallel_for(reps, base_opts.workers, [&](int rep) {
      const std::uint64_t rep_seed = family_base + static_cast<std::uint64_t>(rep);
      const SimulatedData sim = simulate_dataset(family, rep_seed);
      const Matrix xtr = take_rows(sim.full.x, sim.train_idx);
      const Matrix ytr = take_rows(sim.full.y, sim.train_idx);

      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        FitOptions opts = base_opts;
        opts.workers = 1;  // repetitions already run in parallel
        Matrix mean;
        // Retry budget: a failed fit gets two more attempts on shifted
        // restart seeds before the repetition is abandoned.
        const int attempts = 3;
        for (int a = 0; a < attempts; ++a) {
          opts.seed = rep_seed * 131 + static_cast<std::uint64_t>(mi) * 17 +
                      static_cast<std::uint64_t>(a) * 999983;
          try {
            mean = study_predict(models[mi], spec, xtr, ytr, sim.full.x, opts);
            break;
          } catch (const std::exception& e) {
            if (a + 1 == attempts) {
              std::ostringstream msg;
              msg << "simulate: " << models[mi].name << " fit failed on "
                  << to_string(family) << " repetition " << rep
                  << " after " << attempts << " attempts: " << e.what();
              throw NumericError(msg.str());
            }
          }
        }
        const ColumnMetrics err = metrics(mean, sim.f_true);
        for (Index j = 0; j < 2; ++j) {
          rmse[mi][static_cast<std::size_t>(j)][static_cast<std::size_t>(rep)] =
              err.rmse(j);
        }
      }
    });

    for (Index j = 0; j < 2; ++j) {
      armse_out << to_string(family) << ",y" << (j + 1);
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        armse_out << ',' << fmt(armse(rmse[mi][static_cast<std::size_t>(j)]));
      }
      armse_out << '\n';
    }
    for (int rep = 0; rep < reps; ++rep) {
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        for (Index j = 0; j < 2; ++j) {
          raw_out << to_string(family) << ',' << rep << ',' << models[mi].name
                  << ",y" << (j + 1) << ','
                  << fmt(rmse[mi][static_cast<std::size_t>(j)]
                             [static_cast<std::size_t>(rep)])
                  << '\n';
        }
      }
    }
  }
}

void cmd_fit(const ExperimentConfig& config) {
  config.check_keys({"out", "data", "manifest", "inputs", "outputs", "model",
                     "kernel", "drop_missing", "restarts", "max_iters",
                     "grad_tol", "seed", "workers", "model_out"});
  const std::string out_dir = config.get("out", ".");
  const ColumnManifest manifest = manifest_from(config);
  const CsvTable table = read_csv_file(config.require("data"));
  const Dataset ds = dataset_from_table(table, manifest,
                                        config.get_bool("drop_missing", false));

  const std::string model_name = config.get("model", "mvgp");
  const ModelFamily family = (model_name == "mvgp" || model_name == "gp")
                                 ? ModelFamily::kGP
                                 : (model_name == "mvtp" || model_name == "tp")
                                       ? ModelFamily::kTP
                                       : throw ConfigError(
                                             "unknown model '" + model_name +
                                             "' (expected mvgp|mvtp|gp|tp)");
  if ((model_name == "gp" || model_name == "tp") && ds.y.cols() != 1) {
    throw ConfigError("model '" + model_name +
                      "' is the single-output reduction; use mvgp/mvtp for " +
                      std::to_string(ds.y.cols()) + " outputs");
  }

  const KernelSpec spec = KernelSpec::make(
      kernel_family_from_string(config.get("kernel", "seard")), ds.x.cols());
  TrainedModel model =
      fit_model(family, ds.x, ds.y, spec, fit_options_from(config));
  model.input_names = ds.input_names;
  model.output_names = ds.output_names;

  std::filesystem::create_directories(out_dir);
  const std::string model_path = config.get(
      "model_out", (std::filesystem::path(out_dir) / "model.mvp").string());
  save_model(model, model_path);

  std::ofstream summary = open_report(out_dir, "fit_summary.csv", config);
  summary << "model,kernel,n,p,d,nlml,converged\n";
  summary << model_name << ',' << to_string(spec.family) << ',' << model.n()
          << ',' << model.input_dim() << ',' << model.output_dim() << ','
          << fmt(model.nlml_at_fit()) << ','
          << (model.fit_converged() ? 1 : 0) << '\n';
}

void cmd_predict(const ExperimentConfig& config) {
  config.check_keys({"out", "model_file", "data", "inputs", "drop_missing"});
  const std::string out_dir = config.get("out", ".");
  const TrainedModel model = load_model(config.require("model_file"));
  const CsvTable table = read_csv_file(config.require("data"));

  std::vector<std::string> input_cols = model.input_names;
  if (config.has("inputs")) {
    input_cols = split_list(config.require("inputs"));
  }
  if (input_cols.empty()) {
    throw ConfigError(
        "model file carries no input names; pass 'inputs' explicitly");
  }
  if (static_cast<Index>(input_cols.size()) != model.input_dim()) {
    throw DataError("model expects " + std::to_string(model.input_dim()) +
                    " inputs but " + std::to_string(input_cols.size()) +
                    " columns were selected");
  }
  const Matrix xstar = table.numeric_columns(
      input_cols, config.get_bool("drop_missing", false));
  const Prediction pred = predict_model(model, xstar);
  const Matrix var = pred.pointwise_var();

  std::vector<std::string> out_names = model.output_names;
  if (static_cast<Index>(out_names.size()) != model.output_dim()) {
    out_names.clear();
    for (Index j = 0; j < model.output_dim(); ++j) {
      out_names.push_back("y" + std::to_string(j + 1));
    }
  }

  std::ofstream out = open_report(out_dir, "predictions.csv", config);
  for (const auto& name : out_names) out << "mean_" << name << ',';
  for (std::size_t j = 0; j < out_names.size(); ++j) {
    out << "std_" << out_names[j]
        << (j + 1 < out_names.size() || pred.df ? "," : "");
  }
  if (pred.df) out << "df";
  out << '\n';
  for (Index i = 0; i < xstar.rows(); ++i) {
    for (Index j = 0; j < model.output_dim(); ++j) {
      out << fmt(pred.mean(i, j)) << ',';
    }
    for (Index j = 0; j < model.output_dim(); ++j) {
      out << fmt(std::sqrt(var(i, j)))
          << (j + 1 < model.output_dim() || pred.df ? "," : "");
    }
    if (pred.df) out << fmt(*pred.df);
    out << '\n';
  }
}

void cmd_crossval(const ExperimentConfig& config) {
  config.check_keys({"out", "data", "manifest", "inputs", "outputs", "k",
                     "models", "kernel", "normalize", "drop_missing",
                     "restarts", "max_iters", "grad_tol", "seed", "workers"});
  const std::string out_dir = config.get("out", ".");
  const ColumnManifest manifest = manifest_from(config);
  const CsvTable table = read_csv_file(config.require("data"));
  Dataset ds = dataset_from_table(table, manifest,
                                  config.get_bool("drop_missing", false));
  const Index k = config.get_int("k", 0);
  if (k < 2) throw ConfigError("k must be >= 2");

  // Normalization statistics come from the full series, before splitting.
  if (config.get_bool("normalize", true)) {
    ds.y = normalize(ds.y, ds.output_names).first;
    ds.x = normalize(ds.x, ds.input_names).first;
  }

  const std::vector<FoldRange> folds = kfold_blocks(ds.x.rows(), k);
  const std::vector<StudyModel> models = study_models_from(config);
  const KernelSpec spec = KernelSpec::make(
      kernel_family_from_string(config.get("kernel", "seard")), ds.x.cols());
  const FitOptions base_opts = fit_options_from(config);
  const Index d = ds.y.cols();

  std::ofstream folds_out = open_report(out_dir, "crossval_folds.csv", config);
  folds_out << "model,fold,output,mse,mae\n";

  // errors[model][output][fold]
  std::vector<std::vector<std::vector<double>>> mse_tab(
      models.size(), std::vector<std::vector<double>>(
                         static_cast<std::size_t>(d),
                         std::vector<double>(folds.size(), 0.0)));
  auto mae_tab = mse_tab;

  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    for (std::size_t fi = 0; fi < folds.size(); ++fi) {
      const FoldRange fold = folds[fi];
      std::vector<Index> train_rows;
      std::vector<Index> test_rows;
      for (Index i = 0; i < ds.x.rows(); ++i) {
        (i >= fold.begin && i < fold.end ? test_rows : train_rows).push_back(i);
      }
      FitOptions opts = base_opts;
      opts.seed = base_opts.seed + static_cast<std::uint64_t>(fi) * 1009 +
                  static_cast<std::uint64_t>(mi) * 101;
      const Matrix mean = study_predict(
          models[mi], spec, take_rows(ds.x, train_rows),
          take_rows(ds.y, train_rows), take_rows(ds.x, test_rows), opts);
      const ColumnMetrics err = metrics(mean, take_rows(ds.y, test_rows));
      for (Index j = 0; j < d; ++j) {
        mse_tab[mi][static_cast<std::size_t>(j)][fi] = err.mse(j);
        mae_tab[mi][static_cast<std::size_t>(j)][fi] = err.mae(j);
        folds_out << models[mi].name << ',' << (fi + 1) << ','
                  << ds.output_names[static_cast<std::size_t>(j)] << ','
                  << fmt(err.mse(j)) << ',' << fmt(err.mae(j)) << '\n';
      }
    }
  }

  // Table shape: one row per output with the median-across-folds error,
  // then the max-median row.
  const auto write_table = [&](const std::string& file_name,
                               const std::vector<std::vector<std::vector<double>>>&
                                   tab) {
    std::ofstream out = open_report(out_dir, file_name, config);
    out << "output";
    for (const auto& m : models) out << ',' << m.name;
    out << '\n';
    std::vector<Vector> medians(models.size(), Vector(d));
    for (Index j = 0; j < d; ++j) {
      out << ds.output_names[static_cast<std::size_t>(j)];
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        medians[mi](j) = median_lower(tab[mi][static_cast<std::size_t>(j)]);
        out << ',' << fmt(medians[mi](j));
      }
      out << '\n';
    }
    out << "MMO";
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      out << ',' << fmt(mmo(medians[mi]));
    }
    out << '\n';
  };
  write_table("crossval_mse.csv", mse_tab);
  write_table("crossval_mae.csv", mae_tab);
}

void cmd_backtest(const ExperimentConfig& config) {
  config.check_keys({"out", "stocks", "indices", "fee", "train_len", "horizon",
                     "windows", "models", "kernel", "restarts", "max_iters",
                     "grad_tol", "seed", "workers"});
  const std::string out_dir = config.get("out", ".");

  std::vector<PriceSeries> stocks;
  for (const std::string& path : split_list(config.require("stocks"))) {
    stocks.push_back(
        price_series_from_csv(read_csv_file(path), basename_stem(path)));
  }
  std::vector<PriceSeries> indices;
  for (const std::string& path : split_list(config.require("indices"))) {
    indices.push_back(
        price_series_from_csv(read_csv_file(path), basename_stem(path)));
  }
  if (indices.size() != 3) {
    throw ConfigError("exactly three index CSVs are required");
  }

  WindowPlan plan;
  plan.train_len = config.get_int("train_len", 303);
  plan.horizon = config.get_int("horizon", 10);
  plan.n_windows = config.get_int("windows", 20);
  if (plan.train_len < 2 || plan.horizon < 1 || plan.n_windows < 1) {
    throw ConfigError("train_len, horizon, windows must be positive");
  }
  const double fee = config.get_double("fee", 0.00025);
  if (fee < 0.0 || fee >= 1.0) {
    throw ConfigError("fee must lie in [0, 1)");
  }
  if (config.get("kernel", "seard") != "seard") {
    throw ConfigError("backtest uses the seard kernel");
  }

  const std::vector<StudyModel> models = study_models_from(config);
  const FitOptions opts = fit_options_from(config);

  std::vector<BacktestResult> results;
  for (const StudyModel& m : models) {
    results.push_back(sliding_window_backtest(
        stocks, indices, plan, backtest_model_from_string(m.name), fee, opts));
  }

  const Index t_days = plan.forecast_days();
  const Index n_stocks = static_cast<Index>(stocks.size());

  // Per-day ledger per stock: actions and dollar values of every model
  // next to the passive baselines.
  for (Index s = 0; s < n_stocks; ++s) {
    std::ofstream out = open_report(
        out_dir, "backtest_ledger_" + sanitize(stocks[s].name) + ".csv",
        config);
    out << "day,date";
    for (const auto& m : models) out << ",act_" << m.name << ",dollar_" << m.name;
    out << ",buyhold_" << sanitize(stocks[s].name);
    for (const auto& ix : indices) out << ",buyhold_" << sanitize(ix.name);
    out << '\n';
    for (Index i = 0; i < t_days; ++i) {
      out << (i + 1) << ',' << results.front().forecast_dates[i];
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        const LedgerEntry& day = results[mi].ledgers[s].days[i];
        out << ',' << to_string(day.action) << ',' << fmt(day.value);
      }
      out << ',' << fmt(results.front().buyhold_stocks(i, s));
      for (Index j = 0; j < 3; ++j) {
        out << ',' << fmt(results.front().buyhold_indices(i, j));
      }
      out << '\n';
    }
  }

  // Period summaries (one row per horizon block) and the equal-weight
  // portfolio across stocks.
  const auto period_value = [&](const Vector& daily, Index period) {
    return daily((period + 1) * plan.horizon - 1);
  };
  for (Index s = 0; s < n_stocks; ++s) {
    std::ofstream out = open_report(
        out_dir, "backtest_periods_" + sanitize(stocks[s].name) + ".csv",
        config);
    out << "period";
    for (const auto& m : models) out << ',' << m.name;
    out << ",buyhold_" << sanitize(stocks[s].name);
    for (const auto& ix : indices) out << ",buyhold_" << sanitize(ix.name);
    out << "\nbeginning,100";
    for (std::size_t c = 1; c < models.size() + 4; ++c) out << ",100";
    out << '\n';
    for (Index period = 0; period < plan.n_windows; ++period) {
      out << (period + 1);
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        out << ','
            << fmt(results[mi].ledgers[s].days[(period + 1) * plan.horizon - 1]
                       .value);
      }
      out << ',' << fmt(period_value(results.front().buyhold_stocks.col(s),
                                     period));
      for (Index j = 0; j < 3; ++j) {
        out << ',' << fmt(period_value(results.front().buyhold_indices.col(j),
                                       period));
      }
      out << '\n';
    }
  }

  std::ofstream port = open_report(out_dir, "backtest_portfolio.csv", config);
  port << "period";
  for (const auto& m : models) port << ',' << m.name;
  port << ",buyhold_stocks";
  for (const auto& ix : indices) port << ",buyhold_" << sanitize(ix.name);
  port << "\nbeginning,100";
  for (std::size_t c = 1; c < models.size() + 4; ++c) port << ",100";
  port << '\n';
  for (Index period = 0; period < plan.n_windows; ++period) {
    port << (period + 1);
    const Index day = (period + 1) * plan.horizon - 1;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      double acc = 0.0;
      for (Index s = 0; s < n_stocks; ++s) {
        acc += results[mi].ledgers[s].days[day].value;
      }
      port << ',' << fmt(acc / static_cast<double>(n_stocks));
    }
    port << ','
         << fmt(results.front().buyhold_stocks.row(day).mean());
    for (Index j = 0; j < 3; ++j) {
      port << ',' << fmt(results.front().buyhold_indices(day, j));
    }
    port << '\n';
  }
}

void run_command(const std::string& command, const ExperimentConfig& config) {
  if (command == "simulate") {
    cmd_simulate(config);
  } else if (command == "fit") {
    cmd_fit(config);
  } else if (command == "predict") {
    cmd_predict(config);
  } else if (command == "crossval") {
    cmd_crossval(config);
  } else if (command == "backtest") {
    cmd_backtest(config);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
}

}  // namespace mvproc
