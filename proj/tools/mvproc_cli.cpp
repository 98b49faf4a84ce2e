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

// Command-line front end. All functionality lives behind the C API of the
// shared library; this binary only turns flags into `key = value` settings
// (appended after an optional config file, so flags win) and dispatches.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mvproc.h"

namespace {

// Options registered per subcommand; only flags the user actually set are
// emitted, so config-file values stay in force otherwise.
class SettingEmitter {
 public:
  void track(CLI::Option* opt, const std::string& key,
             const std::function<std::string()>& value) {
    items_.push_back({opt, key, value});
  }

  std::string render() const {
    std::ostringstream out;
    for (const auto& item : items_) {
      if (item.opt->count() > 0) {
        out << item.key << " = " << item.value() << '\n';
      }
    }
    return out.str();
  }

 private:
  struct Item {
    CLI::Option* opt;
    std::string key;
    std::function<std::string()> value;
  };
  std::vector<Item> items_;
};

struct CommandContext {
  CLI::App* cmd = nullptr;
  SettingEmitter emitter;
  std::string config_path;

  std::shared_ptr<std::string> str(const std::string& flag,
                                   const std::string& key,
                                   const std::string& desc) {
    auto holder = std::make_shared<std::string>();
    CLI::Option* opt = cmd->add_option(flag, *holder, desc);
    emitter.track(opt, key, [holder] { return *holder; });
    return holder;
  }

  void integer(const std::string& flag, const std::string& key,
               const std::string& desc) {
    auto holder = std::make_shared<long long>(0);
    CLI::Option* opt = cmd->add_option(flag, *holder, desc);
    emitter.track(opt, key, [holder] { return std::to_string(*holder); });
  }

  void real(const std::string& flag, const std::string& key,
            const std::string& desc) {
    auto holder = std::make_shared<double>(0.0);
    CLI::Option* opt = cmd->add_option(flag, *holder, desc);
    emitter.track(opt, key, [holder] {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", *holder);
      return std::string(buf);
    });
  }

  void boolean(const std::string& flag, const std::string& key,
               const std::string& desc) {
    auto holder = std::make_shared<bool>(false);
    CLI::Option* opt = cmd->add_flag(flag, *holder, desc);
    emitter.track(opt, key, [holder] {
      return *holder ? std::string("true") : std::string("false");
    });
  }
};

void add_shared(CommandContext& ctx) {
  ctx.integer("--seed", "seed", "RNG seed for bit-exact reruns (default 42)");
  ctx.integer("--restarts", "restarts",
              "optimizer restarts from random initials (default 10)");
  ctx.integer("--max-iters", "max_iters",
              "iteration cap per restart (default 200)");
  ctx.integer("--workers", "workers", "worker threads (default 1)");
  ctx.str("--out", "out", "output directory for reports (default .)");
  ctx.cmd->add_option("--config", ctx.config_path,
                      "flat key = value settings file; flags override it");
}

int dispatch(const char* name, const CommandContext& ctx) {
  std::string config;
  if (!ctx.config_path.empty()) {
    std::ifstream in(ctx.config_path);
    if (!in) {
      std::fprintf(stderr, "mvproc %s: cannot open config file %s\n", name,
                   ctx.config_path.c_str());
      return MVPROC_ERR_CONFIG;
    }
    std::ostringstream text;
    text << in.rdbuf();
    config = text.str();
    config += '\n';
  }
  config += ctx.emitter.render();

  char err[1024] = {0};
  const int rc = mvproc_run(name, config.c_str(), err, sizeof(err));
  if (rc != MVPROC_OK) {
    std::fprintf(stderr, "mvproc %s: %s\n", name, err);
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-output Gaussian and Student-t process regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mvproc_version()));

  CommandContext simulate;
  simulate.cmd = app.add_subcommand(
      "simulate", "two-output simulation study with ARMSE report");
  add_shared(simulate);
  simulate.integer("--reps", "reps", "repetitions (default 100)");
  simulate.str("--noise", "noise", "noise family: mgp|mtp|both (default both)");
  simulate.str("--kernel", "kernel", "kernel family: se|seard (default se)");
  simulate.str("--models", "models",
               "comma list of mvgp,mvtp,gp,tp (default all)");

  CommandContext fit;
  fit.cmd = app.add_subcommand("fit", "fit a model on a CSV dataset");
  add_shared(fit);
  fit.str("--data", "data", "training CSV (header row required)");
  fit.str("--manifest", "manifest", "column manifest file");
  fit.str("--inputs", "inputs", "comma list of input columns");
  fit.str("--outputs", "outputs", "comma list of output columns");
  fit.str("--model", "model", "mvgp|mvtp|gp|tp (default mvgp)");
  fit.str("--kernel", "kernel", "se|seard (default seard)");
  fit.str("--model-out", "model_out", "model file path (default <out>/model.mvp)");
  fit.boolean("--drop-missing", "drop_missing",
              "delete rows with missing cells instead of failing");

  CommandContext predict;
  predict.cmd =
      app.add_subcommand("predict", "predict from a saved model file");
  add_shared(predict);
  predict.str("--model-file", "model_file", "model file written by fit");
  predict.str("--data", "data", "CSV with the model's input columns");
  predict.str("--inputs", "inputs",
              "input columns (defaults to the names stored in the model)");
  predict.boolean("--drop-missing", "drop_missing",
                  "delete rows with missing cells instead of failing");

  CommandContext crossval;
  crossval.cmd = app.add_subcommand(
      "crossval", "contiguous k-fold cross-validation with MSE/MAE/MMO");
  add_shared(crossval);
  crossval.str("--data", "data", "dataset CSV");
  crossval.str("--manifest", "manifest", "column manifest file");
  crossval.str("--inputs", "inputs", "comma list of input columns");
  crossval.str("--outputs", "outputs", "comma list of output columns");
  crossval.integer("--k", "k", "fold count; must divide the row count");
  crossval.str("--models", "models", "comma list (default mvgp,mvtp,gp,tp)");
  crossval.str("--kernel", "kernel", "se|seard (default seard)");
  crossval.str("--normalize", "normalize",
               "standardize columns from full-series statistics (default true)");
  crossval.boolean("--drop-missing", "drop_missing",
                   "delete rows with missing cells instead of failing");

  CommandContext backtest;
  backtest.cmd = app.add_subcommand(
      "backtest", "sliding-window trading backtest on OHLC CSVs");
  add_shared(backtest);
  backtest.str("--stocks", "stocks", "comma list of stock OHLC CSVs");
  backtest.str("--indices", "indices", "comma list of exactly three index CSVs");
  backtest.real("--fee", "fee", "per-conversion fee rate (default 0.00025)");
  backtest.integer("--train-len", "train_len",
                   "training window length (default 303)");
  backtest.integer("--horizon", "horizon",
                   "days predicted per window (default 10)");
  backtest.integer("--windows", "windows", "window count (default 20)");
  backtest.str("--models", "models", "comma list (default mvgp,mvtp,gp,tp)");

  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, const CommandContext*>> table = {
      {"simulate", &simulate},
      {"fit", &fit},
      {"predict", &predict},
      {"crossval", &crossval},
      {"backtest", &backtest},
  };
  for (const auto& [name, ctx] : table) {
    if (ctx->cmd->parsed()) {
      return dispatch(name, *ctx);
    }
  }
  return MVPROC_ERR_CONFIG;
}
