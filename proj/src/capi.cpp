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

#include "mvproc.h"

#include <cstring>
#include <string>

#include "mvproc/errors.hpp"
#include "mvproc/experiments.hpp"
#include "mvproc/model.hpp"
#include "mvproc/model_io.hpp"

struct mvproc_model_s {
  mvproc::TrainedModel model;
};

namespace {

using mvproc::Index;
using mvproc::Matrix;
using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

void set_error(char* errmsg, int errmsg_len, const std::string& what) {
  if (errmsg == nullptr || errmsg_len <= 0) return;
  const std::size_t n =
      std::min(what.size(), static_cast<std::size_t>(errmsg_len - 1));
  std::memcpy(errmsg, what.data(), n);
  errmsg[n] = '\0';
}

// Maps the library exception hierarchy onto the stable C error codes.
template <typename Fn>
int guarded(char* errmsg, int errmsg_len, Fn&& fn) {
  try {
    fn();
    return MVPROC_OK;
  } catch (const mvproc::ConfigError& e) {
    set_error(errmsg, errmsg_len, e.what());
    return MVPROC_ERR_CONFIG;
  } catch (const mvproc::DataError& e) {
    set_error(errmsg, errmsg_len, e.what());
    return MVPROC_ERR_DATA;
  } catch (const mvproc::NumericError& e) {
    set_error(errmsg, errmsg_len, e.what());
    return MVPROC_ERR_NUMERIC;
  } catch (const std::exception& e) {
    set_error(errmsg, errmsg_len, e.what());
    return MVPROC_ERR_INTERNAL;
  } catch (...) {
    set_error(errmsg, errmsg_len, "unknown error");
    return MVPROC_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* mvproc_version(void) { return mvproc::version(); }

void mvproc_fit_options_init(mvproc_fit_options* opts) {
  if (opts == nullptr) return;
  opts->restarts = 10;
  opts->max_iters = 200;
  opts->grad_tol = 1e-6;
  opts->seed = 0;
  opts->workers = 1;
}

int mvproc_fit(const char* family, const char* kernel, const double* x, int n,
               int p, const double* y, int d, const mvproc_fit_options* opts,
               mvproc_model** out_model, char* errmsg, int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (family == nullptr || kernel == nullptr || x == nullptr ||
        y == nullptr || out_model == nullptr) {
      throw mvproc::ConfigError("mvproc_fit: null argument");
    }
    if (n < 2 || p < 1 || d < 1) {
      throw mvproc::DataError("mvproc_fit: need n >= 2, p >= 1, d >= 1");
    }
    const std::string family_name(family);
    mvproc::ModelFamily fam;
    if (family_name == "mvgp" || family_name == "gp") {
      fam = mvproc::ModelFamily::kGP;
    } else if (family_name == "mvtp" || family_name == "tp") {
      fam = mvproc::ModelFamily::kTP;
    } else {
      throw mvproc::ConfigError("mvproc_fit: unknown family '" + family_name +
                                "'");
    }
    const Matrix xm = RowMajorMap(x, n, p);
    const Matrix ym = RowMajorMap(y, n, d);
    const mvproc::KernelSpec spec =
        mvproc::KernelSpec::make(mvproc::kernel_family_from_string(kernel), p);
    mvproc::FitOptions fit_opts;
    if (opts != nullptr) {
      fit_opts.restarts = opts->restarts;
      fit_opts.max_iters = opts->max_iters;
      fit_opts.grad_tol = opts->grad_tol;
      fit_opts.seed = opts->seed;
      fit_opts.workers = opts->workers;
    }
    *out_model =
        new mvproc_model_s{mvproc::fit_model(fam, xm, ym, spec, fit_opts)};
  });
}

int mvproc_predict(const mvproc_model* model, const double* xstar, int m,
                   double* mean_out, double* var_out, double* df_out,
                   char* errmsg, int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (model == nullptr || xstar == nullptr || mean_out == nullptr) {
      throw mvproc::ConfigError("mvproc_predict: null argument");
    }
    if (m < 1) {
      throw mvproc::DataError("mvproc_predict: need m >= 1");
    }
    const Matrix xs = RowMajorMap(
        xstar, m, static_cast<int>(model->model.input_dim()));
    const mvproc::Prediction pred = predict_model(model->model, xs);
    const Index d = model->model.output_dim();
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < d; ++j) {
        mean_out[i * d + j] = pred.mean(i, j);
      }
    }
    if (var_out != nullptr) {
      const Matrix var = pred.pointwise_var();
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < d; ++j) {
          var_out[i * d + j] = var(i, j);
        }
      }
    }
    if (df_out != nullptr && pred.df) {
      *df_out = *pred.df;
    }
  });
}

int mvproc_model_dims(const mvproc_model* model, int* n, int* p, int* d,
                      char* errmsg, int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (model == nullptr) {
      throw mvproc::ConfigError("mvproc_model_dims: null model");
    }
    if (n != nullptr) *n = static_cast<int>(model->model.n());
    if (p != nullptr) *p = static_cast<int>(model->model.input_dim());
    if (d != nullptr) *d = static_cast<int>(model->model.output_dim());
  });
}

int mvproc_model_family(const mvproc_model* model, char* family_buf,
                        int family_buf_len, char* errmsg, int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (model == nullptr || family_buf == nullptr || family_buf_len < 3) {
      throw mvproc::ConfigError(
          "mvproc_model_family: need a model and a buffer of at least 3");
    }
    const std::string name = to_string(model->model.family());
    std::memcpy(family_buf, name.c_str(), name.size() + 1);
  });
}

int mvproc_model_nlml(const mvproc_model* model, double* nlml, char* errmsg,
                      int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (model == nullptr || nlml == nullptr) {
      throw mvproc::ConfigError("mvproc_model_nlml: null argument");
    }
    *nlml = model->model.nlml_at_fit();
  });
}

int mvproc_model_save(const mvproc_model* model, const char* path,
                      char* errmsg, int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (model == nullptr || path == nullptr) {
      throw mvproc::ConfigError("mvproc_model_save: null argument");
    }
    mvproc::save_model(model->model, std::string(path));
  });
}

int mvproc_model_load(const char* path, mvproc_model** out_model, char* errmsg,
                      int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (path == nullptr || out_model == nullptr) {
      throw mvproc::ConfigError("mvproc_model_load: null argument");
    }
    *out_model = new mvproc_model_s{mvproc::load_model(std::string(path))};
  });
}

void mvproc_model_free(mvproc_model* model) { delete model; }

int mvproc_run(const char* command, const char* config, char* errmsg,
               int errmsg_len) {
  return guarded(errmsg, errmsg_len, [&] {
    if (command == nullptr) {
      throw mvproc::ConfigError("mvproc_run: null command");
    }
    const mvproc::ExperimentConfig parsed = mvproc::ExperimentConfig::parse(
        config == nullptr ? std::string() : std::string(config));
    mvproc::run_command(command, parsed);
  });
}

}  // extern "C"
