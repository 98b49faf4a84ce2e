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

/*
 * C API of the mvproc shared library: multi-output regression with
 * matrix-variate Gaussian (mvgp) and Student-t (mvtp) process models.
 *
 * Conventions:
 *   - every function returns MVPROC_OK (0) on success or a nonzero error
 *     code, and writes a message into the caller's errmsg buffer when one
 *     is provided;
 *   - matrices are dense row-major double buffers;
 *   - models are opaque handles released with mvproc_model_free.
 */

#ifndef MVPROC_H
#define MVPROC_H

#ifdef __cplusplus
extern "C" {
#endif

#define MVPROC_OK 0
#define MVPROC_ERR_INTERNAL 1
#define MVPROC_ERR_CONFIG 2
#define MVPROC_ERR_DATA 3
#define MVPROC_ERR_NUMERIC 4

typedef struct mvproc_model_s mvproc_model;

typedef struct mvproc_fit_options_s {
  int restarts;                /* default 10 */
  int max_iters;               /* default 200 */
  double grad_tol;             /* default 1e-6 */
  unsigned long long seed;     /* default 0 */
  int workers;                 /* default 1; >1 runs restarts in parallel */
} mvproc_fit_options;

const char* mvproc_version(void);
void mvproc_fit_options_init(mvproc_fit_options* opts);

/*
 * Fits a model on n points of dimension p with d outputs.
 *   family: "mvgp" | "mvtp" (or the single-output aliases "gp" | "tp")
 *   kernel: "se" | "seard"
 *   x: n*p row-major, y: n*d row-major
 * On success *out_model owns the fitted model.
 */
int mvproc_fit(const char* family, const char* kernel, const double* x, int n,
               int p, const double* y, int d, const mvproc_fit_options* opts,
               mvproc_model** out_model, char* errmsg, int errmsg_len);

/*
 * Posterior at m test points (xstar: m*p row-major).
 *   mean_out: m*d row-major (required)
 *   var_out:  m*d pointwise predictive variances (optional, may be NULL)
 *   df_out:   Student-t degrees of freedom nu + n (optional, may be NULL;
 *             left untouched for the Gaussian family)
 */
int mvproc_predict(const mvproc_model* model, const double* xstar, int m,
                   double* mean_out, double* var_out, double* df_out,
                   char* errmsg, int errmsg_len);

int mvproc_model_dims(const mvproc_model* model, int* n, int* p, int* d,
                      char* errmsg, int errmsg_len);
/* family_buf receives "gp" or "tp". */
int mvproc_model_family(const mvproc_model* model, char* family_buf,
                        int family_buf_len, char* errmsg, int errmsg_len);
int mvproc_model_nlml(const mvproc_model* model, double* nlml, char* errmsg,
                      int errmsg_len);

/* Text model files round-trip bit exactly (hexadecimal float encoding). */
int mvproc_model_save(const mvproc_model* model, const char* path,
                      char* errmsg, int errmsg_len);
int mvproc_model_load(const char* path, mvproc_model** out_model, char* errmsg,
                      int errmsg_len);
void mvproc_model_free(mvproc_model* model);

/*
 * Batch commands: "simulate", "fit", "predict", "crossval", "backtest".
 * config is flat "key = value" text; later lines override earlier ones, so
 * callers append overrides after the contents of a config file. Reports are
 * written under the configured output directory. The returned code matches
 * the CLI exit codes (0 ok, 2 config, 3 data, 4 numerical).
 */
int mvproc_run(const char* command, const char* config, char* errmsg,
               int errmsg_len);

#ifdef __cplusplus
}
#endif

#endif /* MVPROC_H */
