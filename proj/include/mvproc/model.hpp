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

#ifndef MVPROC_MODEL_HPP
#define MVPROC_MODEL_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mvproc/optimizer.hpp"
#include "mvproc/params.hpp"

namespace mvproc {

enum class ModelFamily { kGP, kTP };

ModelFamily model_family_from_string(const std::string& name);
std::string to_string(ModelFamily family);

/// Matrix-variate predictive law at m test points: mean (m x d), covariance
/// across test points (m x m), covariance across outputs (d x d), and the
/// degrees of freedom for the Student-t family.
struct Prediction {
  Matrix mean;
  Matrix col_cov;
  Matrix row_cov;
  std::optional<double> df;

  /// Entrywise predictive variance col_cov_ii * row_cov_jj, with the
  /// 1/(df - 2) moment factor applied for the Student-t family.
  Matrix pointwise_var() const;
};

/// Immutable fitted model: training data, hyperparameters, and the cached
/// factorization of the noisy training gram matrix. Safe to share across
/// threads; any parameter change means building a new instance.
class TrainedModel {
 public:
  static TrainedModel create(ModelFamily family, Matrix x, Matrix y,
                             HyperParams params, double nlml_at_fit,
                             bool fit_converged = true);

  ModelFamily family() const { return family_; }
  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }
  const HyperParams& params() const { return params_; }
  double nlml_at_fit() const { return nlml_at_fit_; }
  bool fit_converged() const { return fit_converged_; }

  const SpdFactor& kchol() const { return *kchol_; }
  /// K'(X,X)^-1 Y, reused by every prediction.
  const Matrix& alpha() const { return alpha_; }

  Index n() const { return x_.rows(); }
  Index input_dim() const { return x_.cols(); }
  Index output_dim() const { return y_.cols(); }

  // Column labels carried along for CSV-facing tools; empty when the model
  // was built from raw matrices.
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;

 private:
  TrainedModel() = default;

  ModelFamily family_ = ModelFamily::kGP;
  Matrix x_;
  Matrix y_;
  HyperParams params_;
  double nlml_at_fit_ = 0.0;
  bool fit_converged_ = true;
  std::shared_ptr<const SpdFactor> kchol_;
  Matrix alpha_;
};

/// Negative log marginal likelihood of Y under the matrix-variate Gaussian
/// process model with the given hyperparameters.
double mvgp_nlml(const HyperParams& params, const Matrix& x, const Matrix& y);

/// Analytic gradient of mvgp_nlml with respect to the packed parameter
/// vector (kernel log parameters, phi_lower, varphi_diag).
Vector mvgp_nlml_grad(const HyperParams& params, const Matrix& x,
                      const Matrix& y);

/// Student-t counterparts; the packed vector additionally carries
/// log(nu - 2) and the gradient covers it.
double mvtp_nlml(const HyperParams& params, const Matrix& x, const Matrix& y);
Vector mvtp_nlml_grad(const HyperParams& params, const Matrix& x,
                      const Matrix& y);

/// Fits by minimizing the NLML with multi-restart initialization (uniform
/// (0,1) draws on the unconstrained coordinates). The first diagonal entry
/// of Phi is pinned to 1 during optimization; the density is invariant under
/// (c Sigma, Omega / c), so this removes the flat direction.
TrainedModel mvgp_fit(const Matrix& x, const Matrix& y, const KernelSpec& spec,
                      const FitOptions& opts);
TrainedModel mvtp_fit(const Matrix& x, const Matrix& y, const KernelSpec& spec,
                      const FitOptions& opts);

/// Closed-form posterior at the test inputs. Gaussian: row_cov is the fitted
/// Omega. Student-t: df = nu + n and row_cov = Omega + Y^T K'^-1 Y.
Prediction mvgp_predict(const TrainedModel& model, const Matrix& xstar);
Prediction mvtp_predict(const TrainedModel& model, const Matrix& xstar);

/// Family dispatch used by the tools.
TrainedModel fit_model(ModelFamily family, const Matrix& x, const Matrix& y,
                       const KernelSpec& spec, const FitOptions& opts);
Prediction predict_model(const TrainedModel& model, const Matrix& xstar);

}  // namespace mvproc

#endif  // MVPROC_MODEL_HPP
