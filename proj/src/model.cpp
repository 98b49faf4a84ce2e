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

#include "mvproc/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "mvproc/errors.hpp"
#include "mvproc/matvar.hpp"

namespace mvproc {

namespace {

constexpr double kLogPi = 1.1447298858494001741;
constexpr double kLog2Pi = 1.8378770664093454836;

void check_training_shapes(const HyperParams& params, const Matrix& x,
                           const Matrix& y, const char* op) {
  if (x.rows() != y.rows()) {
    std::ostringstream msg;
    msg << op << ": X has " << x.rows() << " rows but Y has " << y.rows();
    throw DataError(msg.str());
  }
  if (y.cols() != params.rowcov.dim()) {
    std::ostringstream msg;
    msg << op << ": Y has " << y.cols() << " outputs but the row covariance is "
        << params.rowcov.dim() << "-dimensional";
    throw DataError(msg.str());
  }
  params.kernel.check_dim(x.cols());
}

// Gradient of a trace functional sum(M .* dK'/dtheta_j) over every kernel
// log parameter, written into grad starting at the kernel offset.
void kernel_gradient_block(const HyperParams& params, const Matrix& x,
                           const Matrix& weight, Vector& grad) {
  for (Index j = 0; j < params.kernel.param_count(); ++j) {
    const Matrix dk = gram_grad(params.kernel, x, j);
    grad(params.kernel_offset() + j) = weight.cwiseProduct(dk).sum();
  }
}

// Gradient of the Omega block given dL/dOmega (symmetric d x d): the
// elementary-matrix traces of the chain rule through Omega = Phi Phi^T
// collapse to 2 * dL/dOmega * Phi, with diagonal entries scaled by phi_ii
// for the log-diagonal parameterization.
void rowcov_gradient_block(const HyperParams& params, const Matrix& dl_domega,
                           Vector& grad) {
  const Matrix phi = params.rowcov.phi();
  const Matrix g = 2.0 * dl_domega * phi;
  const Index d = params.rowcov.dim();
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < i; ++j) {
      grad(params.phi_lower_offset() + RowCovParams::lower_index(i, j)) =
          g(i, j);
    }
    grad(params.varphi_offset() + i) = g(i, i) * phi(i, i);
  }
}

double gp_nlml_impl(const HyperParams& params, const Matrix& x,
                    const Matrix& y, Vector* grad) {
  check_training_shapes(params, x, y, "mvgp_nlml");
  const double n = static_cast<double>(x.rows());
  const double d = static_cast<double>(y.cols());

  const SpdFactor kf = SpdFactor::compute(gram_noisy(params.kernel, x));
  const SpdFactor of = SpdFactor::compute(params.rowcov.omega());

  const Matrix a = kf.solve(y);              // K'^-1 Y          (n x d)
  const Matrix b = of.solve(y.transpose());  // Omega^-1 Y^T     (d x n)
  const double quad = a.cwiseProduct(b.transpose()).sum();

  const double nlml = 0.5 * n * d * kLog2Pi + 0.5 * d * kf.log_det() +
                      0.5 * n * of.log_det() + 0.5 * quad;

  if (grad != nullptr) {
    grad->setZero(params.param_count());

    // Kernel and noise: 1/2 (d K'^-1 - K'^-1 Y Omega^-1 Y^T K'^-1) as the
    // trace weight against each dK'/dtheta.
    const Matrix w = symmetrize(a * of.solve(a.transpose()));
    const Matrix weight = 0.5 * (d * kf.inverse() - w);
    kernel_gradient_block(params, x, weight, *grad);

    // dL/dOmega = n/2 Omega^-1 - 1/2 Omega^-1 Y^T K'^-1 Y Omega^-1.
    const Matrix s = symmetrize(b * kf.solve(b.transpose()));
    const Matrix dl_domega = 0.5 * (n * of.inverse() - s);
    rowcov_gradient_block(params, dl_domega, *grad);
  }
  return nlml;
}

double tp_nlml_impl(const HyperParams& params, const Matrix& x,
                    const Matrix& y, Vector* grad) {
  check_training_shapes(params, x, y, "mvtp_nlml");
  if (!params.log_nu_minus2) {
    throw ConfigError("mvtp_nlml: parameter set lacks log(nu - 2)");
  }
  const Index ni = x.rows();
  const double n = static_cast<double>(ni);
  const double d = static_cast<double>(y.cols());
  const double scale = params.nu_minus2();  // shape matrix is (nu-2) K'
  const double tau = scale + n + 1.0;       // nu + n - 1
  const double expo = 0.5 * (tau + d);

  const Matrix kprime = gram_noisy(params.kernel, x);
  const SpdFactor kf = SpdFactor::compute(kprime);
  const SpdFactor of = SpdFactor::compute(params.rowcov.omega());

  const Matrix b = of.solve(y.transpose());  // Omega^-1 Y^T (d x n)
  const SpdFactor uf = SpdFactor::compute(symmetrize(scale * kprime + y * b));
  const double log_det_s = n * std::log(scale) + kf.log_det();

  const double nlml =
      expo * uf.log_det() - 0.5 * tau * log_det_s +
      log_multi_gamma_diff(static_cast<int>(ni), 0.5 * tau, expo) +
      0.5 * n * of.log_det() + 0.5 * d * n * kLogPi;

  if (grad != nullptr) {
    grad->setZero(params.param_count());

    const Matrix uinv = uf.inverse();
    const Matrix kinv = kf.inverse();
    const Matrix weight = scale * expo * uinv - 0.5 * tau * kinv;
    kernel_gradient_block(params, x, weight, *grad);

    // dL/dOmega = n/2 Omega^-1 - (tau+d)/2 Omega^-1 Y^T U^-1 Y Omega^-1.
    const Matrix t = symmetrize(b * uf.solve(b.transpose()));
    const Matrix dl_domega = 0.5 * n * of.inverse() - expo * t;
    rowcov_gradient_block(params, dl_domega, *grad);

    const double dl_dnu =
        0.5 * (uf.log_det() - log_det_s) +
        expo * uinv.cwiseProduct(kprime).sum() -
        0.5 * tau * n / scale +
        0.5 * multi_digamma(static_cast<int>(ni), 0.5 * tau) -
        0.5 * multi_digamma(static_cast<int>(ni), expo);
    (*grad)(params.nu_offset()) = dl_dnu * scale;
  }
  return nlml;
}

using NlmlFn = double (*)(const HyperParams&, const Matrix&, const Matrix&,
                          Vector*);

// Removes the pinned varphi_11 coordinate from the optimizer's view.
struct ScalePin {
  Index index;

  Vector to_full(const Vector& reduced) const {
    Vector full(reduced.size() + 1);
    full.head(index) = reduced.head(index);
    full(index) = 0.0;
    full.tail(reduced.size() - index) = reduced.tail(reduced.size() - index);
    return full;
  }

  Vector to_reduced(const Vector& full) const {
    Vector reduced(full.size() - 1);
    reduced.head(index) = full.head(index);
    reduced.tail(full.size() - index - 1) = full.tail(full.size() - index - 1);
    return reduced;
  }
};

TrainedModel fit_impl(ModelFamily family, NlmlFn nlml_fn, const Matrix& x,
                      const Matrix& y, const KernelSpec& spec,
                      const FitOptions& opts) {
  if (x.rows() < 2) {
    throw DataError("fit: at least two training rows are required");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw DataError("fit: training data contains non-finite values");
  }
  spec.check_dim(x.cols());

  HyperParams tmpl = HyperParams::make(spec.family, x.cols(), y.cols(),
                                       family == ModelFamily::kTP);
  const ScalePin pin{tmpl.varphi_offset()};
  const Index reduced_dim = tmpl.param_count() - 1;

  auto objective = [&](const Vector& v) {
    HyperParams hp = tmpl;
    hp.unpack(pin.to_full(v));
    return nlml_fn(hp, x, y, nullptr);
  };
  auto gradient = [&](const Vector& v) {
    HyperParams hp = tmpl;
    hp.unpack(pin.to_full(v));
    Vector g;
    nlml_fn(hp, x, y, &g);
    return pin.to_reduced(g);
  };

  auto fit_one = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x0(reduced_dim);
    for (Index i = 0; i < reduced_dim; ++i) {
      x0(i) = unit(rng);
    }
    const MinimizeResult r = minimize(objective, gradient, x0, opts);
    RestartResult out;
    out.params = r.x;
    out.value = r.f;
    out.converged = r.converged;
    return out;
  };

  MultiRestartOutcome best;
  try {
    best = multi_restart(fit_one, opts);
  } catch (const NumericError& e) {
    std::ostringstream msg;
    msg << "fit(" << to_string(family) << ", n=" << x.rows()
        << ", d=" << y.cols() << "): " << e.what();
    throw NumericError(msg.str());
  }

  HyperParams fitted = tmpl;
  fitted.unpack(pin.to_full(best.best.params));
  return TrainedModel::create(family, x, y, std::move(fitted),
                              best.best.value, best.any_converged);
}

// Shared posterior algebra: mean and the Schur-complement column covariance.
void posterior_mean_cov(const TrainedModel& model, const Matrix& xstar,
                        Prediction& out) {
  if (xstar.cols() != model.input_dim()) {
    std::ostringstream msg;
    msg << "predict: test inputs have dimension " << xstar.cols()
        << " but the model was trained on " << model.input_dim();
    throw DataError(msg.str());
  }
  const KernelSpec& spec = model.params().kernel;
  const Matrix k_train_test = gram(spec, model.x(), xstar);  // n x m
  Matrix k_test = gram(spec, xstar, xstar);
  k_test = symmetrize(k_test);
  k_test.diagonal().array() += spec.noise_variance();

  out.mean = k_train_test.transpose() * model.alpha();
  const Matrix v = model.kchol().solve(k_train_test);  // K'^-1 K_xs
  out.col_cov = symmetrize(k_test - k_train_test.transpose() * v);
}

}  // namespace

ModelFamily model_family_from_string(const std::string& name) {
  if (name == "gp") return ModelFamily::kGP;
  if (name == "tp") return ModelFamily::kTP;
  throw ConfigError("unknown model family '" + name + "' (expected gp|tp)");
}

std::string to_string(ModelFamily family) {
  return family == ModelFamily::kGP ? "gp" : "tp";
}

Matrix Prediction::pointwise_var() const {
  const double scale = df ? 1.0 / (*df - 2.0) : 1.0;
  Matrix var(mean.rows(), mean.cols());
  for (Index i = 0; i < mean.rows(); ++i) {
    const double ci = std::max(col_cov(i, i), 0.0);
    for (Index j = 0; j < mean.cols(); ++j) {
      var(i, j) = scale * ci * std::max(row_cov(j, j), 0.0);
    }
  }
  return var;
}

TrainedModel TrainedModel::create(ModelFamily family, Matrix x, Matrix y,
                                  HyperParams params, double nlml_at_fit,
                                  bool fit_converged) {
  if (family == ModelFamily::kTP && !params.log_nu_minus2) {
    throw ConfigError("TrainedModel: tp family requires log(nu - 2)");
  }
  TrainedModel m;
  m.family_ = family;
  m.x_ = std::move(x);
  m.y_ = std::move(y);
  m.params_ = std::move(params);
  m.nlml_at_fit_ = nlml_at_fit;
  m.fit_converged_ = fit_converged;
  m.params_.kernel.check_dim(m.x_.cols());
  m.kchol_ = std::make_shared<const SpdFactor>(
      SpdFactor::compute(gram_noisy(m.params_.kernel, m.x_)));
  m.alpha_ = m.kchol_->solve(m.y_);
  return m;
}

double mvgp_nlml(const HyperParams& params, const Matrix& x, const Matrix& y) {
  return gp_nlml_impl(params, x, y, nullptr);
}

Vector mvgp_nlml_grad(const HyperParams& params, const Matrix& x,
                      const Matrix& y) {
  Vector g;
  gp_nlml_impl(params, x, y, &g);
  return g;
}

double mvtp_nlml(const HyperParams& params, const Matrix& x, const Matrix& y) {
  return tp_nlml_impl(params, x, y, nullptr);
}

Vector mvtp_nlml_grad(const HyperParams& params, const Matrix& x,
                      const Matrix& y) {
  Vector g;
  tp_nlml_impl(params, x, y, &g);
  return g;
}

TrainedModel mvgp_fit(const Matrix& x, const Matrix& y, const KernelSpec& spec,
                      const FitOptions& opts) {
  return fit_impl(ModelFamily::kGP, &gp_nlml_impl, x, y, spec, opts);
}

TrainedModel mvtp_fit(const Matrix& x, const Matrix& y, const KernelSpec& spec,
                      const FitOptions& opts) {
  return fit_impl(ModelFamily::kTP, &tp_nlml_impl, x, y, spec, opts);
}

Prediction mvgp_predict(const TrainedModel& model, const Matrix& xstar) {
  if (model.family() != ModelFamily::kGP) {
    throw ConfigError("mvgp_predict: model family is not gp");
  }
  Prediction out;
  posterior_mean_cov(model, xstar, out);
  out.row_cov = model.params().rowcov.omega();
  return out;
}

Prediction mvtp_predict(const TrainedModel& model, const Matrix& xstar) {
  if (model.family() != ModelFamily::kTP) {
    throw ConfigError("mvtp_predict: model family is not tp");
  }
  Prediction out;
  posterior_mean_cov(model, xstar, out);
  out.row_cov = symmetrize(model.params().rowcov.omega() +
                           model.y().transpose() * model.alpha());
  out.df = model.params().nu() + static_cast<double>(model.n());
  return out;
}

TrainedModel fit_model(ModelFamily family, const Matrix& x, const Matrix& y,
                       const KernelSpec& spec, const FitOptions& opts) {
  return family == ModelFamily::kGP ? mvgp_fit(x, y, spec, opts)
                                    : mvtp_fit(x, y, spec, opts);
}

Prediction predict_model(const TrainedModel& model, const Matrix& xstar) {
  return model.family() == ModelFamily::kGP ? mvgp_predict(model, xstar)
                                            : mvtp_predict(model, xstar);
}

}  // namespace mvproc
