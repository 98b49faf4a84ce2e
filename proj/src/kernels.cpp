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

#include "mvproc/kernels.hpp"

#include <cmath>
#include <sstream>

#include "mvproc/errors.hpp"

namespace mvproc {

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "se") return KernelFamily::kSE;
  if (name == "seard") return KernelFamily::kSEard;
  throw ConfigError("unknown kernel family '" + name + "' (expected se|seard)");
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::kSE ? "se" : "seard";
}

KernelSpec KernelSpec::make(KernelFamily family, Index input_dim) {
  KernelSpec spec;
  spec.family = family;
  spec.log_lengthscales =
      Vector::Zero(family == KernelFamily::kSE ? 1 : input_dim);
  return spec;
}

Vector KernelSpec::pack() const {
  Vector v(param_count());
  v.head(log_lengthscales.size()) = log_lengthscales;
  v(log_lengthscales.size()) = log_signal_variance;
  v(log_lengthscales.size() + 1) = log_noise_variance;
  return v;
}

void KernelSpec::unpack(const Vector& v) {
  if (v.size() != param_count()) {
    throw DataError("KernelSpec::unpack: wrong parameter count");
  }
  log_lengthscales = v.head(log_lengthscales.size());
  log_signal_variance = v(log_lengthscales.size());
  log_noise_variance = v(log_lengthscales.size() + 1);
}

void KernelSpec::check_dim(Index input_dim) const {
  const Index expected = family == KernelFamily::kSE ? 1 : input_dim;
  if (log_lengthscales.size() != expected) {
    std::ostringstream msg;
    msg << "KernelSpec: " << log_lengthscales.size()
        << " lengthscales but input dimension " << input_dim << " ("
        << to_string(family) << ")";
    throw DataError(msg.str());
  }
}

namespace {

// Squared distance with per-dimension inverse length scales applied.
double scaled_sq_dist(const KernelSpec& spec, const Vector& x1,
                      const Vector& x2) {
  if (spec.family == KernelFamily::kSE) {
    const double inv_l = std::exp(-spec.log_lengthscales(0));
    return ((x1 - x2) * inv_l).squaredNorm();
  }
  const Vector inv_l = (-spec.log_lengthscales).array().exp();
  return (x1 - x2).cwiseProduct(inv_l).squaredNorm();
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Vector& x1,
                   const Vector& x2) {
  if (x1.size() != x2.size()) {
    throw DataError("kernel_eval: point dimensions differ");
  }
  spec.check_dim(x1.size());
  return spec.signal_variance() * std::exp(-0.5 * scaled_sq_dist(spec, x1, x2));
}

Matrix gram(const KernelSpec& spec, const Matrix& x1, const Matrix& x2) {
  if (x1.cols() != x2.cols()) {
    throw DataError("gram: input dimensions differ");
  }
  spec.check_dim(x1.cols());

  // Scale once, then use the (a-b)^2 = a^2 + b^2 - 2ab expansion.
  Vector inv_l(x1.cols());
  if (spec.family == KernelFamily::kSE) {
    inv_l.setConstant(std::exp(-spec.log_lengthscales(0)));
  } else {
    inv_l = (-spec.log_lengthscales).array().exp();
  }
  const Matrix s1 = x1 * inv_l.asDiagonal();
  const Matrix s2 = x2 * inv_l.asDiagonal();
  const Vector sq1 = s1.rowwise().squaredNorm();
  const Vector sq2 = s2.rowwise().squaredNorm();

  Matrix g = -2.0 * s1 * s2.transpose();
  g.colwise() += sq1;
  g.rowwise() += sq2.transpose();
  g = (g.array().max(0.0) * -0.5).exp() * spec.signal_variance();
  return g;
}

Matrix gram_noisy(const KernelSpec& spec, const Matrix& x) {
  Matrix g = gram(spec, x, x);
  g = symmetrize(g);
  g.diagonal().array() += spec.noise_variance();
  return g;
}

Matrix gram_grad(const KernelSpec& spec, const Matrix& x, Index which) {
  spec.check_dim(x.cols());
  const Index n_ell = spec.log_lengthscales.size();
  if (which < 0 || which >= spec.param_count()) {
    throw DataError("gram_grad: parameter index out of range");
  }

  if (which == n_ell) {
    // d/d(log sf2): the noise-free gram itself.
    return symmetrize(gram(spec, x, x));
  }
  if (which == n_ell + 1) {
    // d/d(log sn2): sn2 * I.
    Matrix g = Matrix::Zero(x.rows(), x.rows());
    g.diagonal().array() = spec.noise_variance();
    return g;
  }

  // Lengthscale: dK/d(log l_q) = K .* scaled squared distance in dim q
  // (all dims summed for the shared SE length scale).
  const Matrix k = gram(spec, x, x);
  Matrix dist2 = Matrix::Zero(x.rows(), x.rows());
  if (spec.family == KernelFamily::kSE) {
    const double inv_l2 = std::exp(-2.0 * spec.log_lengthscales(0));
    for (Index q = 0; q < x.cols(); ++q) {
      const Vector col = x.col(q);
      dist2 += inv_l2 *
               (col.replicate(1, x.rows()) - col.transpose().replicate(x.rows(), 1))
                   .array()
                   .square()
                   .matrix();
    }
  } else {
    const double inv_l2 = std::exp(-2.0 * spec.log_lengthscales(which));
    const Vector col = x.col(which);
    dist2 = inv_l2 *
            (col.replicate(1, x.rows()) - col.transpose().replicate(x.rows(), 1))
                .array()
                .square()
                .matrix();
  }
  return symmetrize(k.cwiseProduct(dist2));
}

}  // namespace mvproc
