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

#ifndef MVPROC_KERNELS_HPP
#define MVPROC_KERNELS_HPP

#include <string>

#include "mvproc/linalg.hpp"

namespace mvproc {

enum class KernelFamily { kSE, kSEard };

KernelFamily kernel_family_from_string(const std::string& name);
std::string to_string(KernelFamily family);

/// Squared-exponential covariance, isotropic (SE) or with one length scale
/// per input dimension (SEard). All positive parameters are stored in log
/// space so the optimizer works on an unconstrained vector.
struct KernelSpec {
  KernelFamily family = KernelFamily::kSE;
  Vector log_lengthscales;        // size 1 for SE, p for SEard
  double log_signal_variance = 0.0;
  double log_noise_variance = 0.0;

  static KernelSpec make(KernelFamily family, Index input_dim);

  double signal_variance() const { return std::exp(log_signal_variance); }
  double noise_variance() const { return std::exp(log_noise_variance); }

  /// Number of log parameters: lengthscales + signal + noise.
  Index param_count() const { return log_lengthscales.size() + 2; }

  /// Flattened view [log_lengthscales..., log_sf2, log_sn2].
  Vector pack() const;
  void unpack(const Vector& v);

  /// Throws DataError if the lengthscale count does not match input_dim.
  void check_dim(Index input_dim) const;
};

/// Noise-free covariance between two points.
double kernel_eval(const KernelSpec& spec, const Vector& x1, const Vector& x2);

/// Cross-covariance matrix, [i,j] = k(x1_i, x2_j); rows of X are points.
Matrix gram(const KernelSpec& spec, const Matrix& x1, const Matrix& x2);

/// gram(X, X) + sigma_n^2 I.
Matrix gram_noisy(const KernelSpec& spec, const Matrix& x);

/// Derivative of gram_noisy with respect to log parameter `which`
/// (0..lengthscales-1, then log signal variance, then log noise variance).
/// The chain rule through the log reparameterization is included.
Matrix gram_grad(const KernelSpec& spec, const Matrix& x, Index which);

}  // namespace mvproc

#endif  // MVPROC_KERNELS_HPP
