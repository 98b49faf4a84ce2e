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

#ifndef MVPROC_PARAMS_HPP
#define MVPROC_PARAMS_HPP

#include <optional>

#include "mvproc/kernels.hpp"
#include "mvproc/linalg.hpp"

namespace mvproc {

/// Output covariance Omega = Phi Phi^T through its Cholesky-style factor.
/// Strictly-lower entries of Phi are free; diagonal entries are exp of the
/// stored values, which keeps Phi unique and Omega positive definite.
struct RowCovParams {
  Vector phi_lower;    // d(d-1)/2 entries, rows top to bottom, (i,j) with j<i
  Vector varphi_diag;  // d entries, phi_ii = exp(varphi_ii)

  static RowCovParams identity(Index d);

  Index dim() const { return varphi_diag.size(); }
  Index param_count() const { return phi_lower.size() + varphi_diag.size(); }

  /// Lower-triangular Phi with positive diagonal.
  Matrix phi() const;

  /// Omega = Phi Phi^T.
  Matrix omega() const;

  /// Index of (i, j), j < i, inside phi_lower.
  static Index lower_index(Index i, Index j);
};

/// Complete unconstrained parameter set for one model: kernel log
/// parameters, the Omega factor, and (Student-t only) log(nu - 2).
///
/// pack()/unpack() expose the flat vector the optimizer works on; the
/// round trip is exact. Layout:
///   [kernel params | phi_lower | varphi_diag | log_nu_minus2?]
struct HyperParams {
  KernelSpec kernel;
  RowCovParams rowcov;
  std::optional<double> log_nu_minus2;

  static HyperParams make(KernelFamily family, Index input_dim,
                          Index output_dim, bool student_t);

  double nu() const;        // 2 + exp(log_nu_minus2); throws if absent
  double nu_minus2() const;  // exp(log_nu_minus2), exact even when tiny

  Index param_count() const;
  Vector pack() const;
  void unpack(const Vector& v);

  /// Position of a named block inside the packed vector.
  Index kernel_offset() const { return 0; }
  Index phi_lower_offset() const { return kernel.param_count(); }
  Index varphi_offset() const {
    return kernel.param_count() + rowcov.phi_lower.size();
  }
  Index nu_offset() const { return varphi_offset() + rowcov.varphi_diag.size(); }
};

}  // namespace mvproc

#endif  // MVPROC_PARAMS_HPP
