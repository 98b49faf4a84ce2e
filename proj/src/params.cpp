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

#include "mvproc/params.hpp"

#include <cmath>

#include "mvproc/errors.hpp"

namespace mvproc {

RowCovParams RowCovParams::identity(Index d) {
  RowCovParams rc;
  rc.phi_lower = Vector::Zero(d * (d - 1) / 2);
  rc.varphi_diag = Vector::Zero(d);
  return rc;
}

Index RowCovParams::lower_index(Index i, Index j) {
  return i * (i - 1) / 2 + j;
}

Matrix RowCovParams::phi() const {
  const Index d = dim();
  Matrix phi = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    phi(i, i) = std::exp(varphi_diag(i));
    for (Index j = 0; j < i; ++j) {
      phi(i, j) = phi_lower(lower_index(i, j));
    }
  }
  return phi;
}

Matrix RowCovParams::omega() const {
  const Matrix p = phi();
  return p * p.transpose();
}

HyperParams HyperParams::make(KernelFamily family, Index input_dim,
                              Index output_dim, bool student_t) {
  HyperParams hp;
  hp.kernel = KernelSpec::make(family, input_dim);
  hp.rowcov = RowCovParams::identity(output_dim);
  if (student_t) {
    hp.log_nu_minus2 = 0.0;
  }
  return hp;
}

double HyperParams::nu() const { return 2.0 + nu_minus2(); }

double HyperParams::nu_minus2() const {
  if (!log_nu_minus2) {
    throw NumericError("HyperParams: nu requested on a Gaussian parameter set");
  }
  return std::exp(*log_nu_minus2);
}

Index HyperParams::param_count() const {
  return kernel.param_count() + rowcov.param_count() +
         (log_nu_minus2 ? 1 : 0);
}

Vector HyperParams::pack() const {
  Vector v(param_count());
  v.head(kernel.param_count()) = kernel.pack();
  v.segment(phi_lower_offset(), rowcov.phi_lower.size()) = rowcov.phi_lower;
  v.segment(varphi_offset(), rowcov.varphi_diag.size()) = rowcov.varphi_diag;
  if (log_nu_minus2) {
    v(nu_offset()) = *log_nu_minus2;
  }
  return v;
}

void HyperParams::unpack(const Vector& v) {
  if (v.size() != param_count()) {
    throw DataError("HyperParams::unpack: wrong parameter count");
  }
  kernel.unpack(v.head(kernel.param_count()));
  rowcov.phi_lower = v.segment(phi_lower_offset(), rowcov.phi_lower.size());
  rowcov.varphi_diag = v.segment(varphi_offset(), rowcov.varphi_diag.size());
  if (log_nu_minus2) {
    log_nu_minus2 = v(nu_offset());
  }
}

}  // namespace mvproc
