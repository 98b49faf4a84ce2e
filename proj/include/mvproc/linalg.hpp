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

#ifndef MVPROC_LINALG_HPP
#define MVPROC_LINALG_HPP

#include <Eigen/Dense>

namespace mvproc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Cholesky factorization of a symmetric positive definite matrix with an
/// escalating diagonal jitter fallback.
///
/// The factorization is attempted on the unmodified matrix first. If it
/// fails, eps * mean(diag) * I is added with eps = 1e-10, 1e-9, ..., 1e-4.
/// Once the ladder is exhausted a NumericError is thrown. All log-determinants
/// and linear solves in the library go through this class; explicit matrix
/// inverses are never formed except where a full inverse is genuinely needed
/// (gradient traces), in which case solve() against the identity is used.
class SpdFactor {
 public:
  /// Factor A (only the lower triangle is referenced). Throws NumericError.
  static SpdFactor compute(const Matrix& a);

  /// log det(A + jitter*I), as 2 * sum(log diag(L)).
  double log_det() const;

  /// Solves (A + jitter*I) x = b.
  Matrix solve(const Matrix& b) const;

  /// Full inverse via solve against the identity.
  Matrix inverse() const;

  /// Lower-triangular factor L with A + jitter*I = L L^T.
  const Matrix& matrix_l() const { return l_; }

  /// Solves L x = b (forward substitution).
  Matrix solve_l(const Matrix& b) const;

  /// Jitter that was actually added to the diagonal (0 if none was needed).
  double jitter() const { return jitter_; }

  Index rows() const { return l_.rows(); }

 private:
  SpdFactor(Matrix l, double jitter) : l_(std::move(l)), jitter_(jitter) {}

  Matrix l_;
  double jitter_ = 0.0;
};

/// Symmetric part (A + A^T) / 2; used before factoring matrices assembled
/// from products that are symmetric only up to round-off.
Matrix symmetrize(const Matrix& a);

}  // namespace mvproc

#endif  // MVPROC_LINALG_HPP
