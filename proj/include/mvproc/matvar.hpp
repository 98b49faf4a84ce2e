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

#ifndef MVPROC_MATVAR_HPP
#define MVPROC_MATVAR_HPP

#include <cstdint>

#include "mvproc/linalg.hpp"

namespace mvproc {

/// Parameters of a matrix-variate Gaussian over n x d matrices.
///
/// `sigma` (n x n) is the covariance across rows (data points), `omega`
/// (d x d) the covariance across columns (outputs). vec of the transposed
/// variate is Gaussian with covariance kron(sigma, omega).
struct MatrixNormalParams {
  Matrix mean;   // n x d
  Matrix sigma;  // n x n
  Matrix omega;  // d x d

  Index rows() const { return mean.rows(); }
  Index cols() const { return mean.cols(); }

  /// Throws DataError if the three shapes are inconsistent.
  void check_shapes() const;
};

/// Matrix-variate Student-t parameters, nu > 2.
///
/// The quadratic form in the density carries a 1/(nu - 2) factor, so
/// cov(vec(X^T)) = kron(sigma, omega) exactly and the law converges to the
/// matrix Gaussian with the same sigma and omega as nu grows. At nu = 3 the
/// scaling factor is 1 and the unscaled textbook form is recovered.
struct MatrixTParams {
  MatrixTParams(MatrixNormalParams base_params, double nu_dof);

  MatrixNormalParams base;
  double nu;
};

/// Split of the n rows into a leading block of n1 and a trailing block of n2.
struct RowPartition {
  Index n1 = 0;
  Index n2 = 0;
};

/// log of the multivariate gamma function:
/// n(n-1)/4 * log(pi) + sum_i log Gamma(lambda + (1 - i)/2), i = 1..n.
/// Throws NumericError when any gamma argument is at or below a pole.
double log_multi_gamma(int n, double lambda);

/// log_multi_gamma(n, a) - log_multi_gamma(n, b), paired per summand so the
/// result stays accurate when a and b are both large and nearly equal.
double log_multi_gamma_diff(int n, double a, double b);

/// Derivative of log_multi_gamma in its second argument:
/// sum_i digamma(x + (1 - i)/2).
double multi_digamma(int n, double x);

/// Log density of the matrix-variate Gaussian at X. Cholesky-based; no
/// explicit inverses or nd x nd matrices.
double mn_log_pdf(const Matrix& x, const MatrixNormalParams& p);

/// Log density of the matrix-variate Student-t at X.
double mt_log_pdf(const Matrix& x, const MatrixTParams& p);

/// Draws one n x d matrix as M + L_sigma Z L_omega^T with Z iid standard
/// normal. Deterministic for a fixed seed.
Matrix mn_sample(const MatrixNormalParams& p, std::uint64_t seed);

/// Draws one matrix-t variate via the inverse-Wishart row-scale mixture:
/// W ~ IW(nu + n - 1, (nu - 2) sigma), X | W ~ MN(mean, W, omega), so that
/// E[W] = sigma and the sample covariance matches kron(sigma, omega).
Matrix mt_sample(const MatrixTParams& p, std::uint64_t seed);

/// Distribution of the trailing rows given the leading rows X1:
/// mean M2 + Sigma21 Sigma11^-1 (X1 - M1), covariance the Schur complement
/// of Sigma11, omega unchanged.
MatrixNormalParams mn_row_conditional(const MatrixNormalParams& p,
                                      const RowPartition& part,
                                      const Matrix& x1);

/// Marginal law of the leading rows (mean M1, covariance Sigma11).
MatrixNormalParams mn_row_marginal(const MatrixNormalParams& p,
                                   const RowPartition& part);

/// Student-t analogue: dof increases to nu + n1, sigma is the Schur
/// complement rescaled by (nu - 2)/(nu + n1 - 2), and omega picks up the
/// data-dependent term (X1 - M1)^T Sigma11^-1 (X1 - M1) / (nu - 2). As nu
/// grows this approaches the Gaussian conditional.
MatrixTParams mt_row_conditional(const MatrixTParams& p,
                                 const RowPartition& part, const Matrix& x1);

MatrixTParams mt_row_marginal(const MatrixTParams& p, const RowPartition& part);

}  // namespace mvproc

#endif  // MVPROC_MATVAR_HPP
