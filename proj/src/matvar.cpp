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

#include "mvproc/matvar.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "mvproc/errors.hpp"

namespace mvproc {

namespace {

constexpr double kLogPi = 1.1447298858494001741;
constexpr double kLog2Pi = 1.8378770664093454836;

void check_same_shape(const Matrix& x, const MatrixNormalParams& p,
                      const char* op) {
  p.check_shapes();
  if (x.rows() != p.rows() || x.cols() != p.cols()) {
    std::ostringstream msg;
    msg << op << ": X is " << x.rows() << "x" << x.cols()
        << " but the distribution is over " << p.rows() << "x" << p.cols();
    throw DataError(msg.str());
  }
}

double log_gamma_checked(double arg) {
  if (arg <= 0.0) {
    std::ostringstream msg;
    msg << "log_multi_gamma: argument " << arg << " hits a gamma pole";
    throw NumericError(msg.str());
  }
  return std::lgamma(arg);
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

Matrix standard_normal_matrix(Index n, Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix z(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) {
      z(i, j) = gauss(rng);
    }
  }
  return z;
}

// Lower-triangular Bartlett factor B with B B^T ~ Wishart_n(df, I).
// df may be fractional; requires df > n - 1.
Matrix bartlett_lower(Index n, double df, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix b = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double chi_df = df - static_cast<double>(i);
    std::gamma_distribution<double> chi2(chi_df / 2.0, 2.0);
    b(i, i) = std::sqrt(chi2(rng));
    for (Index j = 0; j < i; ++j) {
      b(i, j) = gauss(rng);
    }
  }
  return b;
}

void check_partition(const RowPartition& part, Index n, const char* op) {
  if (part.n1 < 1 || part.n2 < 1 || part.n1 + part.n2 != n) {
    std::ostringstream msg;
    msg << op << ": partition (" << part.n1 << ", " << part.n2
        << ") does not split " << n << " rows";
    throw DataError(msg.str());
  }
}

}  // namespace

void MatrixNormalParams::check_shapes() const {
  if (sigma.rows() != sigma.cols() || omega.rows() != omega.cols() ||
      mean.rows() != sigma.rows() || mean.cols() != omega.rows()) {
    std::ostringstream msg;
    msg << "MatrixNormalParams: inconsistent shapes mean " << mean.rows()
        << "x" << mean.cols() << ", sigma " << sigma.rows() << "x"
        << sigma.cols() << ", omega " << omega.rows() << "x" << omega.cols();
    throw DataError(msg.str());
  }
}

MatrixTParams::MatrixTParams(MatrixNormalParams base_params, double nu_dof)
    : base(std::move(base_params)), nu(nu_dof) {
  base.check_shapes();
  if (!(nu > 2.0)) {
    std::ostringstream msg;
    msg << "MatrixTParams: nu must exceed 2, got " << nu;
    throw ConfigError(msg.str());
  }
}

double log_multi_gamma(int n, double lambda) {
  double sum = 0.25 * n * (n - 1) * kLogPi;
  for (int i = 1; i <= n; ++i) {
    sum += log_gamma_checked(lambda + 0.5 * (1.0 - i));
  }
  return sum;
}

double log_multi_gamma_diff(int n, double a, double b) {
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double shift = 0.5 * (1.0 - i);
    sum += log_gamma_checked(a + shift) - log_gamma_checked(b + shift);
  }
  return sum;
}

double multi_digamma(int n, double x) {
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double arg = x + 0.5 * (1.0 - i);
    if (arg <= 0.0) {
      std::ostringstream msg;
      msg << "multi_digamma: argument " << arg << " hits a digamma pole";
      throw NumericError(msg.str());
    }
    sum += boost::math::digamma(arg);
  }
  return sum;
}

double mn_log_pdf(const Matrix& x, const MatrixNormalParams& p) {
  check_same_shape(x, p, "mn_log_pdf");
  const Index n = p.rows();
  const Index d = p.cols();

  const SpdFactor sig = SpdFactor::compute(p.sigma);
  const SpdFactor omg = SpdFactor::compute(p.omega);

  // tr(Omega^-1 A^T Sigma^-1 A) = || L_sigma^-1 A L_omega^-T ||_F^2
  const Matrix a = x - p.mean;
  const Matrix half = sig.solve_l(a);                       // n x d
  const Matrix whitened = omg.solve_l(half.transpose());    // d x n
  const double quad = whitened.squaredNorm();

  return -0.5 * static_cast<double>(n * d) * kLog2Pi -
         0.5 * static_cast<double>(d) * sig.log_det() -
         0.5 * static_cast<double>(n) * omg.log_det() - 0.5 * quad;
}

double mt_log_pdf(const Matrix& x, const MatrixTParams& p) {
  check_same_shape(x, p.base, "mt_log_pdf");
  const Index n = p.base.rows();
  const Index d = p.base.cols();
  const double nu = p.nu;
  const double scale = nu - 2.0;  // quadratic-form scaling of the density

  const SpdFactor sig = SpdFactor::compute(p.base.sigma);
  const SpdFactor omg = SpdFactor::compute(p.base.omega);

  // det(I + S^-1 A Omega^-1 A^T) = det(S + A Omega^-1 A^T) / det(S) with the
  // scaled shape matrix S = (nu - 2) Sigma.
  const Matrix a = x - p.base.mean;
  const Matrix rows_whitened = omg.solve_l(a.transpose());  // d x n
  const Matrix u = symmetrize(scale * p.base.sigma +
                              rows_whitened.transpose() * rows_whitened);
  const SpdFactor u_fac = SpdFactor::compute(u);
  const double log_det_s =
      static_cast<double>(n) * std::log(scale) + sig.log_det();

  const double half_tau = 0.5 * (nu + n - 1.0);
  const double exponent = half_tau + 0.5 * d;
  // Gamma_n((nu+d+n-1)/2) - Gamma_n((nu+n-1)/2), paired to survive large nu.
  const double gamma_term =
      log_multi_gamma_diff(static_cast<int>(n), exponent, half_tau);

  return gamma_term - 0.5 * static_cast<double>(n * d) * kLogPi -
         0.5 * static_cast<double>(d) * log_det_s -
         0.5 * static_cast<double>(n) * omg.log_det() -
         exponent * (u_fac.log_det() - log_det_s);
}

Matrix mn_sample(const MatrixNormalParams& p, std::uint64_t seed) {
  p.check_shapes();
  const SpdFactor sig = SpdFactor::compute(p.sigma);
  const SpdFactor omg = SpdFactor::compute(p.omega);
  auto rng = make_rng(seed);
  const Matrix z = standard_normal_matrix(p.rows(), p.cols(), rng);
  return p.mean + sig.matrix_l() * z * omg.matrix_l().transpose();
}

Matrix mt_sample(const MatrixTParams& p, std::uint64_t seed) {
  const Index n = p.base.rows();
  const SpdFactor sig = SpdFactor::compute(p.base.sigma);
  const SpdFactor omg = SpdFactor::compute(p.base.omega);
  auto rng = make_rng(seed);

  // Row scale W = (nu-2) L (B B^T)^-1 L^T ~ IW(nu + n - 1, (nu-2) Sigma);
  // any square root R with R R^T = W works below, so R = sqrt(nu-2) L B^-T.
  const Matrix b = bartlett_lower(n, p.nu + static_cast<double>(n) - 1.0, rng);
  const Matrix root_t = b.triangularView<Eigen::Lower>().solve(
      Matrix(sig.matrix_l().transpose()));  // B^-1 L^T
  const Matrix z = standard_normal_matrix(n, p.base.cols(), rng);
  return p.base.mean + std::sqrt(p.nu - 2.0) * root_t.transpose() * z *
                           omg.matrix_l().transpose();
}

MatrixNormalParams mn_row_marginal(const MatrixNormalParams& p,
                                   const RowPartition& part) {
  p.check_shapes();
  check_partition(part, p.rows(), "mn_row_marginal");
  return {p.mean.topRows(part.n1), p.sigma.topLeftCorner(part.n1, part.n1),
          p.omega};
}

MatrixNormalParams mn_row_conditional(const MatrixNormalParams& p,
                                      const RowPartition& part,
                                      const Matrix& x1) {
  p.check_shapes();
  check_partition(part, p.rows(), "mn_row_conditional");
  const Index n1 = part.n1;
  const Index n2 = part.n2;
  if (x1.rows() != n1 || x1.cols() != p.cols()) {
    throw DataError("mn_row_conditional: X1 shape does not match partition");
  }

  const Matrix sigma11 = p.sigma.topLeftCorner(n1, n1);
  const Matrix sigma12 = p.sigma.topRightCorner(n1, n2);
  const Matrix sigma22 = p.sigma.bottomRightCorner(n2, n2);
  const SpdFactor f11 = SpdFactor::compute(sigma11);

  const Matrix w = f11.solve(sigma12);  // Sigma11^-1 Sigma12, n1 x n2
  MatrixNormalParams out;
  out.mean = p.mean.bottomRows(n2) + w.transpose() * (x1 - p.mean.topRows(n1));
  out.sigma = symmetrize(sigma22 - sigma12.transpose() * w);
  out.omega = p.omega;
  return out;
}

MatrixTParams mt_row_marginal(const MatrixTParams& p,
                              const RowPartition& part) {
  return MatrixTParams(mn_row_marginal(p.base, part), p.nu);
}

MatrixTParams mt_row_conditional(const MatrixTParams& p,
                                 const RowPartition& part, const Matrix& x1) {
  MatrixNormalParams cond = mn_row_conditional(p.base, part, x1);

  const Index n1 = part.n1;
  const double nu_post = p.nu + static_cast<double>(n1);
  const SpdFactor f11 =
      SpdFactor::compute(Matrix(p.base.sigma.topLeftCorner(n1, n1)));
  const Matrix centered = x1 - p.base.mean.topRows(n1);
  const Matrix half = f11.solve_l(centered);  // n1 x d
  cond.omega = symmetrize(p.base.omega +
                          half.transpose() * half / (p.nu - 2.0));
  cond.sigma *= (p.nu - 2.0) / (nu_post - 2.0);

  return MatrixTParams(std::move(cond), nu_post);
}

}  // namespace mvproc
