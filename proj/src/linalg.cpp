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

#include "mvproc/linalg.hpp"

#include <cmath>
#include <sstream>

#include "mvproc/errors.hpp"

namespace mvproc {

SpdFactor SpdFactor::compute(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw NumericError("SpdFactor: matrix is not square");
  }
  const double diag_mean = a.diagonal().mean();
  if (!std::isfinite(diag_mean)) {
    throw NumericError("SpdFactor: non-finite entries on the diagonal");
  }

  double eps = 0.0;
  for (;;) {
    Matrix trial = a;
    if (eps > 0.0) {
      trial.diagonal().array() += eps * diag_mean;
    }
    Eigen::LLT<Matrix> llt(trial);
    if (llt.info() == Eigen::Success) {
      // LLT can "succeed" with NaNs if the input already held them.
      Matrix l = llt.matrixL();
      if (l.diagonal().minCoeff() > 0.0 && l.allFinite()) {
        return SpdFactor(std::move(l), eps * diag_mean);
      }
    }
    if (eps == 0.0) {
      eps = 1e-10;
    } else if (eps < 1e-4) {
      eps *= 10.0;
    } else {
      std::ostringstream msg;
      msg << "SpdFactor: matrix of size " << a.rows()
          << " is not positive definite (jitter ladder exhausted at eps=1e-4)";
      throw NumericError(msg.str());
    }
  }
}

double SpdFactor::log_det() const {
  return 2.0 * l_.diagonal().array().log().sum();
}

Matrix SpdFactor::solve(const Matrix& b) const {
  Matrix x = l_.triangularView<Eigen::Lower>().solve(b);
  l_.triangularView<Eigen::Lower>().transpose().solveInPlace(x);
  return x;
}

Matrix SpdFactor::inverse() const {
  return solve(Matrix(Matrix::Identity(l_.rows(), l_.cols())));
}

Matrix SpdFactor::solve_l(const Matrix& b) const {
  return l_.triangularView<Eigen::Lower>().solve(b);
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace mvproc
