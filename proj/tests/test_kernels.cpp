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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mvproc/errors.hpp"
#include "mvproc/kernels.hpp"
#include "mvproc/linalg.hpp"
#include "test_support.hpp"

using namespace mvproc;
namespace ts = testsupport;

namespace {

KernelSpec random_spec(KernelFamily family, Index p, std::mt19937_64& gen) {
  KernelSpec spec = KernelSpec::make(family, p);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Index i = 0; i < spec.log_lengthscales.size(); ++i) {
    spec.log_lengthscales(i) = u(gen);
  }
  spec.log_signal_variance = u(gen);
  spec.log_noise_variance = u(gen) - 2.0;
  return spec;
}

}  // namespace

TEST_CASE("kernel_eval basics") {
  auto gen = ts::rng(31);
  KernelSpec se = KernelSpec::make(KernelFamily::kSE, 3);
  const Vector x = ts::random_vector(3, gen);
  CHECK(kernel_eval(se, x, x) == doctest::Approx(1.0));

  // Unit signal and lengthscale at distance 1.
  Vector a = Vector::Zero(3);
  Vector b = Vector::Zero(3);
  b(0) = 1.0;
  CHECK(kernel_eval(se, a, b) ==
        doctest::Approx(0.6065306597126334).epsilon(1e-12));
}

TEST_CASE("SEard with equal lengthscales reduces to SE") {
  auto gen = ts::rng(32);
  for (int rep = 0; rep < 20; ++rep) {
    KernelSpec se = random_spec(KernelFamily::kSE, 4, gen);
    KernelSpec ard = se;
    ard.family = KernelFamily::kSEard;
    ard.log_lengthscales = Vector::Constant(4, se.log_lengthscales(0));
    const Vector x1 = ts::random_vector(4, gen);
    const Vector x2 = ts::random_vector(4, gen);
    CHECK(kernel_eval(ard, x1, x2) ==
          doctest::Approx(kernel_eval(se, x1, x2)).epsilon(1e-12));
  }
}

TEST_CASE("gram structure and elementwise oracle") {
  auto gen = ts::rng(33);
  const KernelSpec spec = random_spec(KernelFamily::kSEard, 2, gen);
  const Matrix x1 = ts::random_matrix(3, 2, gen);
  const Matrix x2 = ts::random_matrix(4, 2, gen);

  const Matrix g11 = gram(spec, x1, x1);
  for (Index i = 0; i < 3; ++i) {
    CHECK(g11(i, i) == doctest::Approx(spec.signal_variance()).epsilon(1e-12));
  }
  const Matrix g12 = gram(spec, x1, x2);
  CHECK((g12 - gram(spec, x2, x1).transpose()).norm() < 1e-12);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 4; ++j) {
      CHECK(g12(i, j) ==
            doctest::Approx(kernel_eval(spec, x1.row(i), x2.row(j)))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("gram_noisy adds exactly sigma_n^2 on the diagonal") {
  auto gen = ts::rng(34);
  KernelSpec spec = random_spec(KernelFamily::kSE, 2, gen);
  const Matrix x = ts::random_matrix(5, 2, gen);

  KernelSpec noise_free = spec;
  noise_free.log_noise_variance = -std::numeric_limits<double>::infinity();
  CHECK((gram_noisy(noise_free, x) - gram(noise_free, x, x)).norm() < 1e-15);

  const Matrix diff = gram_noisy(spec, x) - gram(spec, x, x);
  const Matrix expected =
      spec.noise_variance() * Matrix::Identity(x.rows(), x.rows());
  CHECK((diff - expected).norm() < 1e-14);

  // Spectral view of the same fact.
  Eigen::SelfAdjointEigenSolver<Matrix> base(gram(spec, x, x));
  Eigen::SelfAdjointEigenSolver<Matrix> noisy(gram_noisy(spec, x));
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK(noisy.eigenvalues()(i) - base.eigenvalues()(i) ==
          doctest::Approx(spec.noise_variance()).epsilon(1e-8));
  }

  // 2 x 2 numeric check from first principles.
  KernelSpec unit = KernelSpec::make(KernelFamily::kSE, 1);
  Matrix pts(2, 1);
  pts << 0.0, 1.0;
  const Matrix g = gram_noisy(unit, pts);
  CHECK(g(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("gram_grad analytic forms and finite differences") {
  auto gen = ts::rng(35);
  KernelSpec spec = random_spec(KernelFamily::kSEard, 3, gen);
  const Matrix x = ts::random_matrix(6, 3, gen);
  const Index n_ell = spec.log_lengthscales.size();

  CHECK((gram_grad(spec, x, n_ell) - gram(spec, x, x)).norm() < 1e-12);
  const Matrix noise_grad = gram_grad(spec, x, n_ell + 1);
  CHECK((noise_grad - spec.noise_variance() *
                          Matrix::Identity(x.rows(), x.rows()))
            .norm() < 1e-14);

  for (Index which = 0; which < spec.param_count(); ++which) {
    CHECK((gram_grad(spec, x, which) -
           gram_grad(spec, x, which).transpose())
              .norm() < 1e-12);
    const double h = 1e-6;
    KernelSpec plus = spec;
    KernelSpec minus = spec;
    Vector vp = spec.pack(), vm = spec.pack();
    vp(which) += h;
    vm(which) -= h;
    plus.unpack(vp);
    minus.unpack(vm);
    const Matrix fd = (gram_noisy(plus, x) - gram_noisy(minus, x)) / (2 * h);
    const Matrix an = gram_grad(spec, x, which);
    CHECK((an - fd).norm() / std::max(1.0, fd.norm()) < 1e-6);
  }
  CHECK_THROWS_AS(gram_grad(spec, x, spec.param_count()), DataError);
}

TEST_CASE("noisy gram factors without jitter for sigma_n^2 >= 1e-6") {
  auto gen = ts::rng(36);
  for (int rep = 0; rep < 10; ++rep) {
    KernelSpec spec = random_spec(KernelFamily::kSE, 2, gen);
    spec.log_noise_variance = std::log(1e-6);
    const Matrix x = ts::random_matrix(20, 2, gen);
    const SpdFactor f = SpdFactor::compute(gram_noisy(spec, x));
    CHECK(f.jitter() == 0.0);
  }
}

TEST_CASE("kernel_eval is maximized exactly at coincident points") {
  auto gen = ts::rng(37);
  const KernelSpec spec = random_spec(KernelFamily::kSE, 2, gen);
  const Vector x = ts::random_vector(2, gen);
  CHECK(kernel_eval(spec, x, x) ==
        doctest::Approx(spec.signal_variance()).epsilon(1e-12));
  for (int rep = 0; rep < 50; ++rep) {
    const Vector other = ts::random_vector(2, gen);
    if ((other - x).norm() > 1e-12) {
      CHECK(kernel_eval(spec, x, other) < spec.signal_variance());
    }
  }
}
