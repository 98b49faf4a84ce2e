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

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mvproc/errors.hpp"
#include "mvproc/matvar.hpp"
#include "mvproc/model.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mvproc;
namespace ts = testsupport;

namespace {

HyperParams random_params(KernelFamily family, Index p, Index d,
                          bool student_t, std::mt19937_64& gen) {
  HyperParams hp = HyperParams::make(family, p, d, student_t);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  Vector v(hp.param_count());
  for (Index i = 0; i < v.size(); ++i) v(i) = u(gen);
  hp.unpack(v);
  return hp;
}

void check_gradient(const std::function<double(const Vector&)>& f,
                    const Vector& analytic, const Vector& at,
                    double rel_tol = 1e-5) {
  const Vector fd = ts::fd_gradient(f, at, 1e-5);
  for (Index i = 0; i < at.size(); ++i) {
    const double tol =
        std::max(rel_tol * std::abs(fd(i)), 1e-7 * std::max(1.0, fd.norm()));
    CHECK(std::abs(analytic(i) - fd(i)) <= tol);
  }
}

}  // namespace

TEST_CASE("mvgp_nlml trivial values") {
  // K' = [1] via sf2 = sn2 = 0.5; Omega = [1]; Y = [0]  ->  1/2 log(2 pi).
  HyperParams hp = HyperParams::make(KernelFamily::kSE, 1, 1, false);
  hp.kernel.log_signal_variance = std::log(0.5);
  hp.kernel.log_noise_variance = std::log(0.5);
  const Matrix x = Matrix::Zero(1, 1);
  const Matrix y = Matrix::Zero(1, 1);
  CHECK(mvgp_nlml(hp, x, y) ==
        doctest::Approx(0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("mvgp_nlml at d=1 equals the scalar GPR oracle") {
  auto gen = ts::rng(61);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = ts::random_matrix(7, 2, gen);
    const Matrix y = ts::random_matrix(7, 1, gen);
    HyperParams hp = random_params(KernelFamily::kSEard, 2, 1, false, gen);
    hp.rowcov.varphi_diag(0) = 0.0;  // Omega = [1]

    oracles::ScalarGpParams sp;
    sp.log_ell = hp.kernel.log_lengthscales;
    sp.log_sf2 = hp.kernel.log_signal_variance;
    sp.log_sn2 = hp.kernel.log_noise_variance;
    CHECK(mvgp_nlml(hp, x, y) ==
          doctest::Approx(oracles::nlml(sp, x, y.col(0))).epsilon(1e-8));

    // Kernel block of the analytic gradient against the oracle.
    const Vector g = mvgp_nlml_grad(hp, x, y);
    const Vector og = oracles::nlml_grad(sp, x, y.col(0));
    for (Index i = 0; i < og.size(); ++i) {
      CHECK(g(i) == doctest::Approx(og(i)).epsilon(1e-4));
    }
  }
}

TEST_CASE("mvgp_nlml equals the Kronecker-vectorized Gaussian NLL") {
  auto gen = ts::rng(62);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = ts::random_matrix(5, 3, gen);
    const Matrix y = ts::random_matrix(5, 2, gen);
    const HyperParams hp = random_params(KernelFamily::kSE, 3, 2, false, gen);
    const Matrix kprime = gram_noisy(hp.kernel, x);
    const double oracle = -ts::dense_gaussian_logpdf(
        ts::vec_rows(y), Vector::Zero(10), ts::kron(kprime, hp.rowcov.omega()));
    CHECK(mvgp_nlml(hp, x, y) == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("mvgp gradient matches finite differences on random instances") {
  auto gen = ts::rng(63);
  for (int rep = 0; rep < 8; ++rep) {
    const Index p = 1 + rep % 3;
    const Index d = 1 + rep % 3;
    const Matrix x = ts::random_matrix(6, p, gen);
    const Matrix y = ts::random_matrix(6, d, gen);
    const KernelFamily family =
        rep % 2 == 0 ? KernelFamily::kSE : KernelFamily::kSEard;
    HyperParams hp = random_params(family, p, d, false, gen);
    auto f = [&](const Vector& v) {
      HyperParams q = hp;
      q.unpack(v);
      return mvgp_nlml(q, x, y);
    };
    check_gradient(f, mvgp_nlml_grad(hp, x, y), hp.pack());
  }
}

TEST_CASE("mvgp phi gradient at Y=0 carries only the log-det term") {
  auto gen = ts::rng(64);
  HyperParams hp = random_params(KernelFamily::kSE, 2, 3, false, gen);
  const Matrix x = ts::random_matrix(5, 2, gen);
  const Matrix y = Matrix::Zero(5, 3);
  const Vector g = mvgp_nlml_grad(hp, x, y);

  const Matrix phi = hp.rowcov.phi();
  const Matrix omega = hp.rowcov.omega();
  const Matrix omega_inv = omega.llt().solve(Matrix::Identity(3, 3));
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < i; ++j) {
      Matrix e = Matrix::Zero(3, 3);
      e(i, j) = 1.0;
      const Matrix domega = e * phi.transpose() + phi * e.transpose();
      const double expected = 0.5 * 5.0 * (omega_inv * domega).trace();
      CHECK(g(hp.phi_lower_offset() + RowCovParams::lower_index(i, j)) ==
            doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("mvtp_nlml equals the negated matrix-t log density") {
  auto gen = ts::rng(65);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix x = ts::random_matrix(5, 2, gen);
    const Matrix y = ts::random_matrix(5, 2, gen);
    const HyperParams hp = random_params(KernelFamily::kSE, 2, 2, true, gen);
    const MatrixNormalParams base{Matrix::Zero(5, 2),
                                  gram_noisy(hp.kernel, x),
                                  hp.rowcov.omega()};
    const double density = mt_log_pdf(y, MatrixTParams(base, hp.nu()));
    CHECK(mvtp_nlml(hp, x, y) == doctest::Approx(-density).epsilon(1e-8));
  }
}

TEST_CASE("mvtp_nlml scalar spot value at nu = 3") {
  // n = d = 1, K' = [1], Omega = [1], Y = [0], nu = 3  ->  log(pi / 2).
  HyperParams hp = HyperParams::make(KernelFamily::kSE, 1, 1, true);
  hp.kernel.log_signal_variance = std::log(0.5);
  hp.kernel.log_noise_variance = std::log(0.5);
  hp.log_nu_minus2 = 0.0;
  CHECK(mvtp_nlml(hp, Matrix::Zero(1, 1), Matrix::Zero(1, 1)) ==
        doctest::Approx(std::log(M_PI / 2.0)).epsilon(1e-12));
}

TEST_CASE("mvtp approaches mvgp as nu grows") {
  auto gen = ts::rng(66);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix x = ts::random_matrix(5, 2, gen);
    const Matrix y = ts::random_matrix(5, 2, gen);
    HyperParams tp = random_params(KernelFamily::kSE, 2, 2, true, gen);
    tp.log_nu_minus2 = std::log(1e6 - 2.0);
    HyperParams gp = tp;
    gp.log_nu_minus2.reset();

    CHECK(std::abs(mvtp_nlml(tp, x, y) - mvgp_nlml(gp, x, y)) < 1e-2);

    const Vector tg = mvtp_nlml_grad(tp, x, y);
    const Vector gg = mvgp_nlml_grad(gp, x, y);
    for (Index i = 0; i < gp.kernel.param_count(); ++i) {
      CHECK(std::abs(tg(i) - gg(i)) <=
            1e-2 * std::max(1.0, std::abs(gg(i))));
    }
  }
}

TEST_CASE("mvtp gradient matches finite differences including nu") {
  auto gen = ts::rng(67);
  for (int rep = 0; rep < 8; ++rep) {
    const Index p = 1 + rep % 2;
    const Index d = 1 + rep % 3;
    const Matrix x = ts::random_matrix(6, p, gen);
    const Matrix y = ts::random_matrix(6, d, gen);
    HyperParams hp = random_params(KernelFamily::kSEard, p, d, true, gen);
    auto f = [&](const Vector& v) {
      HyperParams q = hp;
      q.unpack(v);
      return mvtp_nlml(q, x, y);
    };
    check_gradient(f, mvtp_nlml_grad(hp, x, y), hp.pack());
  }
}

TEST_CASE("mvtp nu gradient closed form at Y=0, identity covariances") {
  // ln det terms cancel; the digamma difference plus the nd/(2(nu-2))
  // correction from the (nu-2)-scaled shape matrix remain.
  const Index n = 4, d = 2;
  HyperParams hp = HyperParams::make(KernelFamily::kSE, 1, d, true);
  hp.kernel.log_signal_variance = std::log(0.5);
  hp.kernel.log_noise_variance = std::log(0.5);
  hp.log_nu_minus2 = std::log(3.0);  // nu = 5
  Matrix x(n, 1);
  x << -3000.0, -1000.0, 1000.0, 3000.0;  // far apart: K' = I to fp precision
  const Matrix y = Matrix::Zero(n, d);

  const double nu = 5.0, tau = nu + n - 1.0;
  const double expected_dnu = 0.5 * multi_digamma(n, 0.5 * tau) -
                              0.5 * multi_digamma(n, 0.5 * (tau + d)) +
                              0.5 * n * d / (nu - 2.0);
  const Vector g = mvtp_nlml_grad(hp, x, y);
  CHECK(g(hp.nu_offset()) ==
        doctest::Approx(expected_dnu * (nu - 2.0)).epsilon(1e-9));
}

TEST_CASE("mvgp_fit recovers a usable model and is deterministic") {
  auto gen = ts::rng(68);
  // Simulate from a known MGP: smooth kernel plus correlated outputs.
  HyperParams truth = HyperParams::make(KernelFamily::kSE, 1, 2, false);
  truth.kernel.log_lengthscales(0) = std::log(1.2);
  truth.kernel.log_signal_variance = std::log(1.5);
  truth.kernel.log_noise_variance = std::log(0.05);
  truth.rowcov.phi_lower(0) = 0.4;

  Matrix x(12, 1);
  for (Index i = 0; i < 12; ++i) x(i, 0) = -3.0 + 0.55 * i;
  const MatrixNormalParams law{Matrix::Zero(12, 2),
                               gram_noisy(truth.kernel, x),
                               truth.rowcov.omega()};
  const Matrix y = mn_sample(law, 77);

  FitOptions opts;
  opts.restarts = 4;
  opts.max_iters = 120;
  opts.seed = 5;
  const TrainedModel m1 = mvgp_fit(x, y, truth.kernel, opts);
  const TrainedModel m2 = mvgp_fit(x, y, truth.kernel, opts);
  CHECK(m1.nlml_at_fit() == m2.nlml_at_fit());
  CHECK(m1.params().pack() == m2.params().pack());

  // Fitted optimum cannot be worse than the generating parameters
  // (after aligning the pinned phi_11 scale).
  HyperParams aligned = truth;
  const double c = std::exp(2.0 * truth.rowcov.varphi_diag(0));
  aligned.rowcov.varphi_diag.array() -= truth.rowcov.varphi_diag(0);
  aligned.rowcov.phi_lower /= std::exp(truth.rowcov.varphi_diag(0));
  aligned.kernel.log_signal_variance += std::log(c);
  aligned.kernel.log_noise_variance += std::log(c);
  CHECK(m1.nlml_at_fit() <= mvgp_nlml(aligned, x, y) + 1e-9);

  // Parallel restarts pick the same winner.
  FitOptions par = opts;
  par.workers = 2;
  const TrainedModel m3 = mvgp_fit(x, y, truth.kernel, par);
  CHECK(m3.nlml_at_fit() == m1.nlml_at_fit());
}

TEST_CASE("mvgp_fit at d=1 tracks a scalar GPR fit built on the oracle") {
  auto gen = ts::rng(69);
  const Matrix x = ts::random_matrix(10, 1, gen);
  Matrix y(10, 1);
  for (Index i = 0; i < 10; ++i) {
    y(i, 0) = std::sin(1.7 * x(i, 0)) + 0.1 * ts::random_vector(1, gen)(0);
  }

  FitOptions opts;
  opts.restarts = 3;
  opts.max_iters = 150;
  opts.seed = 11;
  const TrainedModel m = mvgp_fit(x, y, KernelSpec::make(KernelFamily::kSE, 1),
                                  opts);

  // Same multi-restart protocol run on the oracle NLML. The d=1 reduced
  // parameter vector is exactly [log_ell, log_sf2, log_sn2].
  auto fit_one = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x0(3);
    for (Index i = 0; i < 3; ++i) x0(i) = unit(rng);
    auto f = [&](const Vector& v) {
      oracles::ScalarGpParams sp;
      sp.log_ell = v.head(1);
      sp.log_sf2 = v(1);
      sp.log_sn2 = v(2);
      return oracles::nlml(sp, x, y.col(0));
    };
    auto g = [&](const Vector& v) {
      oracles::ScalarGpParams sp;
      sp.log_ell = v.head(1);
      sp.log_sf2 = v(1);
      sp.log_sn2 = v(2);
      return oracles::nlml_grad(sp, x, y.col(0));
    };
    const MinimizeResult r = minimize(f, g, x0, opts);
    RestartResult out;
    out.params = r.x;
    out.value = r.f;
    out.converged = r.converged;
    return out;
  };
  const MultiRestartOutcome oracle_fit = multi_restart(fit_one, opts);
  CHECK(std::abs(m.nlml_at_fit() - oracle_fit.best.value) < 1e-6);
}

TEST_CASE("mvgp_predict: interpolation, scalar columns, variance bounds") {
  auto gen = ts::rng(70);
  const Matrix x = ts::random_matrix(9, 2, gen);
  const Matrix y = ts::random_matrix(9, 2, gen);

  HyperParams hp = random_params(KernelFamily::kSE, 2, 2, false, gen);
  hp.kernel.log_noise_variance = std::log(1e-10);
  const TrainedModel interp =
      TrainedModel::create(ModelFamily::kGP, x, y, hp, 0.0);
  const Prediction at_train = mvgp_predict(interp, x);
  CHECK((at_train.mean - y).cwiseAbs().maxCoeff() < 1e-4);

  HyperParams hp2 = random_params(KernelFamily::kSE, 2, 2, false, gen);
  const TrainedModel model =
      TrainedModel::create(ModelFamily::kGP, x, y, hp2, 0.0);
  const Matrix xstar = ts::random_matrix(6, 2, gen);
  const Prediction pred = mvgp_predict(model, xstar);

  // Column j of the mean is the scalar GPR posterior mean on column j.
  oracles::ScalarGpParams sp;
  sp.log_ell = hp2.kernel.log_lengthscales;
  sp.log_sf2 = hp2.kernel.log_signal_variance;
  sp.log_sn2 = hp2.kernel.log_noise_variance;
  for (Index j = 0; j < 2; ++j) {
    const auto scalar = oracles::predict(sp, x, y.col(j), xstar);
    CHECK((pred.mean.col(j) - scalar.mean).cwiseAbs().maxCoeff() < 1e-8);
  }

  const double prior = hp2.kernel.signal_variance() +
                       hp2.kernel.noise_variance();
  for (Index i = 0; i < 6; ++i) {
    CHECK(pred.col_cov(i, i) >= -1e-12);
    CHECK(pred.col_cov(i, i) <= prior + 1e-12);
  }

  // The predictive mean carries no dependence on the output covariance.
  HyperParams hp3 = hp2;
  hp3.rowcov.phi_lower(0) += 1.3;
  hp3.rowcov.varphi_diag(1) -= 0.7;
  const TrainedModel model3 =
      TrainedModel::create(ModelFamily::kGP, x, y, hp3, 0.0);
  CHECK((mvgp_predict(model3, xstar).mean - pred.mean).norm() < 1e-12);
}

TEST_CASE("mvtp_predict structure") {
  auto gen = ts::rng(71);
  const Matrix x = ts::random_matrix(8, 2, gen);
  const Matrix y = ts::random_matrix(8, 2, gen);
  HyperParams tp = random_params(KernelFamily::kSE, 2, 2, true, gen);
  HyperParams gp = tp;
  gp.log_nu_minus2.reset();

  const TrainedModel mt = TrainedModel::create(ModelFamily::kTP, x, y, tp, 0.0);
  const TrainedModel mg = TrainedModel::create(ModelFamily::kGP, x, y, gp, 0.0);
  const Matrix xstar = ts::random_matrix(5, 2, gen);
  const Prediction pt = mvtp_predict(mt, xstar);
  const Prediction pg = mvgp_predict(mg, xstar);

  CHECK(*pt.df == tp.nu() + 8.0);  // exact
  CHECK((pt.mean - pg.mean).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((pt.col_cov - pg.col_cov).norm() < 1e-12);

  // Omega-hat minus Omega is the PSD Gram form Y^T K'^-1 Y.
  const Matrix inflation = pt.row_cov - tp.rowcov.omega();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(inflation);
  CHECK(eig.eigenvalues().minCoeff() > -1e-12);

  // Pointwise variances pick up the 1/(df - 2) scale.
  const Matrix var = pt.pointwise_var();
  CHECK(var(0, 0) == doctest::Approx(pt.col_cov(0, 0) * pt.row_cov(0, 0) /
                                     (*pt.df - 2.0)));
}

TEST_CASE("fit input validation") {
  const Matrix x = Matrix::Zero(1, 1);
  const Matrix y = Matrix::Zero(1, 1);
  FitOptions opts;
  CHECK_THROWS_AS(mvgp_fit(x, y, KernelSpec::make(KernelFamily::kSE, 1), opts),
                  DataError);
  Matrix bad = Matrix::Zero(3, 1);
  bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(
      mvgp_fit(Matrix::Zero(3, 1), bad, KernelSpec::make(KernelFamily::kSE, 1),
               opts),
      DataError);
  CHECK_THROWS_AS(
      mvtp_predict(TrainedModel::create(
                       ModelFamily::kGP, Matrix::Zero(2, 1), Matrix::Zero(2, 1),
                       HyperParams::make(KernelFamily::kSE, 1, 1, false), 0.0),
                   Matrix::Zero(1, 1)),
      ConfigError);
}
