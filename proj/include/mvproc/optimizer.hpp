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

#ifndef MVPROC_OPTIMIZER_HPP
#define MVPROC_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <limits>

#include "mvproc/linalg.hpp"

namespace mvproc {

/// Options shared by minimize() and multi_restart(). Initial points for the
/// restarts are drawn coordinate-wise from uniform(0,1) on the unconstrained
/// parameterization.
struct FitOptions {
  int restarts = 10;
  int max_iters = 200;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
  int workers = 1;
};

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;

struct MinimizeResult {
  Vector x;
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

/// Limited-memory quasi-Newton descent (memory 10) with a strong-Wolfe line
/// search. Terminates when the gradient norm drops to opts.grad_tol or after
/// opts.max_iters iterations. Accepted iterates are monotone non-increasing
/// in the objective; non-finite trial points are rejected by the line search.
/// Throws NumericError if the objective or gradient is non-finite at x0.
MinimizeResult minimize(const Objective& objective, const Gradient& gradient,
                        const Vector& x0, const FitOptions& opts);

/// One completed restart: final parameters and objective value.
struct RestartResult {
  Vector params;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct MultiRestartOutcome {
  RestartResult best;
  std::uint64_t best_seed = 0;
  bool any_converged = false;  // false means best came from unconverged runs
  int failed_runs = 0;         // runs that threw and were discarded
};

/// Runs fit_one for seeds opts.seed + 0 .. opts.seed + restarts - 1 and
/// selects the smallest objective value, preferring converged runs; exact
/// ties go to the lowest seed, so the outcome does not depend on completion
/// order. Runs execute concurrently when opts.workers > 1 (fit_one must be
/// pure per seed). Throws NumericError if every run throws.
MultiRestartOutcome multi_restart(
    const std::function<RestartResult(std::uint64_t)>& fit_one,
    const FitOptions& opts);

}  // namespace mvproc

#endif  // MVPROC_OPTIMIZER_HPP
