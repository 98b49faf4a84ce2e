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

#include "mvproc/optimizer.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mvproc/errors.hpp"

namespace mvproc {

namespace {

constexpr double kWolfeC1 = 1e-4;
constexpr double kWolfeC2 = 0.9;
constexpr int kMemory = 10;

struct Probe {
  double step = 0.0;
  double f = std::numeric_limits<double>::infinity();
  Vector g;
  double slope = 0.0;  // g . direction
  bool usable = false;
};

class LineFunction {
 public:
  LineFunction(const Objective& objective, const Gradient& gradient,
               const Vector& x, const Vector& dir)
      : objective_(objective), gradient_(gradient), x_(x), dir_(dir) {}

  // Exceptions and non-finite values mark the probe unusable; the search
  // treats such steps as overshoots and backtracks.
  Probe at(double step) const {
    Probe p;
    p.step = step;
    const Vector trial = x_ + step * dir_;
    try {
      p.f = objective_(trial);
      if (!std::isfinite(p.f)) return p;
      p.g = gradient_(trial);
      if (!p.g.allFinite()) return p;
    } catch (const std::exception&) {
      return p;
    }
    p.slope = p.g.dot(dir_);
    p.usable = true;
    return p;
  }

 private:
  const Objective& objective_;
  const Gradient& gradient_;
  const Vector& x_;
  const Vector& dir_;
};

bool wolfe_ok(const Probe& p, double f0, double slope0) {
  return p.usable && p.f <= f0 + kWolfeC1 * p.step * slope0 &&
         std::abs(p.slope) <= -kWolfeC2 * slope0;
}

// Zoom stage of the strong-Wolfe search (bisection with an Armijo-best
// fallback so the accepted step never increases the objective).
std::optional<Probe> zoom(const LineFunction& line, double f0, double slope0,
                          double a_lo, double f_lo, double slope_lo,
                          double a_hi) {
  std::optional<Probe> armijo_best;
  for (int i = 0; i < 40; ++i) {
    const double a = 0.5 * (a_lo + a_hi);
    Probe p = line.at(a);
    const bool armijo = p.usable && p.f <= f0 + kWolfeC1 * a * slope0;
    if (!armijo || p.f >= f_lo) {
      a_hi = a;
    } else {
      if (std::abs(p.slope) <= -kWolfeC2 * slope0) return p;
      if (!armijo_best || p.f < armijo_best->f) armijo_best = p;
      if (p.slope * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
      a_lo = a;
      f_lo = p.f;
      slope_lo = p.slope;
    }
    if (std::abs(a_hi - a_lo) < 1e-14 * std::max(1.0, std::abs(a_lo))) break;
  }
  if (armijo_best) return armijo_best;
  // The lo endpoint satisfied Armijo when it came from the bracket phase.
  if (a_lo > 0.0 && f_lo <= f0 + kWolfeC1 * a_lo * slope0) {
    Probe p = line.at(a_lo);
    if (p.usable) return p;
  }
  return std::nullopt;
}

std::optional<Probe> wolfe_search(const LineFunction& line, double f0,
                                  double slope0, double first_step) {
  double a_prev = 0.0;
  double f_prev = f0;
  double slope_prev = slope0;
  double a = first_step;
  for (int i = 0; i < 30; ++i) {
    Probe p = line.at(a);
    const bool armijo = p.usable && p.f <= f0 + kWolfeC1 * a * slope0;
    if (!armijo || (i > 0 && p.f >= f_prev)) {
      return zoom(line, f0, slope0, a_prev, f_prev, slope_prev, a);
    }
    if (std::abs(p.slope) <= -kWolfeC2 * slope0) return p;
    if (p.slope >= 0.0) {
      return zoom(line, f0, slope0, a, p.f, p.slope, a_prev);
    }
    a_prev = a;
    f_prev = p.f;
    slope_prev = p.slope;
    a *= 2.0;
    if (a > 1e10) break;
  }
  return std::nullopt;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, const Gradient& gradient,
                        const Vector& x0, const FitOptions& opts) {
  Vector x = x0;
  double f;
  Vector g;
  try {
    f = objective(x);
    g = gradient(x);
  } catch (const std::exception& e) {
    throw NumericError(std::string("minimize: objective failed at x0: ") +
                       e.what());
  }
  if (!std::isfinite(f) || !g.allFinite()) {
    throw NumericError("minimize: objective or gradient non-finite at x0");
  }

  MinimizeResult res;
  res.x = x;
  res.f = f;
  if (g.norm() <= opts.grad_tol) {
    res.converged = true;
    return res;
  }

  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    // Two-loop recursion for the quasi-Newton direction.
    Vector q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Vector dir = -q;
    double slope = dir.dot(g);
    if (!(slope < 0.0) || !dir.allFinite()) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g;
      slope = -g.squaredNorm();
    }

    const double first_step =
        (iter == 0 && s_hist.empty())
            ? std::min(1.0, 1.0 / std::max(1e-12, g.cwiseAbs().sum()))
            : 1.0;
    LineFunction line(objective, gradient, x, dir);
    const auto accepted = wolfe_search(line, f, slope, first_step);
    if (!accepted) {
      // No acceptable step along this direction; stop at the current point.
      break;
    }

    const Vector x_new = x + accepted->step * dir;
    const Vector s = x_new - x;
    const Vector y = accepted->g - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    x = x_new;
    f = accepted->f;
    g = accepted->g;
    res.x = x;
    res.f = f;
    res.iterations = iter + 1;
    if (g.norm() <= opts.grad_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

MultiRestartOutcome multi_restart(
    const std::function<RestartResult(std::uint64_t)>& fit_one,
    const FitOptions& opts) {
  if (opts.restarts < 1) {
    throw ConfigError("multi_restart: restarts must be >= 1");
  }
  const int runs = opts.restarts;
  std::vector<std::optional<RestartResult>> results(runs);
  std::vector<std::string> failures(runs);

  auto run_one = [&](int i) {
    try {
      results[i] = fit_one(opts.seed + static_cast<std::uint64_t>(i));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  };

  const int workers = std::min(std::max(1, opts.workers), runs);
  if (workers == 1) {
    for (int i = 0; i < runs; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // Selection in seed order: converged runs beat unconverged ones, then the
  // value decides, and a strict comparison keeps the lowest seed on ties.
  MultiRestartOutcome out;
  bool found = false;
  for (int i = 0; i < runs; ++i) {
    if (!results[i]) {
      ++out.failed_runs;
      continue;
    }
    const RestartResult& cand = *results[i];
    const bool better =
        !found ||
        (cand.converged && !out.best.converged) ||
        (cand.converged == out.best.converged && cand.value < out.best.value);
    if (better) {
      out.best = cand;
      out.best_seed = opts.seed + static_cast<std::uint64_t>(i);
      found = true;
    }
  }
  if (!found) {
    std::string detail;
    for (int i = 0; i < runs; ++i) {
      if (!failures[i].empty()) {
        detail = failures[i];
        break;
      }
    }
    throw NumericError("multi_restart: every restart failed (" + detail + ")");
  }
  out.any_converged = out.best.converged;
  return out;
}

}  // namespace mvproc
