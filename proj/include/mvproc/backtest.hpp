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

#ifndef MVPROC_BACKTEST_HPP
#define MVPROC_BACKTEST_HPP

#include <string>
#include <vector>

#include "mvproc/csv.hpp"
#include "mvproc/model.hpp"

namespace mvproc {

/// Daily price history: ISO dates, opening, closing, and adjusted closing
/// prices. The adjusted opening price is reconstructed as
/// open * adj_close / close.
struct PriceSeries {
  std::string name;
  std::vector<std::string> dates;
  Vector open;
  Vector close;
  Vector adj_close;

  Index size() const { return static_cast<Index>(dates.size()); }
  Vector adj_open() const;

  /// Strictly increasing dates, positive prices, consistent lengths.
  void validate() const;
};

/// Reads the `date,open,close,adj_close` schema.
PriceSeries price_series_from_csv(const CsvTable& table,
                                  const std::string& name);

/// ln(ACP_i / ACP_{i-1}) for i = 1..n-1 (length n-1).
Vector log_returns(const PriceSeries& s);

/// ln(CP_i / OP_i) per day (length n).
Vector interday_log_returns(const PriceSeries& s);

/// Elementwise predicted-minus-realized log return plus the intraday
/// return; algebraically ln(predicted close / adjusted open).
Vector bs_signal(const Vector& lr_hat, const Vector& lr, const Vector& ilr);

enum class Action { kBuy, kSell, kKeep };
std::string to_string(Action a);

struct LedgerEntry {
  Action action = Action::kKeep;
  bool in_shares = false;  // position after the day's action
  double value = 0.0;      // dollars, marked at the adjusted close
  double fee_paid = 0.0;
};

struct StrategyLedger {
  double initial = 0.0;
  std::vector<LedgerEntry> days;

  double final_value() const {
    return days.empty() ? initial : days.back().value;
  }
};

/// Signal-driven cash/shares state machine over the prediction days.
///
/// `series` must hold one leading anchor day followed by the prediction
/// days (size = signals + 1). Day i buys when lr_hat > 0 and bs > 0 from a
/// cash position (conversion at the adjusted open, fee applied), sells when
/// lr_hat < 0 and bs < 0 from a shares position (same convention), and
/// otherwise keeps. While in shares the value tracks the adjusted close.
StrategyLedger run_strategy(const Vector& lr_hat, const Vector& bs,
                            const PriceSeries& series, double fee_rate,
                            double initial);

/// Passive baseline: initial * ACP_i / ACP_0 over the prediction days.
Vector buy_and_hold(const PriceSeries& series, double initial);

struct WindowPlan {
  Index train_len = 303;
  Index horizon = 10;
  Index n_windows = 20;

  Index forecast_days() const { return horizon * n_windows; }
};

enum class BacktestModel { kGP, kTP, kMVGP, kMVTP };
BacktestModel backtest_model_from_string(const std::string& name);
std::string to_string(BacktestModel m);

struct BacktestResult {
  std::vector<std::string> stock_names;
  std::vector<std::string> index_names;
  std::vector<std::string> forecast_dates;  // one per prediction day
  Matrix lr_hat;                            // days x stocks
  Matrix lr_true;                           // days x stocks
  Matrix bs;                                // days x stocks
  std::vector<StrategyLedger> ledgers;      // per stock
  Matrix buyhold_stocks;                    // days x stocks
  Matrix buyhold_indices;                   // days x indices
};

/// Sliding-window forecasting driver: fits on train_len days of log
/// returns, predicts the next horizon days, then slides forward, n_windows
/// times. Inputs are the index log returns; targets are the stock log
/// returns, fitted jointly for the multivariate families and per stock for
/// gp/tp. Restart seeds are derived per window, so a fixed seed reproduces
/// the run exactly.
BacktestResult sliding_window_backtest(const std::vector<PriceSeries>& stocks,
                                       const std::vector<PriceSeries>& indices,
                                       const WindowPlan& plan,
                                       BacktestModel model, double fee_rate,
                                       const FitOptions& opts);

}  // namespace mvproc

#endif  // MVPROC_BACKTEST_HPP
