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

#include "mvproc/backtest.hpp"

#include <cmath>
#include <sstream>

#include "mvproc/errors.hpp"

namespace mvproc {

Vector PriceSeries::adj_open() const {
  return open.cwiseProduct(adj_close.cwiseQuotient(close));
}

void PriceSeries::validate() const {
  const Index n = size();
  if (open.size() != n || close.size() != n || adj_close.size() != n) {
    throw DataError(name + ": date/price column lengths differ");
  }
  if (n == 0) {
    throw DataError(name + ": empty price series");
  }
  for (Index i = 0; i < n; ++i) {
    if (!(open(i) > 0.0) || !(close(i) > 0.0) || !(adj_close(i) > 0.0)) {
      std::ostringstream msg;
      msg << name << ": non-positive price on " << dates[i];
      throw DataError(msg.str());
    }
    if (i > 0 && dates[i] <= dates[i - 1]) {
      std::ostringstream msg;
      msg << name << ": dates not strictly increasing at " << dates[i];
      throw DataError(msg.str());
    }
  }
}

PriceSeries price_series_from_csv(const CsvTable& table,
                                  const std::string& name) {
  PriceSeries s;
  s.name = name;
  const Index date_col = table.column_index("date");
  const Matrix prices =
      table.numeric_columns({"open", "close", "adj_close"}, false);
  s.open = prices.col(0);
  s.close = prices.col(1);
  s.adj_close = prices.col(2);
  s.dates.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    s.dates.push_back(row[static_cast<std::size_t>(date_col)]);
  }
  s.validate();
  return s;
}

Vector log_returns(const PriceSeries& s) {
  s.validate();
  if (s.size() < 2) {
    throw DataError(s.name + ": need at least two days for log returns");
  }
  Vector lr(s.size() - 1);
  for (Index i = 1; i < s.size(); ++i) {
    lr(i - 1) = std::log(s.adj_close(i) / s.adj_close(i - 1));
  }
  return lr;
}

Vector interday_log_returns(const PriceSeries& s) {
  s.validate();
  Vector ilr(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    ilr(i) = std::log(s.close(i) / s.open(i));
  }
  return ilr;
}

Vector bs_signal(const Vector& lr_hat, const Vector& lr, const Vector& ilr) {
  if (lr_hat.size() != lr.size() || lr.size() != ilr.size()) {
    throw DataError("bs_signal: input lengths differ");
  }
  return lr_hat - lr + ilr;
}

std::string to_string(Action a) {
  switch (a) {
    case Action::kBuy:
      return "Buy";
    case Action::kSell:
      return "Sell";
    default:
      return "Keep";
  }
}

StrategyLedger run_strategy(const Vector& lr_hat, const Vector& bs,
                            const PriceSeries& series, double fee_rate,
                            double initial) {
  const Index days = lr_hat.size();
  if (bs.size() != days) {
    throw DataError("run_strategy: signal lengths differ");
  }
  if (series.size() != days + 1) {
    std::ostringstream msg;
    msg << "run_strategy: series '" << series.name << "' has " << series.size()
        << " days, expected " << (days + 1) << " (anchor day + signals)";
    throw DataError(msg.str());
  }
  if (!(initial > 0.0)) {
    throw DataError("run_strategy: initial investment must be positive");
  }
  series.validate();

  const Vector aop = series.adj_open();
  StrategyLedger ledger;
  ledger.initial = initial;
  ledger.days.reserve(static_cast<std::size_t>(days));

  bool in_shares = false;
  double value = initial;
  for (Index i = 0; i < days; ++i) {
    const Index day = i + 1;  // row in `series`; row 0 is the anchor day
    LedgerEntry entry;
    if (lr_hat(i) > 0.0 && bs(i) > 0.0 && !in_shares) {
      // Convert cash to shares at the adjusted open, then mark to close.
      entry.action = Action::kBuy;
      entry.fee_paid = value * fee_rate;
      value *= (1.0 - fee_rate) * series.adj_close(day) / aop(day);
      in_shares = true;
    } else if (lr_hat(i) < 0.0 && bs(i) < 0.0 && in_shares) {
      // Shares ride from the previous close to today's open, then cash out.
      entry.action = Action::kSell;
      value *= aop(day) / series.adj_close(day - 1);
      entry.fee_paid = value * fee_rate;
      value *= 1.0 - fee_rate;
      in_shares = false;
    } else {
      entry.action = Action::kKeep;
      if (in_shares) {
        value *= series.adj_close(day) / series.adj_close(day - 1);
      }
    }
    entry.in_shares = in_shares;
    entry.value = value;
    ledger.days.push_back(entry);
  }
  return ledger;
}

Vector buy_and_hold(const PriceSeries& series, double initial) {
  if (series.size() < 2) {
    throw DataError("buy_and_hold: need an anchor day plus forecast days");
  }
  Vector out(series.size() - 1);
  for (Index i = 1; i < series.size(); ++i) {
    out(i - 1) = initial * series.adj_close(i) / series.adj_close(0);
  }
  return out;
}

BacktestModel backtest_model_from_string(const std::string& name) {
  if (name == "gp") return BacktestModel::kGP;
  if (name == "tp") return BacktestModel::kTP;
  if (name == "mvgp") return BacktestModel::kMVGP;
  if (name == "mvtp") return BacktestModel::kMVTP;
  throw ConfigError("unknown model '" + name +
                    "' (expected gp|tp|mvgp|mvtp)");
}

std::string to_string(BacktestModel m) {
  switch (m) {
    case BacktestModel::kGP:
      return "gp";
    case BacktestModel::kTP:
      return "tp";
    case BacktestModel::kMVGP:
      return "mvgp";
    default:
      return "mvtp";
  }
}

namespace {

PriceSeries slice(const PriceSeries& s, Index begin, Index count) {
  PriceSeries out;
  out.name = s.name;
  out.dates.assign(s.dates.begin() + begin, s.dates.begin() + begin + count);
  out.open = s.open.segment(begin, count);
  out.close = s.close.segment(begin, count);
  out.adj_close = s.adj_close.segment(begin, count);
  return out;
}

}  // namespace

BacktestResult sliding_window_backtest(const std::vector<PriceSeries>& stocks,
                                       const std::vector<PriceSeries>& indices,
                                       const WindowPlan& plan,
                                       BacktestModel model, double fee_rate,
                                       const FitOptions& opts) {
  if (stocks.empty()) {
    throw DataError("backtest: no stock series given");
  }
  if (indices.size() != 3) {
    throw DataError("backtest: exactly three index series are required");
  }
  const Index need = plan.train_len + plan.forecast_days() + 1;
  const Index n_days = stocks.front().size();
  for (const auto& s : stocks) {
    s.validate();
    if (s.size() != n_days) {
      throw DataError("backtest: series '" + s.name +
                      "' length differs from the first stock");
    }
  }
  for (const auto& s : indices) {
    s.validate();
    if (s.size() != n_days) {
      throw DataError("backtest: index '" + s.name +
                      "' length differs from the stocks");
    }
    for (Index i = 0; i < n_days; ++i) {
      if (s.dates[i] != stocks.front().dates[i]) {
        throw DataError("backtest: '" + s.name +
                        "' dates do not align with '" + stocks.front().name +
                        "' at " + s.dates[i]);
      }
    }
  }
  if (n_days < need) {
    std::ostringstream msg;
    msg << "backtest: " << n_days << " days available but "
        << plan.train_len << " + " << plan.forecast_days()
        << " + 1 = " << need << " are required";
    throw DataError(msg.str());
  }

  const Index n_stocks = static_cast<Index>(stocks.size());
  const Index t_days = plan.forecast_days();

  // Log-return design: row t pairs the index returns and stock returns of
  // price day t+1.
  Matrix x_all(n_days - 1, 3);
  for (Index j = 0; j < 3; ++j) x_all.col(j) = log_returns(indices[j]);
  Matrix y_all(n_days - 1, n_stocks);
  for (Index j = 0; j < n_stocks; ++j) y_all.col(j) = log_returns(stocks[j]);

  const bool joint =
      model == BacktestModel::kMVGP || model == BacktestModel::kMVTP;
  const ModelFamily family =
      (model == BacktestModel::kGP || model == BacktestModel::kMVGP)
          ? ModelFamily::kGP
          : ModelFamily::kTP;
  const KernelSpec spec = KernelSpec::make(KernelFamily::kSEard, 3);

  BacktestResult result;
  for (const auto& s : stocks) result.stock_names.push_back(s.name);
  for (const auto& s : indices) result.index_names.push_back(s.name);
  result.lr_hat.resize(t_days, n_stocks);

  for (Index w = 0; w < plan.n_windows; ++w) {
    const Index train_begin = w * plan.horizon;
    const Index test_begin = train_begin + plan.train_len;
    const Matrix x_train = x_all.middleRows(train_begin, plan.train_len);
    const Matrix x_test = x_all.middleRows(test_begin, plan.horizon);

    FitOptions wopts = opts;
    wopts.seed = opts.seed + static_cast<std::uint64_t>(w + 1) * 7919;

    try {
      if (joint) {
        const Matrix y_train = y_all.middleRows(train_begin, plan.train_len);
        const TrainedModel m = fit_model(family, x_train, y_train, spec, wopts);
        result.lr_hat.middleRows(w * plan.horizon, plan.horizon) =
            predict_model(m, x_test).mean;
      } else {
        for (Index j = 0; j < n_stocks; ++j) {
          const Matrix y_train =
              y_all.block(train_begin, j, plan.train_len, 1);
          FitOptions sopts = wopts;
          sopts.seed = wopts.seed + static_cast<std::uint64_t>(j) * 104729;
          const TrainedModel m =
              fit_model(family, x_train, y_train, spec, sopts);
          result.lr_hat.block(w * plan.horizon, j, plan.horizon, 1) =
              predict_model(m, x_test).mean;
        }
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "backtest: fit failed in window " << (w + 1) << " of "
          << plan.n_windows << ": " << e.what();
      throw NumericError(msg.str());
    }
  }

  // Forecast-day slices: price rows train_len .. train_len + t_days, the
  // first being the anchor day the ledgers start from.
  result.lr_true = y_all.middleRows(plan.train_len, t_days);
  result.bs.resize(t_days, n_stocks);
  result.buyhold_stocks.resize(t_days, n_stocks);
  result.buyhold_indices.resize(t_days, 3);
  result.forecast_dates.assign(
      stocks.front().dates.begin() + plan.train_len + 1,
      stocks.front().dates.begin() + plan.train_len + 1 + t_days);

  for (Index j = 0; j < n_stocks; ++j) {
    const PriceSeries window_prices =
        slice(stocks[j], plan.train_len, t_days + 1);
    const Vector ilr = interday_log_returns(window_prices).tail(t_days);
    result.bs.col(j) =
        bs_signal(result.lr_hat.col(j), result.lr_true.col(j), ilr);
    result.ledgers.push_back(run_strategy(result.lr_hat.col(j),
                                          result.bs.col(j), window_prices,
                                          fee_rate, 100.0));
    result.buyhold_stocks.col(j) = buy_and_hold(window_prices, 100.0);
  }
  for (Index j = 0; j < 3; ++j) {
    result.buyhold_indices.col(j) =
        buy_and_hold(slice(indices[j], plan.train_len, t_days + 1), 100.0);
  }
  return result;
}

}  // namespace mvproc
