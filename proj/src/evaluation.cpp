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

#include "mvproc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mvproc/errors.hpp"
#include "mvproc/kernels.hpp"
#include "mvproc/matvar.hpp"

namespace mvproc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ColumnManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open manifest: " + path);
  }
  ColumnManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << path << ": line " << line_no << " is not 'key = value'";
      throw DataError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "inputs") {
      m.inputs = split_csv_list(value);
    } else if (key == "outputs") {
      m.outputs = split_csv_list(value);
    } else {
      throw DataError(path + ": unknown manifest key '" + key + "'");
    }
  }
  if (m.inputs.empty() || m.outputs.empty()) {
    throw DataError(path + ": manifest must name inputs and outputs");
  }
  return m;
}

Dataset dataset_from_table(const CsvTable& table, const ColumnManifest& m,
                           bool drop_missing) {
  std::vector<std::string> all = m.inputs;
  all.insert(all.end(), m.outputs.begin(), m.outputs.end());
  const Matrix joined = table.numeric_columns(all, drop_missing);

  Dataset ds;
  ds.input_names = m.inputs;
  ds.output_names = m.outputs;
  ds.x = joined.leftCols(static_cast<Index>(m.inputs.size()));
  ds.y = joined.rightCols(static_cast<Index>(m.outputs.size()));
  return ds;
}

std::pair<Matrix, NormalizationState> normalize(
    const Matrix& y, const std::vector<std::string>& names) {
  if (y.rows() < 2) {
    throw DataError("normalize: at least two rows required");
  }
  NormalizationState state;
  state.mu.resize(y.cols());
  state.sigma.resize(y.cols());
  Matrix out(y.rows(), y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    const double mu = y.col(j).mean();
    const double ss = (y.col(j).array() - mu).square().sum();
    const double sigma = std::sqrt(ss / static_cast<double>(y.rows() - 1));
    if (!(sigma > 0.0)) {
      std::ostringstream msg;
      msg << "normalize: column "
          << (j < static_cast<Index>(names.size())
                  ? "'" + names[static_cast<std::size_t>(j)] + "'"
                  : std::to_string(j))
          << " is constant";
      throw DataError(msg.str());
    }
    state.mu(j) = mu;
    state.sigma(j) = sigma;
    out.col(j) = (y.col(j).array() - mu) / sigma;
  }
  return {out, state};
}

Matrix denormalize(const Matrix& ynorm, const NormalizationState& state) {
  if (ynorm.cols() != state.mu.size()) {
    throw DataError("denormalize: column count does not match the state");
  }
  Matrix out(ynorm.rows(), ynorm.cols());
  for (Index j = 0; j < ynorm.cols(); ++j) {
    out.col(j) = ynorm.col(j).array() * state.sigma(j) + state.mu(j);
  }
  return out;
}

std::vector<FoldRange> kfold_blocks(Index n, Index k) {
  if (k < 1 || n < 1) {
    throw DataError("kfold_blocks: n and k must be positive");
  }
  if (n % k != 0) {
    std::ostringstream msg;
    msg << "kfold_blocks: k = " << k << " does not divide n = " << n;
    throw DataError(msg.str());
  }
  const Index len = n / k;
  std::vector<FoldRange> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    folds.push_back({i * len, (i + 1) * len});
  }
  return folds;
}

ColumnMetrics metrics(const Matrix& pred, const Matrix& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw DataError("metrics: prediction and truth shapes differ");
  }
  if (pred.rows() == 0) {
    throw DataError("metrics: empty input");
  }
  ColumnMetrics out;
  out.mse.resize(pred.cols());
  out.mae.resize(pred.cols());
  out.rmse.resize(pred.cols());
  for (Index j = 0; j < pred.cols(); ++j) {
    const Vector err = pred.col(j) - truth.col(j);
    out.mse(j) = err.squaredNorm() / static_cast<double>(err.size());
    out.mae(j) = err.cwiseAbs().mean();
    out.rmse(j) = std::sqrt(out.mse(j));
  }
  return out;
}

double armse(const std::vector<double>& per_repetition_rmse) {
  if (per_repetition_rmse.empty()) {
    throw DataError("armse: no repetitions");
  }
  double acc = 0.0;
  for (const double r : per_repetition_rmse) acc += r;
  return acc / static_cast<double>(per_repetition_rmse.size());
}

double median_lower(std::vector<double> values) {
  if (values.empty()) {
    throw DataError("median_lower: empty input");
  }
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

double mmo(const Vector& per_output_medians) {
  if (per_output_medians.size() == 0) {
    throw DataError("mmo: empty input");
  }
  return per_output_medians.maxCoeff();
}

NoiseFamily noise_family_from_string(const std::string& name) {
  if (name == "mgp") return NoiseFamily::kMGP;
  if (name == "mtp") return NoiseFamily::kMTP;
  throw ConfigError("unknown noise family '" + name + "' (expected mgp|mtp)");
}

std::string to_string(NoiseFamily family) {
  return family == NoiseFamily::kMGP ? "mgp" : "mtp";
}

SimulatedData simulate_dataset(NoiseFamily family, std::uint64_t seed) {
  const Index n = 100;
  SimulatedData sim;
  sim.full.x.resize(n, 1);
  sim.f_true.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double x = -10.0 + 20.0 * static_cast<double>(i) / 99.0;
    sim.full.x(i, 0) = x;
    sim.f_true(i, 0) = 2.0 * x * std::cos(x);
    sim.f_true(i, 1) = 1.5 * x * std::cos(x + M_PI / 5.0);
  }
  sim.full.input_names = {"x"};
  sim.full.output_names = {"y1", "y2"};

  // Noise process: SE kernel with log parameters [ln 1.001, ln 5] and a
  // fixed 2 x 2 output covariance with 0.25 cross-correlation.
  KernelSpec noise_kernel = KernelSpec::make(KernelFamily::kSE, 1);
  noise_kernel.log_lengthscales(0) = std::log(1.001);
  noise_kernel.log_signal_variance = std::log(5.0);
  Matrix omega(2, 2);
  omega << 1.0, 0.25, 0.25, 1.0;

  const MatrixNormalParams law{Matrix::Zero(n, 2),
                               gram(noise_kernel, sim.full.x, sim.full.x),
                               omega};
  const Matrix noise = family == NoiseFamily::kMGP
                           ? mn_sample(law, seed)
                           : mt_sample(MatrixTParams(law, 3.0), seed);
  sim.full.y = sim.f_true + noise;

  // Training subset: points 3r+1 (r = 1..12) and 3r+2 (r = 22..32) in
  // one-based numbering; 23 points with the middle band missing.
  for (Index r = 1; r <= 12; ++r) sim.train_idx.push_back(3 * r + 1 - 1);
  for (Index r = 22; r <= 32; ++r) sim.train_idx.push_back(3 * r + 2 - 1);
  return sim;
}

Matrix take_rows(const Matrix& m, const std::vector<Index>& idx) {
  Matrix out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.row(static_cast<Index>(i)) = m.row(idx[i]);
  }
  return out;
}

}  // namespace mvproc
