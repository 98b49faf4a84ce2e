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

#ifndef MVPROC_EVALUATION_HPP
#define MVPROC_EVALUATION_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvproc/csv.hpp"
#include "mvproc/linalg.hpp"

namespace mvproc {

struct Dataset {
  Matrix x;  // n x p
  Matrix y;  // n x d
  std::vector<std::string> input_names;
  std::vector<std::string> output_names;
};

/// Named column selection applied to a user-supplied CSV: which columns are
/// inputs and which are outputs.
struct ColumnManifest {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

ColumnManifest read_manifest(const std::string& path);
Dataset dataset_from_table(const CsvTable& table, const ColumnManifest& m,
                           bool drop_missing);

/// Per-column standardization state (sample mean, n-1 standard deviation).
struct NormalizationState {
  Vector mu;
  Vector sigma;
};

/// Column-wise (y - mu) / sigma. Throws DataError naming the first constant
/// column encountered.
std::pair<Matrix, NormalizationState> normalize(
    const Matrix& y, const std::vector<std::string>& names = {});
Matrix denormalize(const Matrix& ynorm, const NormalizationState& state);

/// k equal contiguous blocks covering 0..n-1 in order; requires k | n.
struct FoldRange {
  Index begin;
  Index end;  // half-open
};
std::vector<FoldRange> kfold_blocks(Index n, Index k);

/// Per-output error summary between a prediction and the truth.
struct ColumnMetrics {
  Vector mse;
  Vector mae;
  Vector rmse;
};
ColumnMetrics metrics(const Matrix& pred, const Matrix& truth);

/// Mean over repetitions of each repetition's RMSE (RMSE first, then the
/// average; the order matters).
double armse(const std::vector<double>& per_repetition_rmse);

/// Lower median: for an even count the smaller of the two middle values.
double median_lower(std::vector<double> values);

/// Max over outputs of the median-across-folds error.
double mmo(const Vector& per_output_medians);

/// Synthetic two-output study data: 100 covariates equally spaced in
/// [-10, 10], targets 2x cos(x) and 1.5x cos(x + pi/5) plus one draw of
/// matrix-variate process noise, and the fixed 23-point training subset
/// (every third point in two bands, one gap left uncovered).
enum class NoiseFamily { kMGP, kMTP };
NoiseFamily noise_family_from_string(const std::string& name);
std::string to_string(NoiseFamily family);

struct SimulatedData {
  Dataset full;                   // all 100 points, noisy targets
  Matrix f_true;                  // noise-free targets, 100 x 2
  std::vector<Index> train_idx;   // 23 zero-based training indices
};
SimulatedData simulate_dataset(NoiseFamily family, std::uint64_t seed);

/// Rows of a matrix selected by index list.
Matrix take_rows(const Matrix& m, const std::vector<Index>& idx);

}  // namespace mvproc

#endif  // MVPROC_EVALUATION_HPP
