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

#ifndef MVPROC_EXPERIMENTS_HPP
#define MVPROC_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mvproc {

const char* version();

/// Flat `key = value` settings. Later occurrences of a key override earlier
/// ones, which is how command-line flags override a config file: the file
/// text comes first, flag-derived lines are appended. Unknown keys are
/// rejected by each command against its documented key set.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::string& fallback) const;

  /// Throws ConfigError listing any key outside `allowed`.
  void check_keys(const std::vector<std::string>& allowed) const;

  /// Sorted `key = value` text; basis of the report header hash.
  std::string canonical() const;
  std::uint64_t hash() const;

 private:
  std::map<std::string, std::string> kv_;
};

/// Batch commands behind the CLI subcommands of the same name. Each parses
/// its settings, runs the experiment, and writes reports into the `out`
/// directory. Errors surface as ConfigError / DataError / NumericError.
void cmd_simulate(const ExperimentConfig& config);
void cmd_fit(const ExperimentConfig& config);
void cmd_predict(const ExperimentConfig& config);
void cmd_crossval(const ExperimentConfig& config);
void cmd_backtest(const ExperimentConfig& config);

/// Dispatch by subcommand name.
void run_command(const std::string& command, const ExperimentConfig& config);

}  // namespace mvproc

#endif  // MVPROC_EXPERIMENTS_HPP
