// Copyright 2026 The posenas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "posenas/cost/expected_cost.hpp"
#include "posenas/pose/train.hpp"
#include "posenas/search/search.hpp"
#include "posenas/supernet/supernet.hpp"

namespace posenas {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Flat "key = value" text. "[name]" starts a section; keys inside are
/// stored as "name.key". '#' and ';' start comment lines.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  /// Throws ConfigError when absent.
  const std::string& get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Everything a pipeline run needs; see docs/config.md for the keys.
struct PipelineConfig {
  // [data]
  int train_samples = 800;
  int test_samples = 200;
  int image_size = 64;
  int keypoints = 8;
  std::uint64_t data_seed = 1;
  double sigma = 2.0;
  // [supernet]
  SupernetConfig supernet;
  // [search]
  SearchSchedule schedule;
  double split_fraction = 0.8;
  // [regularizer]; tau <= 0 means "expected cost at uniform alpha"
  RegularizerConfig regularizer{0.1, 0.0};
  // [train]
  TrainOptions train;
  // [random_search]
  int random_samples = 8;
  int random_epochs = 2;
  // [eval]
  double pck_alpha = 0.2;

  /// Desk-scale defaults; unknown keys are rejected.
  static PipelineConfig from(const Config& cfg);
};

/// Builds a supernet config from the [supernet] section on top of a preset
/// ("desk" or "small").
SupernetConfig supernet_config_from(const Config& cfg, int keypoints);

}  // namespace posenas
