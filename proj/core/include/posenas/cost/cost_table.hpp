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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "posenas/supernet/op_spec.hpp"

namespace posenas {

enum class Benchmark { kFlops, kLatency };

std::string to_string(Benchmark b);
Benchmark parse_benchmark(const std::string& token);

class CostTableError : public std::runtime_error {
 public:
  CostTableError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Per-(layer, op) cost lookup. Entries and metadata keep insertion order so
/// text round trips are byte-exact.
///
/// File form:
///   costtable v1 <flops|latency> <unit>
///   # key=value
///   <layer> <op-id> <cost>
class CostTable {
 public:
  struct Entry {
    int layer = 0;
    std::string op;
    double cost = 0;

    bool operator==(const Entry&) const = default;
  };

  CostTable(Benchmark benchmark, std::string unit);

  Benchmark benchmark() const { return benchmark_; }
  const std::string& unit() const { return unit_; }

  /// Inserts or overwrites. Costs must be finite and >= 0.
  void set(int layer, const OpSpec& op, double cost);
  bool contains(int layer, const OpSpec& op) const;
  /// Throws std::out_of_range naming the layer and op when absent.
  double at(int layer, const OpSpec& op) const;
  const std::vector<Entry>& entries() const { return entries_; }

  void set_meta(const std::string& key, const std::string& value);
  /// Empty string when absent.
  std::string meta(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return meta_; }

  /// Constant cost of the non-searched blocks (stem, head); metadata key
  /// "fixed_cost", 0 when absent.
  double fixed_cost() const;
  void set_fixed_cost(double cost);

  /// Throws std::out_of_range for the first (layer, op) of `layers` missing.
  void check_covers(const std::vector<std::pair<int, std::vector<OpSpec>>>& layers) const;

  std::string serialize() const;
  static CostTable parse(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static CostTable load(const std::filesystem::path& path);

  bool operator==(const CostTable&) const = default;

 private:
  const Entry* find(int layer, const std::string& op) const;

  Benchmark benchmark_;
  std::string unit_;
  std::vector<Entry> entries_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
/// Strict: the whole token must be consumed.
double parse_double(const std::string& token);

}  // namespace posenas
