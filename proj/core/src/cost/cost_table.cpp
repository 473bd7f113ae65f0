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

#include "posenas/cost/cost_table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace posenas {

std::string to_string(Benchmark b) { return b == Benchmark::kFlops ? "flops" : "latency"; }

Benchmark parse_benchmark(const std::string& token) {
  if (token == "flops") return Benchmark::kFlops;
  if (token == "latency") return Benchmark::kLatency;
  throw std::invalid_argument("unknown benchmark '" + token + "' (expected flops or latency)");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return {buf, ptr};
}

double parse_double(const std::string& token) {
  double v = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || token.empty()) throw std::invalid_argument("bad number '" + token + "'");
  return v;
}

CostTable::CostTable(Benchmark benchmark, std::string unit) : benchmark_(benchmark), unit_(std::move(unit)) {
  if (unit_.empty() || unit_.find_first_of(" \t\n") != std::string::npos) {
    throw std::invalid_argument("cost table unit must be a single token");
  }
}

const CostTable::Entry* CostTable::find(int layer, const std::string& op) const {
  for (const auto& e : entries_) {
    if (e.layer == layer && e.op == op) return &e;
  }
  return nullptr;
}

void CostTable::set(int layer, const OpSpec& op, double cost) {
  if (layer < 0) throw std::invalid_argument("cost table: negative layer index");
  if (!std::isfinite(cost) || cost < 0) {
    throw std::invalid_argument("cost table: cost of (" + std::to_string(layer) + ", " + op.id() + ") must be finite and >= 0");
  }
  const std::string id = op.id();
  for (auto& e : entries_) {
    if (e.layer == layer && e.op == id) {
      e.cost = cost;
      return;
    }
  }
  entries_.push_back({layer, id, cost});
}

bool CostTable::contains(int layer, const OpSpec& op) const { return find(layer, op.id()) != nullptr; }

double CostTable::at(int layer, const OpSpec& op) const {
  const auto* e = find(layer, op.id());
  if (e == nullptr) {
    throw std::out_of_range("cost table has no entry for layer " + std::to_string(layer) + ", op " + op.id());
  }
  return e->cost;
}

void CostTable::set_meta(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of("= \t\n") != std::string::npos) {
    throw std::invalid_argument("cost table: bad metadata key '" + key + "'");
  }
  if (value.find('\n') != std::string::npos) throw std::invalid_argument("cost table: metadata value contains a newline");
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  meta_.emplace_back(key, value);
}

std::string CostTable::meta(const std::string& key) const {
  for (const auto& [k, v] : meta_) {
    if (k == key) return v;
  }
  return {};
}

double CostTable::fixed_cost() const {
  const auto v = meta("fixed_cost");
  return v.empty() ? 0.0 : parse_double(v);
}

void CostTable::set_fixed_cost(double cost) {
  if (!std::isfinite(cost) || cost < 0) throw std::invalid_argument("cost table: fixed cost must be finite and >= 0");
  set_meta("fixed_cost", format_double(cost));
}

void CostTable::check_covers(const std::vector<std::pair<int, std::vector<OpSpec>>>& layers) const {
  for (const auto& [layer, ops] : layers) {
    for (const auto& op : ops) at(layer, op);
  }
}

std::string CostTable::serialize() const {
  std::string out = "costtable v1 " + to_string(benchmark_) + " " + unit_ + "\n";
  for (const auto& [k, v] : meta_) out += "# " + k + "=" + v + "\n";
  for (const auto& e : entries_) {
    out += std::to_string(e.layer) + " " + e.op + " " + format_double(e.cost) + "\n";
  }
  return out;
}

CostTable CostTable::parse(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::optional<CostTable> table;
  while (std::getline(in, raw)) {
    ++line;
    if (!table) {
      std::istringstream hs(raw);
      std::string magic, version, bench, unit, extra;
      hs >> magic >> version >> bench >> unit;
      if (magic != "costtable") throw CostTableError(line, "missing 'costtable' header");
      if (version != "v1") throw CostTableError(line, "unsupported version '" + version + "'");
      if (unit.empty() || (hs >> extra)) throw CostTableError(line, "header expects 'costtable v1 <benchmark> <unit>'");
      try {
        table.emplace(parse_benchmark(bench), unit);
      } catch (const std::invalid_argument& e) {
        throw CostTableError(line, e.what());
      }
      continue;
    }
    if (raw.empty()) throw CostTableError(line, "blank line");
    if (raw[0] == '#') {
      if (raw.size() < 3 || raw[1] != ' ') throw CostTableError(line, "metadata must read '# key=value'");
      const auto eq = raw.find('=', 2);
      if (eq == std::string::npos) throw CostTableError(line, "metadata line without '='");
      try {
        table->set_meta(raw.substr(2, eq - 2), raw.substr(eq + 1));
      } catch (const std::invalid_argument& e) {
        throw CostTableError(line, e.what());
      }
      continue;
    }
    std::istringstream ls(raw);
    std::string layer_tok, op_tok, cost_tok, extra;
    ls >> layer_tok >> op_tok >> cost_tok;
    if (cost_tok.empty() || (ls >> extra)) throw CostTableError(line, "entry expects '<layer> <op-id> <cost>'");
    int layer = 0;
    auto [p, ec] = std::from_chars(layer_tok.data(), layer_tok.data() + layer_tok.size(), layer);
    if (ec != std::errc() || p != layer_tok.data() + layer_tok.size() || layer < 0) {
      throw CostTableError(line, "bad layer index '" + layer_tok + "'");
    }
    OpSpec op;
    double cost = 0;
    try {
      op = OpSpec::from_id(op_tok);
      cost = parse_double(cost_tok);
    } catch (const std::invalid_argument& e) {
      throw CostTableError(line, e.what());
    }
    if (table->find(layer, op.id()) != nullptr) throw CostTableError(line, "duplicate entry for layer " + layer_tok + ", op " + op_tok);
    try {
      table->set(layer, op, cost);
    } catch (const std::invalid_argument& e) {
      throw CostTableError(line, e.what());
    }
  }
  if (!table) throw CostTableError(0, "empty cost table");
  if (table->entries().empty()) throw CostTableError(line, "cost table has no entries");
  if (table->meta("fixed_cost").size()) {
    try {
      const double f = table->fixed_cost();
      if (!std::isfinite(f) || f < 0) throw std::invalid_argument("fixed_cost must be finite and >= 0");
    } catch (const std::invalid_argument& e) {
      throw CostTableError(0, e.what());
    }
  }
  return std::move(*table);
}

void CostTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

CostTable CostTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace posenas
