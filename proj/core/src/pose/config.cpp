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

#include "posenas/pose/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace posenas {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename N>
N parse_number(const std::string& key, const std::string& v) {
  N out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || v.empty()) throw ConfigError(0, "bad value '" + v + "' for " + key);
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "data.train_samples", "data.test_samples", "data.image_size", "data.keypoints", "data.seed", "data.sigma",
      "supernet.preset", "supernet.stem_width", "supernet.sep_width", "supernet.stage_widths",
      "supernet.stage_layers", "supernet.stage_strides", "supernet.kernels", "supernet.expansions",
      "supernet.allow_skip", "supernet.head_w1", "supernet.head_w2", "supernet.head_sic", "supernet.head_style",
      "supernet.deconv_kernel",
      "search.warmup_epochs", "search.joint_epochs", "search.batch_size", "search.weight_lr", "search.momentum",
      "search.weight_decay", "search.arch_lr", "search.drop_rate", "search.grad_clip", "search.seed", "search.split",
      "regularizer.lambda", "regularizer.tau",
      "train.epochs", "train.batch_size", "train.lr", "train.seed",
      "random_search.samples", "random_search.epochs",
      "eval.pck_alpha"};
  return keys;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty() || section.find_first_of(" \t=") != std::string::npos) throw ConfigError(line, "bad section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos) throw ConfigError(line, "bad key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (c.has(full)) throw ConfigError(line, "duplicate key '" + full + "'");
    c.entries_.emplace_back(full, trim(s.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.line(), path.string() + ": " + e.what());
  }
}

void Config::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

bool Config::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& Config::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw ConfigError(0, "missing config key '" + key + "'");
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? parse_number<int>(key, get(key)) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? parse_number<double>(key, get(key)) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_number<std::uint64_t>(key, get(key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = get(key);
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(0, "bad boolean '" + v + "' for " + key);
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  std::string item;
  std::istringstream in(get(key));
  while (std::getline(in, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw ConfigError(0, "empty list for " + key);
  return out;
}

SupernetConfig supernet_config_from(const Config& cfg, int keypoints) {
  const std::string preset = cfg.get("supernet.preset", "desk");
  SupernetConfig s;
  if (preset == "desk") {
    s = SupernetConfig::desk();
  } else if (preset == "small") {
    s = SupernetConfig::small();
  } else {
    throw ConfigError(0, "unknown supernet preset '" + preset + "'");
  }
  s.input_size = cfg.get_int("data.image_size", s.input_size);
  s.stem.conv_width = cfg.get_int("supernet.stem_width", s.stem.conv_width);
  s.stem.sep_width = cfg.get_int("supernet.sep_width", s.stem.sep_width);
  std::vector<int> widths, layers, strides;
  for (const auto& st : s.stages) {
    widths.push_back(st.width);
    layers.push_back(st.layers);
    strides.push_back(st.first_stride);
  }
  widths = cfg.get_ints("supernet.stage_widths", widths);
  layers = cfg.get_ints("supernet.stage_layers", layers);
  strides = cfg.get_ints("supernet.stage_strides", strides);
  if (widths.size() != layers.size() || widths.size() != strides.size()) {
    throw ConfigError(0, "supernet stage_widths, stage_layers and stage_strides must have equal length");
  }
  s.stages.clear();
  for (std::size_t i = 0; i < widths.size(); ++i) s.stages.push_back({widths[i], strides[i], layers[i]});
  if (cfg.has("supernet.kernels") || cfg.has("supernet.expansions")) {
    s.candidates = mbconv_grid(cfg.get_ints("supernet.kernels", {3, 5, 7}), cfg.get_ints("supernet.expansions", {3, 6}));
  }
  s.allow_skip = cfg.get_bool("supernet.allow_skip", s.allow_skip);
  s.head.w1 = cfg.get_int("supernet.head_w1", s.head.w1);
  s.head.w2 = cfg.get_int("supernet.head_w2", s.head.w2);
  s.head.sic = cfg.get_bool("supernet.head_sic", s.head.sic);
  if (cfg.has("supernet.head_style")) s.head.style = parse_head_style(cfg.get("supernet.head_style"));
  s.head.deconv_kernel = cfg.get_int("supernet.deconv_kernel", s.head.deconv_kernel);
  s.head.keypoints = keypoints;
  s.validate();
  return s;
}

PipelineConfig PipelineConfig::from(const Config& cfg) {
  for (const auto& [k, v] : cfg.entries()) {
    if (!known_keys().contains(k)) throw ConfigError(0, "unknown config key '" + k + "'");
  }
  PipelineConfig p;
  p.train_samples = cfg.get_int("data.train_samples", p.train_samples);
  p.test_samples = cfg.get_int("data.test_samples", p.test_samples);
  p.image_size = cfg.get_int("data.image_size", p.image_size);
  p.keypoints = cfg.get_int("data.keypoints", p.keypoints);
  p.data_seed = cfg.get_u64("data.seed", p.data_seed);
  p.sigma = cfg.get_double("data.sigma", p.sigma);
  p.supernet = supernet_config_from(cfg, p.keypoints);

  auto& s = p.schedule;
  s.warmup_epochs = cfg.get_int("search.warmup_epochs", s.warmup_epochs);
  s.joint_epochs = cfg.get_int("search.joint_epochs", s.joint_epochs);
  s.batch_size = cfg.get_int("search.batch_size", s.batch_size);
  s.weight.lr = cfg.get_double("search.weight_lr", s.weight.lr);
  s.weight.momentum = cfg.get_double("search.momentum", s.weight.momentum);
  s.weight.weight_decay = cfg.get_double("search.weight_decay", s.weight.weight_decay);
  s.arch.lr = cfg.get_double("search.arch_lr", s.arch.lr);
  s.drop_rate = cfg.get_double("search.drop_rate", s.drop_rate);
  s.grad_clip = cfg.get_double("search.grad_clip", s.grad_clip);
  s.seed = cfg.get_u64("search.seed", s.seed);
  s.validate();
  p.split_fraction = cfg.get_double("search.split", p.split_fraction);

  p.regularizer.lambda = cfg.get_double("regularizer.lambda", p.regularizer.lambda);
  p.regularizer.tau = cfg.get_double("regularizer.tau", p.regularizer.tau);

  p.train.epochs = cfg.get_int("train.epochs", 30);
  p.train.batch_size = cfg.get_int("train.batch_size", 8);
  p.train.lr = cfg.get_double("train.lr", p.train.lr);
  p.train.seed = cfg.get_u64("train.seed", p.train.seed);
  p.train.sigma = p.sigma;

  p.random_samples = cfg.get_int("random_search.samples", p.random_samples);
  p.random_epochs = cfg.get_int("random_search.epochs", p.random_epochs);
  p.pck_alpha = cfg.get_double("eval.pck_alpha", p.pck_alpha);
  p.train.pck_alpha = p.pck_alpha;

  if (p.train_samples < 2 || p.test_samples < 1) throw ConfigError(0, "need at least 2 training and 1 test sample");
  if (p.image_size != p.supernet.input_size) throw ConfigError(0, "image size and supernet input size differ");
  if (p.random_samples < 1 || p.random_epochs < 0) throw ConfigError(0, "random_search needs samples >= 1, epochs >= 0");
  if (!(p.pck_alpha > 0 && p.pck_alpha <= 1)) throw ConfigError(0, "pck_alpha must lie in (0, 1]");
  return p;
}

}  // namespace posenas
