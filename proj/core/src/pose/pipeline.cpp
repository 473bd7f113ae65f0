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

#include "posenas/pose/pipeline.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "posenas/arch/network.hpp"
#include "posenas/cost/latency.hpp"
#include "posenas/pose/heatmap.hpp"
#include "posenas/pose/train.hpp"

namespace posenas {

using nlohmann::ordered_json;

std::vector<std::vector<double>> SearchState::probs() const {
  std::vector<std::vector<double>> out;
  for (const auto& a : alpha) {
    double mx = -INFINITY;
    for (double v : a) mx = std::max(mx, v);
    std::vector<double> p;
    double sum = 0;
    for (double v : a) sum += p.emplace_back(std::exp(v - mx));
    for (double& v : p) v /= sum;
    out.push_back(std::move(p));
  }
  return out;
}

std::string SearchState::to_json() const {
  ordered_json j;
  j["config"] = ordered_json::object();
  for (const auto& [k, v] : config.entries()) j["config"][k] = v;
  j["tau"] = tau;
  j["layers"] = ordered_json::array();
  for (std::size_t l = 0; l < ops.size(); ++l) {
    ordered_json layer = ordered_json::array();
    for (std::size_t o = 0; o < ops[l].size(); ++o) {
      layer.push_back({{"op", ops[l][o].id()}, {"alpha", alpha[l][o]}, {"cost", costs[l][o]}});
    }
    j["layers"].push_back(std::move(layer));
  }
  return j.dump(1) + "\n";
}

SearchState SearchState::parse(const std::string& text) {
  SearchState s;
  try {
    const auto j = ordered_json::parse(text);
    for (const auto& [k, v] : j.at("config").items()) s.config.set(k, v.get<std::string>());
    s.tau = j.at("tau").get<double>();
    for (const auto& layer : j.at("layers")) {
      auto& ops = s.ops.emplace_back();
      auto& alpha = s.alpha.emplace_back();
      auto& costs = s.costs.emplace_back();
      for (const auto& c : layer) {
        ops.push_back(OpSpec::from_id(c.at("op").get<std::string>()));
        alpha.push_back(c.at("alpha").get<double>());
        costs.push_back(c.at("cost").get<double>());
        if (!std::isfinite(alpha.back()) || !std::isfinite(costs.back())) {
          throw std::runtime_error("non-finite alpha or cost");
        }
      }
      if (ops.empty()) throw std::runtime_error("layer without candidates");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("search state: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("search state: ") + e.what());
  }
  if (s.ops.empty()) throw std::runtime_error("search state: no layers");
  return s;
}

double uniform_expected_cost(const SupernetConfig& config, const CostTable& table) {
  double total = table.fixed_cost();
  for (const auto& [layer, ops] : layer_candidates(config)) {
    double sum = 0;
    for (const auto& op : ops) sum += table.at(layer, op);
    total += sum / static_cast<double>(ops.size());
  }
  return total;
}

RegularizerConfig resolve_regularizer(const PipelineConfig& config, const CostTable& table) {
  RegularizerConfig reg = config.regularizer;
  if (reg.tau <= 0) reg.tau = uniform_expected_cost(config.supernet, table);
  reg.validate();
  return reg;
}

SearchOutcome search_architecture(const Config& config, const std::vector<KeypointSample>& train,
                                  const CostTable& table) {
  const PipelineConfig p = PipelineConfig::from(config);
  const RegularizerConfig reg = resolve_regularizer(p, table);
  Rng rng(p.schedule.seed);
  auto net = build_supernet<float>(p.supernet, rng);
  const TensorDataset data = to_tensor_dataset(train, p.sigma);
  const SplitDataset split = split_dataset(data.size(), p.split_fraction, p.schedule.seed);

  SearchOutcome out;
  out.trace = run_search(net, data, split, table, p.schedule, reg);
  out.state.config = config;
  out.state.tau = reg.tau;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& layer = net.layer(l);
    out.state.ops.push_back(layer.ops());
    const auto a = layer.alpha().values();
    out.state.alpha.emplace_back(a.begin(), a.end());
    out.state.costs.push_back(layer_costs(layer, table));
  }
  out.arch = derive_from_state(out.state);
  return out;
}

ArchitectureDescriptor derive_from_state(const SearchState& state) {
  const PipelineConfig p = PipelineConfig::from(state.config);
  return derive_architecture(p.supernet, state.ops, state.probs(), state.costs);
}

RandomSearchResult random_search(const PipelineConfig& config, const std::vector<KeypointSample>& train) {
  const SplitDataset split = split_dataset(train.size(), config.split_fraction, config.schedule.seed);
  std::vector<KeypointSample> fit, val;
  for (auto i : split.train) fit.push_back(train[i]);
  for (auto i : split.val) val.push_back(train[i]);
  auto evaluate = [&](const ArchitectureDescriptor& desc, std::size_t index) {
    TrainOptions opts = config.train;
    opts.epochs = config.random_epochs;
    opts.seed = config.train.seed + index;
    Rng rng(opts.seed);
    Network<float> net(desc, rng);
    train_derived(net, fit, {}, opts);
    return evaluate_pck(net, val, config.pck_alpha);
  };
  return random_search_baseline(config.supernet, config.random_samples, config.schedule.seed, evaluate);
}

}  // namespace posenas
