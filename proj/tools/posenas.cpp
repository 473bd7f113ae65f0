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

// posenas command line: data generation, cost tables, search, training and
// evaluation. Every subcommand reads an optional --config file; flags win.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "posenas/arch/network.hpp"
#include "posenas/cost/flops.hpp"
#include "posenas/cost/latency.hpp"
#include "posenas/pose/ablation.hpp"
#include "posenas/pose/config.hpp"
#include "posenas/pose/dataset.hpp"
#include "posenas/pose/model_io.hpp"
#include "posenas/pose/pipeline.hpp"
#include "posenas/pose/train.hpp"

namespace fs = std::filesystem;
using namespace posenas;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

/// A dataset is named by its directory or its annotations file.
std::vector<KeypointSample> load_data(const fs::path& path) {
  return load_annotations(fs::is_directory(path) ? path / "annotations.jsonl" : path);
}

ArchitectureDescriptor load_arch(const fs::path& path) {
  try {
    return parse_architecture(read_file(path), -1);
  } catch (const ArchParseError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Shared --config handling plus "flag -> key" overrides.
struct Settings {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void add(CLI::App* cmd) { cmd->add_option("--config", config_path, "Config file (key = value, [sections])"); }

  template <typename V>
  void bind(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    auto* opt = cmd->add_option_function<V>(
        flag, [this, key](const V& v) {
          std::ostringstream s;
          s.precision(17);
          s << v;
          overrides.emplace_back(key, s.str());
        },
        help);
    (void)opt;
  }

  Config config() const {
    Config c = config_path.empty() ? Config{} : Config::load(config_path);
    for (const auto& [k, v] : overrides) c.set(k, v);
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posenas: differentiable architecture search for keypoint heatmap networks"};
  app.require_subcommand(1);
  Settings settings;

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Render a synthetic keypoint dataset");
  settings.add(gen);
  std::string gen_out;
  std::optional<int> gen_n;
  settings.bind<int>(gen, "--size", "data.image_size", "Image side in pixels");
  settings.bind<int>(gen, "--keypoints", "data.keypoints", "Joints per figure");
  settings.bind<std::uint64_t>(gen, "--seed", "data.seed", "Generator seed");
  gen->add_option("--n", gen_n, "Number of samples (default data.train_samples)");
  gen->add_option("--out", gen_out, "Output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Build a per-layer cost table for the supernet");
  settings.add(bench);
  std::string bench_kind = "flops", bench_out;
  LatencyOptions lat;
  bench->add_option("--benchmark", bench_kind, "flops or latency")->check(CLI::IsMember({"flops", "latency"}));
  bench->add_option("--out", bench_out, "Cost table path")->required();
  bench->add_option("--batch", lat.batch, "Latency batch size");
  bench->add_option("--reps", lat.reps, "Timed repetitions per op");

  // search
  auto* search = app.add_subcommand("search", "Run the differentiable search and derive an architecture");
  settings.add(search);
  std::string search_table, search_out, search_data, search_state, search_trace;
  search->add_option("--cost-table", search_table, "Cost table from 'bench'")->required();
  search->add_option("--out", search_out, "Derived architecture path")->required();
  search->add_option("--data", search_data, "Training data (default: synthesised from [data])");
  search->add_option("--state", search_state, "Search state JSON (default: <out>.state.json)");
  search->add_option("--trace", search_trace, "Search trace (default: <out>.trace)");
  settings.bind<double>(search, "--lambda", "regularizer.lambda", "Cost weight");
  settings.bind<std::uint64_t>(search, "--seed", "search.seed", "Search seed");

  // derive
  auto* derive = app.add_subcommand("derive", "Derive an architecture from a saved search state");
  std::string derive_state, derive_out;
  derive->add_option("--search-state", derive_state, "Search state JSON")->required();
  derive->add_option("--out", derive_out, "Architecture path")->required();
  settings.add(derive);

  // random-search
  auto* rsearch = app.add_subcommand("random-search", "Random-search baseline over the same space");
  settings.add(rsearch);
  std::string rs_data, rs_out;
  rsearch->add_option("--data", rs_data, "Training data")->required();
  rsearch->add_option("--out", rs_out, "Best architecture path")->required();
  settings.bind<int>(rsearch, "--samples", "random_search.samples", "Architectures to sample");
  settings.bind<int>(rsearch, "--epochs-each", "random_search.epochs", "Training epochs per sample");

  // train
  auto* train = app.add_subcommand("train", "Train a derived architecture");
  settings.add(train);
  std::string train_arch, train_data, train_val, train_out;
  train->add_option("--arch", train_arch, "Architecture file")->required();
  train->add_option("--data", train_data, "Training data")->required();
  train->add_option("--val", train_val, "Validation data for per-epoch PCK");
  train->add_option("--out", train_out, "Model weights path")->required();
  settings.bind<int>(train, "--epochs", "train.epochs", "Epochs");
  settings.bind<std::uint64_t>(train, "--seed", "train.seed", "Initialisation and shuffling seed");
  settings.bind<int>(train, "--batch", "train.batch_size", "Batch size");

  // eval
  auto* eval = app.add_subcommand("eval", "PCK of a trained model");
  settings.add(eval);
  std::string eval_model, eval_data;
  eval->add_option("--model", eval_model, "Model weights")->required();
  eval->add_option("--data", eval_data, "Evaluation data")->required();
  settings.bind<double>(eval, "--pck-alpha", "eval.pck_alpha", "PCK threshold fraction");

  // flops
  auto* flops = app.add_subcommand("flops", "FLOPs (MACs) breakdown of an architecture");
  settings.add(flops);
  std::string flops_arch, counting = "taps";
  flops->add_option("--arch", flops_arch, "Architecture file")->required();
  flops->add_option("--counting", counting, "Transposed conv counting: taps or zero-insertion")
      ->check(CLI::IsMember({"taps", "zero-insertion"}));

  // ablate-sic
  auto* ablate = app.add_subcommand("ablate-sic", "Train with and without SIC and compare");
  settings.add(ablate);
  std::string ab_arch, ab_data, ab_test;
  int ab_seeds = 5;
  ablate->add_option("--arch", ab_arch, "Base architecture")->required();
  ablate->add_option("--data", ab_data, "Training data")->required();
  ablate->add_option("--test", ab_test, "Test data (default: 20% held out of --data)");
  ablate->add_option("--seeds", ab_seeds, "Number of seeds (1..n)")->check(CLI::Range(2, 1000));
  settings.bind<int>(ablate, "--epochs", "train.epochs", "Epochs per run");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config cfg = settings.config();
    const PipelineConfig p = PipelineConfig::from(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    if (*gen) {
      auto samples = synth_dataset(gen_n.value_or(p.train_samples), p.image_size, p.keypoints, p.data_seed);
      const auto ann = save_dataset(samples, gen_out);
      std::cout << "wrote " << samples.size() << " samples to " << ann.string() << "\n";
    } else if (*bench) {
      const CostTable table =
          bench_kind == "flops" ? flops_table(p.supernet) : latency_table(p.supernet, lat);
      table.save(bench_out);
      std::cout << "wrote " << table.entries().size() << " entries to " << bench_out << "\n";
    } else if (*search) {
      const CostTable table = CostTable::load(search_table);
      const auto data = search_data.empty()
                            ? synth_dataset(p.train_samples, p.image_size, p.keypoints, p.data_seed)
                            : load_data(search_data);
      const auto outcome = search_architecture(cfg, data, table);
      write_file(search_out, serialize(outcome.arch));
      write_file(search_state.empty() ? search_out + ".state.json" : search_state, outcome.state.to_json());
      write_file(search_trace.empty() ? search_out + ".trace" : search_trace, outcome.trace.to_text());
      std::cout << serialize(outcome.arch);
      std::printf("tau %.6g mflops %.4f seconds %.1f\n", outcome.state.tau,
                  to_mflops(flops_of(outcome.arch).total()), seconds_since(t0));
    } else if (*derive) {
      const auto state = SearchState::parse(read_file(derive_state));
      const auto arch = derive_from_state(state);
      write_file(derive_out, serialize(arch));
      std::cout << serialize(arch);
    } else if (*rsearch) {
      const auto result = random_search(p, load_data(rs_data));
      for (std::size_t i = 0; i < result.scores.size(); ++i) {
        std::printf("sample %zu val_pck %.4f mflops %.4f\n", i, result.scores[i],
                    to_mflops(flops_of(result.samples[i]).total()));
      }
      write_file(rs_out, serialize(result.best_architecture()));
      std::printf("best %zu seconds %.1f\n", result.best, seconds_since(t0));
    } else if (*train) {
      const auto desc = load_arch(train_arch);
      const auto data = load_data(train_data);
      const auto val = train_val.empty() ? std::vector<KeypointSample>{} : load_data(train_val);
      Rng rng(p.train.seed);
      Network<float> net(desc, rng);
      const auto trace = train_derived(net, data, val, p.train);
      save_model(net, train_out);
      std::cout << trace.to_text();
      std::printf("seconds %.1f\n", seconds_since(t0));
    } else if (*eval) {
      auto net = load_model<float>(eval_model);
      const auto data = load_data(eval_data);
      std::printf("pck@%g %.6f\n", p.pck_alpha, evaluate_pck(net, data, p.pck_alpha));
    } else if (*flops) {
      FlopsOptions opts;
      opts.transposed = counting == "taps" ? TransposedCounting::kInputTaps : TransposedCounting::kZeroInsertion;
      const auto b = flops_of(load_arch(flops_arch), opts);
      std::printf("stem %.4f\n", to_mflops(b.stem));
      for (std::size_t i = 0; i < b.layers.size(); ++i) std::printf("layer %zu %.4f\n", i, to_mflops(b.layers[i]));
      std::printf("head %.4f\nbackbone %.4f\ntotal %.4f MFLOPs\n", to_mflops(b.head), to_mflops(b.backbone()),
                  to_mflops(b.total()));
    } else if (*ablate) {
      const auto desc = load_arch(ab_arch);
      auto data = load_data(ab_data);
      std::vector<KeypointSample> test;
      if (!ab_test.empty()) {
        test = load_data(ab_test);
      } else {
        const auto split = split_dataset(data.size(), p.split_fraction, p.train.seed);
        std::vector<KeypointSample> fit;
        for (auto i : split.train) fit.push_back(data[i]);
        for (auto i : split.val) test.push_back(data[i]);
        data = std::move(fit);
      }
      std::vector<std::uint64_t> seeds;
      for (int s = 1; s <= ab_seeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
      std::cout << ablate_sic<float>(data, test, desc, p.train, seeds).to_text();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
