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

#include "posenas/supernet/supernet.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <stdexcept>

namespace posenas {
namespace {

std::string join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

}  // namespace

std::string OpSpec::id() const {
  if (is_skip()) return "skip";
  return "mbconv_k" + std::to_string(kernel) + "_e" + std::to_string(expansion);
}

OpSpec OpSpec::from_id(const std::string& id) {
  if (id == "skip") return skip();
  static const std::regex kPattern(R"(mbconv_k(\d+)_e(\d+))");
  std::smatch m;
  if (!std::regex_match(id, m, kPattern)) throw std::invalid_argument("unknown op id '" + id + "'");
  OpSpec op;
  try {
    op = mbconv(std::stoi(m[1]), std::stoi(m[2]));
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("unknown op id '" + id + "'");
  }
  const bool known = (op.kernel == 3 || op.kernel == 5 || op.kernel == 7) && (op.expansion == 3 || op.expansion == 6);
  if (!known || op.id() != id) throw std::invalid_argument("unknown op id '" + id + "'");
  return op;
}

std::vector<OpSpec> mbconv_grid(const std::vector<int>& kernels, const std::vector<int>& expansions) {
  std::vector<OpSpec> out;
  for (int k : kernels) {
    for (int e : expansions) out.push_back(OpSpec::mbconv(k, e));
  }
  return out;
}

SupernetConfig SupernetConfig::small() {
  SupernetConfig c;
  c.input_size = 256;
  c.stem = {3, 32, 16};
  c.stages = {{24, 2, 4}, {32, 2, 6}, {64, 2, 10}, {96, 1, 8}};
  c.head = HeadConfig{64, 32, true, HeadStyle::kPlain, 16, 4};
  return c;
}

SupernetConfig SupernetConfig::scaled(const SupernetConfig& base, int divisor, int max_layers_per_stage) {
  if (divisor < 1 || max_layers_per_stage < 1) throw std::invalid_argument("scaled: bad scaling factors");
  auto width = [divisor](int w) {
    const double q = static_cast<double>(w) / divisor;
    const int even = 2 * static_cast<int>(std::lround(q / 2.0));
    return std::max(4, even);
  };
  SupernetConfig c = base;
  c.input_size = base.input_size / divisor;
  c.stem.conv_width = width(base.stem.conv_width);
  c.stem.sep_width = width(base.stem.sep_width);
  for (auto& s : c.stages) {
    s.width = width(s.width);
    s.layers = std::min(s.layers, max_layers_per_stage);
  }
  c.head.w1 = width(base.head.w1);
  c.head.w2 = width(base.head.w2);
  return c;
}

SupernetConfig SupernetConfig::desk() {
  SupernetConfig c = scaled(small(), 4, 2);
  // Scaling the head by 4 leaves too little capacity to localise 8 joints.
  c.head.w1 = 32;
  c.head.w2 = 16;
  c.head.keypoints = 8;
  return c;
}

void SupernetConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("supernet config: " + msg); };
  if (input_size <= 0) fail("input size must be positive");
  if (stem.input_channels <= 0 || stem.conv_width <= 0 || stem.sep_width <= 0) fail("stem widths must be positive");
  if (stages.empty()) fail("no stages");
  if (candidates.empty()) fail("no candidate operations");
  for (const auto& op : candidates) {
    if (op.is_skip()) fail("skip is added automatically; list only MBConv candidates");
    MBConvSpec{op.kernel, op.expansion, 1, 1, 1}.validate();
  }
  int prev = stem.sep_width;
  int strided = 1;  // stem conv
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    if (s.width <= 0 || s.layers <= 0) fail("stage " + std::to_string(i + 1) + " has non-positive width or depth");
    if (s.first_stride != 1 && s.first_stride != 2) fail("stage stride must be 1 or 2");
    if (s.width < prev) fail("stage widths must be non-decreasing");
    prev = s.width;
    if (s.first_stride == 2) ++strided;
  }
  if (strided != downsamplings) {
    fail("expected " + std::to_string(downsamplings) + " stride-2 positions, found " + std::to_string(strided));
  }
  int size = input_size;
  for (int i = 0; i < strided; ++i) {
    if (size % 2 != 0) fail("input size " + std::to_string(input_size) + " not divisible by 2^" + std::to_string(strided));
    size /= 2;
  }
  head.validate();
}

std::vector<LayerGeometry> SupernetConfig::layers() const {
  std::vector<LayerGeometry> out;
  int in = stem.sep_width;
  int size = (input_size + 1) / 2;
  int index = 0;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (int l = 0; l < stages[s].layers; ++l) {
      LayerGeometry g;
      g.index = index++;
      g.stage = static_cast<int>(s) + 1;
      g.in_channels = in;
      g.out_channels = stages[s].width;
      g.stride = l == 0 ? stages[s].first_stride : 1;
      g.in_size = size;
      out.push_back(g);
      in = g.out_channels;
      size = g.out_size();
    }
  }
  return out;
}

int SupernetConfig::head_input_channels() const { return stages.back().width; }

int SupernetConfig::head_input_size() const {
  const auto geo = layers();
  return geo.back().out_size();
}

template <typename T>
Tensor<T> layer_probs(const Tensor<T>& alpha) {
  if (alpha.numel() == 0) throw std::invalid_argument("layer_probs: empty parameter vector");
  for (T v : alpha.values()) {
    if (!std::isfinite(v)) throw std::invalid_argument("layer_probs: non-finite architecture parameter");
  }
  return softmax(alpha);
}

template <typename T>
MixedLayer<T>::MixedLayer(LayerGeometry geometry, std::vector<OpSpec> ops, std::vector<ModulePtr<T>> candidates)
    : geometry_(geometry),
      ops_(std::move(ops)),
      candidates_(std::move(candidates)),
      alpha_(Shape{candidates_.size()}, true) {
  if (candidates_.empty() || ops_.size() != candidates_.size()) {
    throw std::invalid_argument("MixedLayer: need one OpSpec per candidate and at least one candidate");
  }
}

template <typename T>
std::unique_ptr<MixedLayer<T>> MixedLayer<T>::build(const LayerGeometry& geometry,
                                                    const std::vector<OpSpec>& mbconv_candidates,
                                                    bool allow_skip, Rng& rng) {
  std::vector<OpSpec> ops;
  std::vector<ModulePtr<T>> mods;
  for (const auto& op : mbconv_candidates) {
    ops.push_back(op);
    mods.push_back(build_mbconv<T>(geometry.mbconv(op), rng));
  }
  if (allow_skip && geometry.skip_admissible()) {
    ops.push_back(OpSpec::skip());
    mods.push_back(std::make_unique<Identity<T>>());
  }
  return std::make_unique<MixedLayer<T>>(geometry, std::move(ops), std::move(mods));
}

template <typename T>
Tensor<T> MixedLayer<T>::forward(const Tensor<T>& x) {
  std::vector<Tensor<T>> outs;
  outs.reserve(candidates_.size());
  for (auto& c : candidates_) outs.push_back(c->forward(x));
  for (const auto& o : outs) {
    if (o.shape() != outs[0].shape()) {
      throw std::logic_error("MixedLayer " + std::to_string(geometry_.index) + ": candidate output shapes disagree " +
                             shape_str(outs[0].shape()) + " vs " + shape_str(o.shape()));
    }
  }
  return weighted_sum(probs(), std::span<const Tensor<T>>(outs));
}

template <typename T>
Tensor<T> MixedLayer<T>::forward(const Tensor<T>& x, const PathSample& sample) {
  std::vector<Tensor<T>> outs;
  std::vector<T> weights;
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (!sample.active[i]) continue;
    outs.push_back(candidates_[i]->forward(x));
    weights.push_back(static_cast<T>(sample.probs[i]));
  }
  const std::size_t n = weights.size();
  return weighted_sum(Tensor<T>(Shape{n}, std::move(weights)), std::span<const Tensor<T>>(outs));
}

template <typename T>
Shape MixedLayer<T>::output_shape(const Shape& in) const {
  const Shape first = candidates_[0]->output_shape(in);
  for (const auto& c : candidates_) {
    const Shape s = c->output_shape(in);
    if (s != first) {
      throw std::logic_error("MixedLayer " + std::to_string(geometry_.index) + ": candidate output shapes disagree " +
                             shape_str(first) + " vs " + shape_str(s));
    }
  }
  return first;
}

template <typename T>
void MixedLayer<T>::collect(const std::string& prefix, StateDict<T>& out) {
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    candidates_[i]->collect(join(prefix, "cand" + std::to_string(i)), out);
  }
}

template <typename T>
void MixedLayer<T>::set_norm_mode(NormMode mode) {
  for (auto& c : candidates_) c->set_norm_mode(mode);
}

template <typename T>
PathSample drop_path(const MixedLayer<T>& layer, double drop_rate, Rng& rng) {
  if (!(drop_rate >= 0.0) || drop_rate >= 1.0) {
    throw std::invalid_argument("drop_path: rate must lie in [0, 1), got " + std::to_string(drop_rate));
  }
  const std::size_t n = layer.size();
  PathSample s;
  s.active.assign(n, true);
  if (drop_rate > 0.0) {
    std::bernoulli_distribution drop(drop_rate);
    do {
      for (std::size_t i = 0; i < n; ++i) s.active[i] = !drop(rng);
    } while (std::none_of(s.active.begin(), s.active.end(), [](bool a) { return a; }));
  }
  const auto p = layer.probs();
  double total = 0.0;
  s.probs.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.active[i]) total += static_cast<double>(p[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (s.active[i]) s.probs[i] = static_cast<double>(p[i]) / total;
  }
  return s;
}

template <typename T>
Supernet<T>::Supernet(ModulePtr<T> stem, std::vector<std::unique_ptr<MixedLayer<T>>> layers, ModulePtr<T> head,
                      std::optional<SupernetConfig> config)
    : stem_(std::move(stem)), layers_(std::move(layers)), head_(std::move(head)), config_(std::move(config)) {}

template <typename T>
Tensor<T> Supernet<T>::forward(const Tensor<T>& x) {
  Tensor<T> h = stem_->forward(x);
  for (auto& l : layers_) h = l->forward(h);
  return head_->forward(h);
}

template <typename T>
Tensor<T> Supernet<T>::forward_sampled(const Tensor<T>& x, double drop_rate, Rng& rng) {
  Tensor<T> h = stem_->forward(x);
  for (auto& l : layers_) h = l->forward(h, drop_path(*l, drop_rate, rng));
  return head_->forward(h);
}

template <typename T>
Shape Supernet<T>::output_shape(const Shape& in) const {
  Shape s = stem_->output_shape(in);
  for (const auto& l : layers_) s = l->output_shape(s);
  return head_->output_shape(s);
}

template <typename T>
StateDict<T> Supernet<T>::state() {
  StateDict<T> sd;
  stem_->collect("stem", sd);
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->collect("layers." + std::to_string(i), sd);
  head_->collect("head", sd);
  return sd;
}

template <typename T>
std::vector<Tensor<T>> Supernet<T>::weight_parameters() {
  std::vector<Tensor<T>> out;
  for (auto& p : state().parameters) out.push_back(p.tensor);
  return out;
}

template <typename T>
std::vector<Tensor<T>> Supernet<T>::arch_parameters() {
  std::vector<Tensor<T>> out;
  for (auto& l : layers_) out.push_back(l->alpha());
  return out;
}

template <typename T>
void Supernet<T>::set_norm_mode(NormMode mode) {
  stem_->set_norm_mode(mode);
  for (auto& l : layers_) l->set_norm_mode(mode);
  head_->set_norm_mode(mode);
}

template <typename T>
Supernet<T> build_supernet(const SupernetConfig& config, Rng& rng) {
  config.validate();
  auto stem = build_stem<T>(config.stem, rng);
  std::vector<std::unique_ptr<MixedLayer<T>>> layers;
  for (const auto& g : config.layers()) {
    layers.push_back(MixedLayer<T>::build(g, config.candidates, config.allow_skip, rng));
  }
  auto head = build_head<T>(config.head_input_channels(), config.head, rng);
  return Supernet<T>(std::move(stem), std::move(layers), std::move(head), config);
}

template Tensor<float> layer_probs(const Tensor<float>&);
template Tensor<double> layer_probs(const Tensor<double>&);
template class MixedLayer<float>;
template class MixedLayer<double>;
template PathSample drop_path(const MixedLayer<float>&, double, Rng&);
template PathSample drop_path(const MixedLayer<double>&, double, Rng&);
template class Supernet<float>;
template class Supernet<double>;
template Supernet<float> build_supernet<float>(const SupernetConfig&, Rng&);
template Supernet<double> build_supernet<double>(const SupernetConfig&, Rng&);

}  // namespace posenas
