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

#include "posenas/arch/head.hpp"

#include <stdexcept>

namespace posenas {
namespace {

std::string join(const std::string& prefix, const std::string& name) {
  return prefix.empty() ? name : prefix + "." + name;
}

template <typename T>
ModulePtr<T> build_up_stage(int in, int out, const HeadConfig& cfg, Rng& rng) {
  auto seq = std::make_unique<Sequential<T>>();
  switch (cfg.style) {
    case HeadStyle::kPlain:
      seq->template emplace<ConvNorm<T>>("tconv", ConvSpec::transposed(in, out, cfg.deconv_kernel), true, rng);
      break;
    case HeadStyle::kSep:
      seq->template emplace<Upsample2x<T>>("up");
      seq->template emplace<ConvNorm<T>>("dw", ConvSpec::depthwise(3, in), true, rng);
      seq->template emplace<ConvNorm<T>>("pw", ConvSpec::pointwise(in, out), true, rng);
      break;
    case HeadStyle::kInvertedResidual: {
      const int hidden = 6 * in;
      seq->template emplace<ConvNorm<T>>("expand", ConvSpec::pointwise(in, hidden), true, rng);
      seq->template emplace<Upsample2x<T>>("up");
      seq->template emplace<ConvNorm<T>>("dw", ConvSpec::depthwise(3, hidden), true, rng);
      seq->template emplace<ConvNorm<T>>("project", ConvSpec::pointwise(hidden, out), false, rng);
      break;
    }
  }
  return seq;
}

// Each channel starts as the 3x3 binomial blur, which zeroes the period-2 component.
template <typename T>
void init_binomial(Conv<T>& conv) {
  static constexpr double kTaps[9] = {1, 2, 1, 2, 4, 2, 1, 2, 1};
  auto& w = conv.weight();
  for (std::size_t i = 0; i < w.numel(); ++i) w[i] = static_cast<T>(kTaps[i % 9] / 16.0);
}

}  // namespace

std::string to_string(HeadStyle style) {
  switch (style) {
    case HeadStyle::kPlain: return "plain";
    case HeadStyle::kSep: return "sep";
    case HeadStyle::kInvertedResidual: return "ir";
  }
  return "?";
}

HeadStyle parse_head_style(const std::string& token) {
  if (token == "plain") return HeadStyle::kPlain;
  if (token == "sep") return HeadStyle::kSep;
  if (token == "ir") return HeadStyle::kInvertedResidual;
  throw std::invalid_argument("unknown head style '" + token + "' (expected plain, sep or ir)");
}

void HeadConfig::validate() const {
  if (w1 <= 0 || w2 <= 0) throw std::invalid_argument("head: widths must be positive");
  if (keypoints <= 0) throw std::invalid_argument("head: keypoint count must be positive");
  ConvSpec::transposed(1, 1, deconv_kernel).validate();
}

template <typename T>
std::unique_ptr<Sequential<T>> build_stem(const StemConfig& cfg, Rng& rng) {
  auto stem = std::make_unique<Sequential<T>>();
  stem->template emplace<ConvNorm<T>>("conv", ConvSpec::plain(3, cfg.input_channels, cfg.conv_width, 2), true, rng);
  stem->add("sep", build_sepdepth<T>(3, cfg.conv_width, cfg.sep_width, 1, rng));
  return stem;
}

template <typename T>
Head<T>::Head(int in_channels, const HeadConfig& cfg, Rng& rng) : cfg_(cfg) {
  if (in_channels <= 0) throw std::invalid_argument("head: in_channels must be positive");
  cfg_.validate();
  up1_ = build_up_stage<T>(in_channels, cfg_.w1, cfg_, rng);
  up2_ = build_up_stage<T>(cfg_.w1, cfg_.w2, cfg_, rng);
  if (cfg_.sic) {
    // ReLU6 only where the deconv output is already clipped, so an identity kernel stays a no-op.
    const bool clipped = cfg_.style != HeadStyle::kInvertedResidual;
    sic_ = std::make_unique<ConvNorm<T>>(ConvSpec::depthwise(3, cfg_.w2), clipped, rng);
    init_binomial(sic_->conv());
  }
  final_ = std::make_unique<Conv<T>>(ConvSpec::pointwise(cfg_.w2, cfg_.keypoints), rng);
}

template <typename T>
Tensor<T> Head<T>::forward(const Tensor<T>& x) {
  return forward(x, nullptr);
}

template <typename T>
Tensor<T> Head<T>::forward(const Tensor<T>& x, HeadFeatures<T>* features) {
  Tensor<T> h = up2_->forward(up1_->forward(x));
  if (features) features->post_deconv = h;
  if (sic_) h = sic_->forward(h);
  if (features) features->post_sic = h;
  return final_->forward(h);
}

template <typename T>
Shape Head<T>::output_shape(const Shape& in) const {
  Shape s = up2_->output_shape(up1_->output_shape(in));
  if (sic_) s = sic_->output_shape(s);
  return final_->output_shape(s);
}

template <typename T>
void Head<T>::collect(const std::string& prefix, StateDict<T>& out) {
  up1_->collect(join(prefix, "up1"), out);
  up2_->collect(join(prefix, "up2"), out);
  if (sic_) sic_->collect(join(prefix, "sic"), out);
  final_->collect(join(prefix, "final"), out);
}

template <typename T>
void Head<T>::set_norm_mode(NormMode mode) {
  up1_->set_norm_mode(mode);
  up2_->set_norm_mode(mode);
  if (sic_) sic_->set_norm_mode(mode);
}

template <typename T>
std::unique_ptr<Head<T>> build_head(int in_channels, const HeadConfig& cfg, Rng& rng) {
  return std::make_unique<Head<T>>(in_channels, cfg, rng);
}

template class Head<float>;
template class Head<double>;
template std::unique_ptr<Sequential<float>> build_stem<float>(const StemConfig&, Rng&);
template std::unique_ptr<Sequential<double>> build_stem<double>(const StemConfig&, Rng&);
template std::unique_ptr<Head<float>> build_head<float>(int, const HeadConfig&, Rng&);
template std::unique_ptr<Head<double>> build_head<double>(int, const HeadConfig&, Rng&);

}  // namespace posenas
