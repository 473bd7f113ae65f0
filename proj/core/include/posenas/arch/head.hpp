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

#include <memory>
#include <optional>
#include <string>

#include "posenas/nn/blocks.hpp"
#include "posenas/nn/module.hpp"

namespace posenas {

/// How each of the two 2x upsampling stages is built.
///   kPlain:   transposed conv -> norm/ReLU6
///   kSep:     nearest 2x -> depthwise 3x3 -> norm/ReLU6 -> pointwise -> norm/ReLU6
///   kInvertedResidual: expand 1x1 (x6) -> norm/ReLU6 -> nearest 2x ->
///             depthwise 3x3 -> norm/ReLU6 -> project 1x1 -> norm
enum class HeadStyle { kPlain, kSep, kInvertedResidual };

std::string to_string(HeadStyle style);
/// Accepts the architecture-file tokens "plain", "sep", "ir".
HeadStyle parse_head_style(const std::string& token);

struct HeadConfig {
  int w1 = 64;
  int w2 = 32;
  bool sic = true;
  HeadStyle style = HeadStyle::kPlain;
  int keypoints = 16;
  int deconv_kernel = 4;

  void validate() const;
  bool operator==(const HeadConfig&) const = default;
};

/// Input stem: plain 3x3 stride-2 conv -> norm/ReLU6 -> SepDepth3x3 stride 1.
struct StemConfig {
  int input_channels = 3;
  int conv_width = 32;
  int sep_width = 16;

  bool operator==(const StemConfig&) const = default;
};

template <typename T>
std::unique_ptr<Sequential<T>> build_stem(const StemConfig& cfg, Rng& rng);

/// Intermediate feature maps of one head forward.
template <typename T>
struct HeadFeatures {
  Tensor<T> post_deconv;  // after the second upsampling stage
  Tensor<T> post_sic;     // after SIC (equals post_deconv when SIC is off)
};

/// up(in -> w1) -> up(w1 -> w2) -> [SIC: depthwise 3x3 + norm] -> 1x1 (w2 -> K).
/// The final 1x1 is linear. The SIC kernel starts as a binomial blur and is
/// followed by ReLU6 unless the style ends in a linear projection.
template <typename T>
class Head : public Module<T> {
 public:
  Head(int in_channels, const HeadConfig& cfg, Rng& rng);

  Tensor<T> forward(const Tensor<T>& x) override;
  Tensor<T> forward(const Tensor<T>& x, HeadFeatures<T>* features);
  Shape output_shape(const Shape& in) const override;
  void collect(const std::string& prefix, StateDict<T>& out) override;
  void set_norm_mode(NormMode mode) override;

  const HeadConfig& config() const { return cfg_; }
  /// nullptr when SIC is disabled.
  ConvNorm<T>* sic() { return sic_.get(); }
  Conv<T>& final_conv() { return *final_; }

 private:
  HeadConfig cfg_;
  ModulePtr<T> up1_;
  ModulePtr<T> up2_;
  std::unique_ptr<ConvNorm<T>> sic_;
  std::unique_ptr<Conv<T>> final_;
};

template <typename T>
std::unique_ptr<Head<T>> build_head(int in_channels, const HeadConfig& cfg, Rng& rng);

extern template class Head<float>;
extern template class Head<double>;

}  // namespace posenas
