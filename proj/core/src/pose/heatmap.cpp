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

#include "posenas/pose/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace posenas {

std::vector<float> heatmap_targets(const KeypointSample& sample, int output_size, double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("heatmap_targets: sigma must be > 0");
  if (output_size < 1) throw std::invalid_argument("heatmap_targets: output size must be >= 1");
  const auto n = static_cast<std::size_t>(output_size);
  std::vector<float> out(sample.keypoints.size() * n * n, 0.f);
  const double ratio = static_cast<double>(output_size) / sample.image.width;
  const double cut2 = 9 * sigma * sigma;
  for (std::size_t k = 0; k < sample.keypoints.size(); ++k) {
    const auto& p = sample.keypoints[k];
    if (p.visible == 0) continue;
    const double cx = p.x * ratio, cy = p.y * ratio;
    float* map = out.data() + k * n * n;
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = 0; u < n; ++u) {
        const double d2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
        if (d2 <= cut2) map[v * n + u] = static_cast<float>(std::exp(-d2 / (2 * sigma * sigma)));
      }
    }
  }
  return out;
}

std::vector<float> image_to_input(const Image& image) {
  const auto hw = static_cast<std::size_t>(image.width) * image.height;
  std::vector<float> out(hw * image.channels);
  for (std::size_t i = 0; i < hw; ++i) {
    for (int c = 0; c < image.channels; ++c) {
      out[c * hw + i] = image.pixels[i * image.channels + c] / 255.f - 0.5f;
    }
  }
  return out;
}

TensorDataset to_tensor_dataset(const std::vector<KeypointSample>& samples, double sigma) {
  if (samples.empty()) throw std::invalid_argument("to_tensor_dataset: no samples");
  const auto& first = samples.front();
  if (first.image.width % 4 != 0) throw std::invalid_argument("to_tensor_dataset: image size must be divisible by 4");
  const auto s = static_cast<std::size_t>(first.image.width);
  TensorDataset d;
  d.input_shape = {static_cast<std::size_t>(first.image.channels), s, s};
  d.target_shape = {first.keypoints.size(), s / 4, s / 4};
  for (const auto& sample : samples) {
    d.add(image_to_input(sample.image), heatmap_targets(sample, static_cast<int>(s / 4), sigma));
  }
  return d;
}

std::vector<Prediction> decode_keypoints(std::span<const float> heatmaps, int keypoints, int h, int w, double stride) {
  if (h < 1 || w < 1 || keypoints < 1) throw std::invalid_argument("decode_keypoints: empty heatmaps");
  const auto plane = static_cast<std::size_t>(h) * w;
  if (heatmaps.size() != plane * keypoints) throw std::invalid_argument("decode_keypoints: buffer size mismatch");
  std::vector<Prediction> out;
  for (int k = 0; k < keypoints; ++k) {
    const float* m = heatmaps.data() + k * plane;
    std::size_t best = 0;
    for (std::size_t i = 1; i < plane; ++i) {
      if (m[i] > m[best]) best = i;
    }
    const double conf = std::max(0.0, static_cast<double>(m[best]));
    out.push_back({static_cast<double>(best % w) * stride, static_cast<double>(best / w) * stride, conf});
  }
  return out;
}

double pck(const std::vector<std::vector<Prediction>>& preds, const std::vector<KeypointSample>& samples, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("pck: alpha must lie in (0, 1]");
  if (preds.size() != samples.size()) throw std::invalid_argument("pck: prediction and sample counts differ");
  std::size_t hit = 0, total = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (preds[i].size() != s.keypoints.size()) throw std::invalid_argument("pck: keypoint count mismatch for " + s.id);
    const double thr = alpha * std::max(s.bbox.w, s.bbox.h);
    for (std::size_t k = 0; k < s.keypoints.size(); ++k) {
      if (s.keypoints[k].visible == 0) continue;
      ++total;
      if (std::hypot(preds[i][k].x - s.keypoints[k].x, preds[i][k].y - s.keypoints[k].y) <= thr) ++hit;
    }
  }
  if (total == 0) throw std::invalid_argument("pck: no visible keypoints");
  return static_cast<double>(hit) / static_cast<double>(total);
}

double checkerboard_score(std::span<const float> map, int h, int w) {
  if (h < 4 || w < 4 || h % 2 != 0 || w % 2 != 0) {
    throw std::invalid_argument("checkerboard_score: map must be at least 4x4 with even sides");
  }
  if (map.size() != static_cast<std::size_t>(h) * w) throw std::invalid_argument("checkerboard_score: buffer size mismatch");
  double phase_sum[4] = {0, 0, 0, 0};
  double phase_n[4] = {0, 0, 0, 0};
  double total = 0, n = 0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double v = map[static_cast<std::size_t>(y) * w + x];
      phase_sum[(y % 2) * 2 + x % 2] += v;
      phase_n[(y % 2) * 2 + x % 2] += 1;
      total += v;
      n += 1;
    }
  }
  const double mean = total / n;
  double var = 0;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double d = map[static_cast<std::size_t>(y) * w + x] - mean;
      var += d * d;
    }
  }
  var /= n;
  double phase_mean[4];
  double pm = 0;
  for (int p = 0; p < 4; ++p) pm += (phase_mean[p] = phase_sum[p] / phase_n[p]);
  pm /= 4;
  double pvar = 0;
  for (double m : phase_mean) pvar += (m - pm) * (m - pm);
  pvar /= 4;
  return std::clamp(pvar / (var + 1e-8), 0.0, 1.0);
}

template <typename T>
double checkerboard_score(const Tensor<T>& f) {
  if (f.rank() != 4) throw std::invalid_argument("checkerboard_score: expected NCHW features");
  const std::size_t n = f.dim(0), c = f.dim(1), h = f.dim(2), w = f.dim(3);
  double acc = 0;
  std::vector<float> mean(h * w);
  for (std::size_t b = 0; b < n; ++b) {
    std::fill(mean.begin(), mean.end(), 0.f);
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T* plane = f.values().data() + (b * c + ch) * h * w;
      for (std::size_t i = 0; i < h * w; ++i) mean[i] += static_cast<float>(plane[i] / static_cast<T>(c));
    }
    acc += checkerboard_score(mean, static_cast<int>(h), static_cast<int>(w));
  }
  return acc / static_cast<double>(n);
}

template double checkerboard_score<float>(const Tensor<float>&);
template double checkerboard_score<double>(const Tensor<double>&);

}  // namespace posenas
