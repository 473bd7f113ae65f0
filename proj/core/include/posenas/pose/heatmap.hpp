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

#include <span>
#include <vector>

#include "posenas/autograd/tensor.hpp"
#include "posenas/pose/dataset.hpp"
#include "posenas/search/data.hpp"

namespace posenas {

/// K x size x size Gaussian maps, row-major. Keypoints are scaled by
/// size / image width; values beyond 3 sigma are exactly 0 and invisible
/// keypoints give all-zero maps.
std::vector<float> heatmap_targets(const KeypointSample& sample, int output_size, double sigma = 2.0);

/// Image pixels as CHW floats in [-0.5, 0.5].
std::vector<float> image_to_input(const Image& image);

/// Inputs and heatmap targets for training; output resolution is input / 4.
TensorDataset to_tensor_dataset(const std::vector<KeypointSample>& samples, double sigma = 2.0);

struct Prediction {
  double x = 0;
  double y = 0;
  double confidence = 0;
};

/// Per-channel argmax of K x h x w maps (lowest row-major index on ties),
/// scaled by `stride` back to input pixels. Negative peaks report 0.
std::vector<Prediction> decode_keypoints(std::span<const float> heatmaps, int keypoints, int h, int w,
                                         double stride = 4.0);

/// Fraction of visible keypoints within alpha * max(bbox w, bbox h) of the
/// ground truth. `preds[i]` belongs to `samples[i]`.
double pck(const std::vector<std::vector<Prediction>>& preds, const std::vector<KeypointSample>& samples,
           double alpha = 0.2);

/// Periodic-artifact score of one H x W map in [0, 1]: variance of the four
/// stride-2 phase means over the variance of all pixels (+1e-8), on the
/// interior with a 1-pixel border removed. H and W must be even and >= 4.
double checkerboard_score(std::span<const float> map, int h, int w);

/// The same score on the channel mean of an NCHW feature tensor, averaged
/// over the batch.
template <typename T>
double checkerboard_score(const Tensor<T>& features);

}  // namespace posenas
