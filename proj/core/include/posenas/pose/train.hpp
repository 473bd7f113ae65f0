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

#include <cstdint>
#include <string>
#include <vector>

#include "posenas/arch/network.hpp"
#include "posenas/pose/dataset.hpp"
#include "posenas/pose/heatmap.hpp"

namespace posenas {

/// Adam with a step decay of 0.1 at 75% and 85% of the epochs.
struct TrainOptions {
  int epochs = 20;
  int batch_size = 32;
  double lr = 1e-3;
  double sigma = 2.0;
  double pck_alpha = 0.2;
  std::uint64_t seed = 0;

  std::vector<int> milestones() const;
};

struct EpochMetrics {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;  // mean heatmap MSE over the epoch's batches
  double val_pck = 0;     // -1 without a validation set
};

struct TrainTrace {
  double initial_loss = 0;  // MSE over the training set before any update, batch statistics
  std::vector<EpochMetrics> epochs;

  std::string to_text() const;
};

/// Trains in place. `val` may be empty.
template <typename T>
TrainTrace train_derived(Network<T>& net, const std::vector<KeypointSample>& train,
                         const std::vector<KeypointSample>& val, const TrainOptions& opts);

/// Inference with running statistics; decoded keypoints per sample.
template <typename T>
std::vector<std::vector<Prediction>> predict(Network<T>& net, const std::vector<KeypointSample>& samples,
                                             int batch_size = 32);

template <typename T>
double evaluate_pck(Network<T>& net, const std::vector<KeypointSample>& samples, double alpha = 0.2);

/// Mean heatmap MSE of `net` over `data`. Leaves the network in `mode`.
template <typename T>
double evaluate_loss(Network<T>& net, const TensorDataset& data, int batch_size = 32,
                     NormMode mode = NormMode::kRunningStats);

/// Mean checkerboard score of the head's post-SIC features (post-deconv when
/// SIC is off) over `samples`.
template <typename T>
double feature_checkerboard(Network<T>& net, const std::vector<KeypointSample>& samples, int batch_size = 32);

}  // namespace posenas
