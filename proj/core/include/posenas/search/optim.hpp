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

#include <vector>

#include "posenas/autograd/tensor.hpp"

namespace posenas {

struct SgdConfig {
  double lr = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-4;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// v = m v + (g + wd w);  w -= lr v
template <typename T>
class Sgd {
 public:
  Sgd(std::vector<Tensor<T>> params, SgdConfig cfg);

  void step(double lr);
  void zero_grad();
  std::vector<Tensor<T>>& params() { return params_; }
  const SgdConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor<T>> params_;
  std::vector<std::vector<T>> velocity_;
  SgdConfig cfg_;
};

/// Bias-corrected Adam.
template <typename T>
class Adam {
 public:
  Adam(std::vector<Tensor<T>> params, AdamConfig cfg);

  void step(double lr);
  void step() { step(cfg_.lr); }
  void zero_grad();
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor<T>> params_;
  std::vector<std::vector<T>> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

/// Rescales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping; `max_norm <= 0` only measures.
template <typename T>
double clip_grad_norm(std::vector<Tensor<T>>& params, double max_norm);

/// 0.5 lr0 (1 + cos(pi t / (total - 1))); lr0 for total == 1.
double cosine_lr(double lr0, long step, long total_steps);

/// lr0 * factor^(number of milestones <= epoch).
double step_lr(double lr0, int epoch, const std::vector<int>& milestones, double factor = 0.1);

extern template class Sgd<float>;
extern template class Sgd<double>;
extern template class Adam<float>;
extern template class Adam<double>;

}  // namespace posenas
