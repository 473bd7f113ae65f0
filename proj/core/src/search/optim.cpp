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

#include "posenas/search/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace posenas {
namespace {

template <typename T>
void require_grads(const std::vector<Tensor<T>>& params, const char* who) {
  for (const auto& p : params) {
    if (!p.requires_grad()) throw std::invalid_argument(std::string(who) + ": parameter without gradient");
  }
}

}  // namespace

template <typename T>
Sgd<T>::Sgd(std::vector<Tensor<T>> params, SgdConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  require_grads(params_, "Sgd");
  if (cfg_.momentum < 0 || cfg_.weight_decay < 0) throw std::invalid_argument("Sgd: negative momentum or weight decay");
  for (const auto& p : params_) velocity_.emplace_back(p.numel(), T(0));
}

template <typename T>
void Sgd<T>::step(double lr) {
  const T m = static_cast<T>(cfg_.momentum), wd = static_cast<T>(cfg_.weight_decay), a = static_cast<T>(lr);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto w = params_[i].values();
    auto g = params_[i].grad();
    auto& v = velocity_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      v[j] = m * v[j] + g[j] + wd * w[j];
      w[j] -= a * v[j];
    }
  }
}

template <typename T>
double clip_grad_norm(std::vector<Tensor<T>>& params, double max_norm) {
  double sq = 0;
  for (auto& p : params) {
    for (T g : p.grad()) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const T f = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      for (T& g : p.grad()) g *= f;
    }
  }
  return norm;
}

template double clip_grad_norm<float>(std::vector<Tensor<float>>&, double);
template double clip_grad_norm<double>(std::vector<Tensor<double>>&, double);

template <typename T>
void Sgd<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

template <typename T>
Adam<T>::Adam(std::vector<Tensor<T>> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  require_grads(params_, "Adam");
  if (!(cfg_.beta1 >= 0 && cfg_.beta1 < 1 && cfg_.beta2 >= 0 && cfg_.beta2 < 1)) {
    throw std::invalid_argument("Adam: betas must lie in [0, 1)");
  }
  for (const auto& p : params_) {
    m_.emplace_back(p.numel(), T(0));
    v_.emplace_back(p.numel(), T(0));
  }
}

template <typename T>
void Adam<T>::step(double lr) {
  ++t_;
  const double c1 = 1 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1 - std::pow(cfg_.beta2, static_cast<double>(t_));
  const T b1 = static_cast<T>(cfg_.beta1), b2 = static_cast<T>(cfg_.beta2);
  const T step = static_cast<T>(lr / c1), root_c2 = static_cast<T>(std::sqrt(c2)), eps = static_cast<T>(cfg_.eps);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto w = params_[i].values();
    auto g = params_[i].grad();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (1 - b1) * g[j];
      v[j] = b2 * v[j] + (1 - b2) * g[j] * g[j];
      w[j] -= step * m[j] / (std::sqrt(v[j]) / root_c2 + eps);
    }
  }
}

template <typename T>
void Adam<T>::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

double cosine_lr(double lr0, long step, long total_steps) {
  if (total_steps < 1 || step < 0 || step >= total_steps) throw std::out_of_range("cosine_lr: step outside schedule");
  if (total_steps == 1) return lr0;
  const double phase = static_cast<double>(step) / static_cast<double>(total_steps - 1);
  return 0.5 * lr0 * (1 + std::cos(std::numbers::pi * phase));
}

double step_lr(double lr0, int epoch, const std::vector<int>& milestones, double factor) {
  double lr = lr0;
  for (int m : milestones) {
    if (epoch >= m) lr *= factor;
  }
  return lr;
}

template class Sgd<float>;
template class Sgd<double>;
template class Adam<float>;
template class Adam<double>;

}  // namespace posenas
