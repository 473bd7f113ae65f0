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

#include "posenas/pose/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "posenas/autograd/ops.hpp"
#include "posenas/autograd/tape.hpp"
#include "posenas/cost/cost_table.hpp"
#include "posenas/search/optim.hpp"

namespace posenas {
namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

template <typename F>
void for_batches(std::size_t n, int batch_size, F&& f) {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  const auto idx = all_indices(n);
  const auto b = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < n; i += b) {
    f(std::span<const std::size_t>(idx.data() + i, std::min(b, n - i)));
  }
}

}  // namespace

std::vector<int> TrainOptions::milestones() const {
  return {static_cast<int>(std::lround(0.75 * epochs)), static_cast<int>(std::lround(0.85 * epochs))};
}

std::string TrainTrace::to_text() const {
  std::string out = "initial loss " + format_double(initial_loss) + "\n";
  for (const auto& e : epochs) {
    out += "epoch " + std::to_string(e.epoch) + " lr " + format_double(e.lr) + " loss " + format_double(e.train_loss) +
           " val_pck " + format_double(e.val_pck) + "\n";
  }
  return out;
}

template <typename T>
double evaluate_loss(Network<T>& net, const TensorDataset& data, int batch_size, NormMode mode) {
  net.set_norm_mode(mode);
  double acc = 0;
  for_batches(data.size(), batch_size, [&](std::span<const std::size_t> batch) {
    auto [x, y] = make_batch<T>(data, batch);
    acc += static_cast<double>(mse(net.forward(x), y).item()) * static_cast<double>(batch.size());
  });
  return acc / static_cast<double>(data.size());
}

template <typename T>
std::vector<std::vector<Prediction>> predict(Network<T>& net, const std::vector<KeypointSample>& samples, int batch_size) {
  if (samples.empty()) return {};
  net.set_norm_mode(NormMode::kRunningStats);
  const auto data = to_tensor_dataset(samples);
  std::vector<std::vector<Prediction>> out;
  for_batches(data.size(), batch_size, [&](std::span<const std::size_t> batch) {
    auto [x, y] = make_batch<T>(data, batch);
    const auto hm = net.forward(x);
    const std::size_t k = hm.dim(1), h = hm.dim(2), w = hm.dim(3);
    const double stride = static_cast<double>(x.dim(2)) / static_cast<double>(h);
    std::vector<float> buf(k * h * w);
    for (std::size_t b = 0; b < batch.size(); ++b) {
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(hm[b * buf.size() + i]);
      out.push_back(decode_keypoints(buf, static_cast<int>(k), static_cast<int>(h), static_cast<int>(w), stride));
    }
  });
  return out;
}

template <typename T>
double evaluate_pck(Network<T>& net, const std::vector<KeypointSample>& samples, double alpha) {
  return pck(predict(net, samples), samples, alpha);
}

template <typename T>
double feature_checkerboard(Network<T>& net, const std::vector<KeypointSample>& samples, int batch_size) {
  net.set_norm_mode(NormMode::kRunningStats);
  const auto data = to_tensor_dataset(samples);
  double acc = 0;
  for_batches(data.size(), batch_size, [&](std::span<const std::size_t> batch) {
    auto [x, y] = make_batch<T>(data, batch);
    HeadFeatures<T> f;
    net.forward(x, &f);
    acc += checkerboard_score(f.post_sic) * static_cast<double>(batch.size());
  });
  return acc / static_cast<double>(data.size());
}

template <typename T>
TrainTrace train_derived(Network<T>& net, const std::vector<KeypointSample>& train,
                         const std::vector<KeypointSample>& val, const TrainOptions& opts) {
  if (opts.epochs < 0) throw std::invalid_argument("train_derived: epochs must be >= 0");
  if (train.empty()) throw std::invalid_argument("train_derived: empty training set");
  const auto data = to_tensor_dataset(train, opts.sigma);
  TrainTrace trace;
  trace.initial_loss = evaluate_loss(net, data, opts.batch_size, NormMode::kBatchStatsFrozen);
  if (opts.epochs == 0) return trace;
  Adam<T> adam(net.parameters(), AdamConfig{opts.lr, 0.9, 0.999, 1e-8});
  Rng rng(opts.seed);
  const auto milestones = opts.milestones();
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    net.set_norm_mode(NormMode::kBatchStats);
    const double lr = step_lr(opts.lr, epoch, milestones);
    double acc = 0;
    for (const auto& batch : shuffled_batches(all_indices(data.size()), static_cast<std::size_t>(opts.batch_size), rng())) {
      auto [x, y] = make_batch<T>(data, batch);
      Tape<T> tape;
      Tensor<T> loss;
      {
        TapeScope<T> scope(tape);
        loss = mse(net.forward(x), y);
      }
      adam.zero_grad();
      tape.backward(loss);
      adam.step(lr);
      acc += static_cast<double>(loss.item()) * static_cast<double>(batch.size());
    }
    EpochMetrics m{epoch + 1, lr, acc / static_cast<double>(data.size()), -1};
    if (!val.empty()) m.val_pck = evaluate_pck(net, val, opts.pck_alpha);
    trace.epochs.push_back(m);
  }
  net.set_norm_mode(NormMode::kRunningStats);
  return trace;
}

#define POSENAS_INSTANTIATE(T)                                                                                 \
  template TrainTrace train_derived<T>(Network<T>&, const std::vector<KeypointSample>&,                        \
                                       const std::vector<KeypointSample>&, const TrainOptions&);               \
  template std::vector<std::vector<Prediction>> predict<T>(Network<T>&, const std::vector<KeypointSample>&, int); \
  template double evaluate_pck<T>(Network<T>&, const std::vector<KeypointSample>&, double);                   \
  template double evaluate_loss<T>(Network<T>&, const TensorDataset&, int, NormMode);                               \
  template double feature_checkerboard<T>(Network<T>&, const std::vector<KeypointSample>&, int);

POSENAS_INSTANTIATE(float)
POSENAS_INSTANTIATE(double)

}  // namespace posenas
