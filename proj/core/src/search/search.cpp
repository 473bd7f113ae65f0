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

#include "posenas/search/search.hpp"

#include <cmath>
#include <stdexcept>

#include "posenas/autograd/ops.hpp"
#include "posenas/autograd/tape.hpp"

namespace posenas {

SearchSchedule SearchSchedule::full() {
  SearchSchedule s;
  s.warmup_epochs = 60;
  s.joint_epochs = 150;
  return s;
}

void SearchSchedule::validate() const {
  if (warmup_epochs < 0) throw std::invalid_argument("schedule: warmup epochs must be >= 0");
  if (joint_epochs < 1) throw std::invalid_argument("schedule: joint epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("schedule: batch size must be >= 1");
  if (!(weight.lr > 0) || !(arch.lr > 0)) throw std::invalid_argument("schedule: learning rates must be > 0");
  if (!(drop_rate >= 0 && drop_rate < 1)) throw std::invalid_argument("schedule: drop rate must lie in [0, 1)");
  if (std::isnan(grad_clip)) throw std::invalid_argument("schedule: grad clip must be a number");
}

template <typename T>
Tensor<T> total_loss(const Tensor<T>& pred, const Tensor<T>& target, const Supernet<T>& net, const CostTable& table,
                     const RegularizerConfig& reg) {
  if (pred.shape() != target.shape()) {
    throw std::invalid_argument("total_loss: prediction " + shape_str(pred.shape()) + " vs target " +
                                shape_str(target.shape()));
  }
  return add(mse(pred, target), cost_regularizer(expected_total_cost(net, table), reg));
}

std::string SearchTrace::to_text() const {
  std::string out;
  std::size_t snap = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out += "epoch " + std::to_string(r.epoch) + " phase " + r.phase + " loss " + format_double(r.loss) + " mse " +
           format_double(r.mse) + " cost " + format_double(r.cost) + "\n";
    const bool epoch_ends = i + 1 == records.size() || records[i + 1].epoch != r.epoch;
    while (epoch_ends && snap < snapshots.size() && snapshots[snap].epoch == r.epoch) {
      const auto& s = snapshots[snap++];
      for (std::size_t l = 0; l < s.probs.size(); ++l) {
        out += "probs " + std::to_string(l);
        for (double p : s.probs[l]) out += " " + format_double(p);
        out += "\n";
      }
    }
  }
  return out;
}

template <typename T>
SearchEngine<T>::SearchEngine(Supernet<T>& net, const TensorDataset& data, SplitDataset split, const CostTable& table,
                              SearchSchedule schedule, RegularizerConfig reg)
    : net_(net),
      data_(data),
      split_(std::move(split)),
      table_(table),
      schedule_(schedule),
      reg_(reg),
      weights_(net.weight_parameters(), schedule.weight),
      arch_(net.arch_parameters(), schedule.arch),
      rng_(schedule.seed) {
  schedule_.validate();
  reg_.validate();
  check_table_covers(net_, table_);
  if (split_.train.empty() || split_.val.empty()) throw std::invalid_argument("search: both splits must be non-empty");
  const auto b = static_cast<std::size_t>(schedule_.batch_size);
  const long per_epoch = static_cast<long>((split_.train.size() + b - 1) / b);
  total_weight_steps_ = per_epoch * (schedule_.warmup_epochs + schedule_.joint_epochs);
}

template <typename T>
std::uint64_t SearchEngine<T>::next_seed() {
  return rng_();
}

template <typename T>
double SearchEngine<T>::expected_cost_value() const {
  return static_cast<double>(expected_total_cost(net_, table_).item());
}

template <typename T>
TraceRecord SearchEngine<T>::weight_epoch() {
  net_.set_norm_mode(NormMode::kBatchStats);
  const double reg_value =
      static_cast<double>(cost_regularizer(expected_total_cost(net_, table_), reg_).item());
  double mse_sum = 0;
  std::size_t seen = 0;
  for (const auto& batch : shuffled_batches(split_.train, static_cast<std::size_t>(schedule_.batch_size), next_seed())) {
    auto [x, y] = make_batch<T>(data_, batch);
    Tape<T> tape;
    Tensor<T> loss, per_pixel;
    {
      TapeScope<T> scope(tape);
      loss = mse(net_.forward_sampled(x, schedule_.drop_rate, rng_), y);
      // SGD sees the per-pixel mean so its learning rate is resolution independent.
      per_pixel = scale(loss, static_cast<T>(1.0 / static_cast<double>(y.dim(2) * y.dim(3))));
    }
    weights_.zero_grad();
    tape.backward(per_pixel);
    clip_grad_norm(weights_.params(), schedule_.grad_clip);
    weights_.step(cosine_lr(schedule_.weight.lr, weight_step_++, total_weight_steps_));
    mse_sum += static_cast<double>(loss.item()) * static_cast<double>(batch.size());
    seen += batch.size();
  }
  const double m = mse_sum / static_cast<double>(seen);
  return {epoch_, 'w', m + reg_value, m, expected_cost_value()};
}

template <typename T>
TraceRecord SearchEngine<T>::arch_epoch() {
  net_.set_norm_mode(NormMode::kBatchStatsFrozen);
  double mse_sum = 0, loss_sum = 0;
  std::size_t seen = 0;
  for (const auto& batch : shuffled_batches(split_.val, static_cast<std::size_t>(schedule_.batch_size), next_seed())) {
    auto [x, y] = make_batch<T>(data_, batch);
    Tape<T> tape;
    Tensor<T> m, loss;
    {
      TapeScope<T> scope(tape);
      m = mse(net_.forward(x), y);
      loss = add(m, cost_regularizer(expected_total_cost(net_, table_), reg_));
    }
    arch_.zero_grad();
    tape.backward(loss);
    arch_.step();
    mse_sum += static_cast<double>(m.item()) * static_cast<double>(batch.size());
    loss_sum += static_cast<double>(loss.item()) * static_cast<double>(batch.size());
    seen += batch.size();
  }
  // Weight gradients accumulated by this pass are never applied.
  weights_.zero_grad();
  const double n = static_cast<double>(seen);
  return {epoch_, 'a', loss_sum / n, mse_sum / n, expected_cost_value()};
}

template <typename T>
void SearchEngine<T>::warmup_weights() {
  for (; warmup_done_ < schedule_.warmup_epochs; ++warmup_done_) {
    ++epoch_;
    trace_.records.push_back(weight_epoch());
  }
}

template <typename T>
void SearchEngine<T>::joint_search() {
  if (warmup_done_ < schedule_.warmup_epochs) throw std::logic_error("joint_search: warmup has not run");
  for (int e = 0; e < schedule_.joint_epochs; ++e) {
    ++epoch_;
    trace_.records.push_back(weight_epoch());
    trace_.records.push_back(arch_epoch());
    ProbSnapshot snap{epoch_, {}};
    for (std::size_t l = 0; l < net_.num_layers(); ++l) {
      const auto p = net_.layer(l).probs();
      snap.probs.emplace_back(p.values().begin(), p.values().end());
    }
    trace_.snapshots.push_back(std::move(snap));
  }
}

template <typename T>
SearchTrace run_search(Supernet<T>& net, const TensorDataset& data, const SplitDataset& split, const CostTable& table,
                       const SearchSchedule& schedule, const RegularizerConfig& reg) {
  SearchEngine<T> engine(net, data, split, table, schedule, reg);
  engine.warmup_weights();
  engine.joint_search();
  return engine.trace();
}

ArchitectureDescriptor sample_architecture(const SupernetConfig& space, Rng& rng) {
  space.validate();
  ArchitectureDescriptor d;
  d.input_h = d.input_w = space.input_size;
  d.stem = space.stem;
  d.head = space.head;
  for (const auto& g : space.layers()) {
    auto ops = space.candidates;
    if (space.allow_skip && g.skip_admissible()) ops.push_back(OpSpec::skip());
    std::uniform_int_distribution<std::size_t> pick(0, ops.size() - 1);
    const OpSpec op = ops[pick(rng)];
    d.layers.push_back({g.index, g.stage, op, op.is_skip() ? 0 : g.out_channels, op.is_skip() ? 1 : g.stride});
  }
  d.validate(space.downsamplings);
  return d;
}

RandomSearchResult random_search_baseline(const SupernetConfig& space, int n, std::uint64_t seed,
                                          const ArchEvaluator& evaluate) {
  if (n < 1) throw std::invalid_argument("random_search_baseline: n must be >= 1");
  Rng rng(seed);
  RandomSearchResult r;
  for (int i = 0; i < n; ++i) r.samples.push_back(sample_architecture(space, rng));
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    r.scores.push_back(evaluate(r.samples[i], i));
    if (r.scores[i] > r.scores[r.best]) r.best = i;
  }
  return r;
}

template class SearchEngine<float>;
template class SearchEngine<double>;
template Tensor<float> total_loss<float>(const Tensor<float>&, const Tensor<float>&, const Supernet<float>&,
                                         const CostTable&, const RegularizerConfig&);
template Tensor<double> total_loss<double>(const Tensor<double>&, const Tensor<double>&, const Supernet<double>&,
                                           const CostTable&, const RegularizerConfig&);
template SearchTrace run_search<float>(Supernet<float>&, const TensorDataset&, const SplitDataset&, const CostTable&,
                                       const SearchSchedule&, const RegularizerConfig&);
template SearchTrace run_search<double>(Supernet<double>&, const TensorDataset&, const SplitDataset&, const CostTable&,
                                        const SearchSchedule&, const RegularizerConfig&);

}  // namespace posenas
