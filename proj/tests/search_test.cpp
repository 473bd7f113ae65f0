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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "posenas/arch/network.hpp"
#include "posenas/autograd/ops.hpp"
#include "posenas/cost/expected_cost.hpp"
#include "posenas/search/search.hpp"
#include "toy_task.hpp"

namespace posenas {
namespace {

constexpr testing::ToyTask kMicro{16, 4};

std::vector<std::vector<float>> snapshot(std::vector<NamedTensor<float>> tensors) {
  std::vector<std::vector<float>> out;
  for (auto& t : tensors) out.emplace_back(t.tensor.values().begin(), t.tensor.values().end());
  return out;
}

std::vector<std::vector<float>> alphas(Supernet<float>& net) {
  std::vector<std::vector<float>> out;
  for (auto& a : net.arch_parameters()) out.emplace_back(a.values().begin(), a.values().end());
  return out;
}

SearchSchedule micro_schedule(int warmup, int joint) {
  SearchSchedule s;
  s.warmup_epochs = warmup;
  s.joint_epochs = std::max(joint, 1);
  s.batch_size = 8;
  s.weight.lr = 0.05;
  s.arch.lr = 3e-3;
  s.seed = 7;
  return s;
}

struct Micro {
  SupernetConfig space = testing::toy_space(kMicro);
  Rng rng{3};
  Supernet<float> net = build_supernet<float>(space, rng);
  TensorDataset data = testing::toy_dataset(24, 5, kMicro);
  SplitDataset split = split_dataset(data.size(), 0.75, 1);
  CostTable table = testing::toy_table(space);
};

TEST(SplitTest, SizesAndPartition) {
  const auto s = split_dataset(10, 0.8, 4);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.val.size(), 2u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(*all.rbegin(), 9u);
}

TEST(SplitTest, SeedDeterminism) {
  const auto a = split_dataset(50, 0.8, 11), b = split_dataset(50, 0.8, 11), c = split_dataset(50, 0.8, 12);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_NE(a.train, c.train);
}

TEST(SplitTest, Rejects) {
  EXPECT_THROW(split_dataset(0, 0.8, 0), std::invalid_argument);
  EXPECT_THROW(split_dataset(10, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(split_dataset(10, 1.0, 0), std::invalid_argument);
}

TEST(SplitTest, BatchesCoverIndices) {
  std::vector<std::size_t> idx(10);
  std::iota(idx.begin(), idx.end(), 0);
  const auto b = shuffled_batches(idx, 4, 3);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].size(), 4u);
  EXPECT_EQ(b[2].size(), 2u);
  std::vector<std::size_t> flat;
  for (const auto& x : b) flat.insert(flat.end(), x.begin(), x.end());
  std::sort(flat.begin(), flat.end());
  EXPECT_EQ(flat, idx);
}

TEST(CosineTest, Endpoints) {
  EXPECT_DOUBLE_EQ(cosine_lr(0.4, 0, 11), 0.4);
  EXPECT_NEAR(cosine_lr(0.4, 10, 11), 0.0, 1e-15);
  EXPECT_NEAR(cosine_lr(0.4, 5, 11), 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(cosine_lr(0.4, 0, 1), 0.4);
  EXPECT_THROW(cosine_lr(0.4, 11, 11), std::out_of_range);
  EXPECT_THROW(cosine_lr(0.4, -1, 11), std::out_of_range);
}

TEST(CosineTest, MonotoneAndSymmetric) {
  const long n = 97;
  for (long t = 1; t < n; ++t) EXPECT_LE(cosine_lr(1.0, t, n), cosine_lr(1.0, t - 1, n));
  for (long t = 0; t < n; ++t) EXPECT_NEAR(cosine_lr(1.0, t, n) + cosine_lr(1.0, n - 1 - t, n), 1.0, 1e-12);
}

TEST(ClipTest, ScalesToNorm) {
  std::vector<Tensor<double>> ps{Tensor<double>(Shape{2}, true), Tensor<double>(Shape{1}, true)};
  ps[0].grad()[0] = 3;
  ps[0].grad()[1] = 0;
  ps[1].grad()[0] = 4;
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 10.0), 5.0);
  EXPECT_DOUBLE_EQ(ps[1].grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(clip_grad_norm(ps, 1.0), 5.0);
  EXPECT_NEAR(ps[0].grad()[0], 0.6, 1e-15);
  EXPECT_NEAR(ps[1].grad()[0], 0.8, 1e-15);
  EXPECT_NEAR(clip_grad_norm(ps, 0.0), 1.0, 1e-15);
}

TEST(TotalLossTest, MeanOverBatchOfSquaredNorms) {
  Micro m;
  // K = 1; sample squared norms 4 and 6
  Tensor<float> pred = Tensor<float>(Shape{2, 1, 32, 32});
  Tensor<float> target = Tensor<float>(Shape{2, 1, 32, 32});
  target.values()[0] = 2.0f;
  target.values()[1024] = 2.0f;
  target.values()[1025] = std::sqrt(2.0f);
  const auto loss = total_loss(pred, target, m.net, m.table, {0.0, 2.0});
  EXPECT_NEAR(loss.item(), 5.0f, 1e-5f);
}

TEST(TotalLossTest, RegularizerAtTauIsLambda) {
  Micro m;
  const double cost = expected_total_cost(m.net, m.table).item();
  Tensor<float> pred = Tensor<float>(Shape{1, 1, 32, 32});
  Tensor<float> target = Tensor<float>(Shape{1, 1, 32, 32});
  target.values()[5] = 3.0f;
  EXPECT_NEAR(total_loss(pred, target, m.net, m.table, {0.7, cost}).item(), 9.0f + 0.7f, 1e-4f);
  EXPECT_NEAR(total_loss(pred, target, m.net, m.table, {0.0, cost}).item(), 9.0f, 1e-5f);
  const double expected = 9.0 + 0.5 * std::log(cost) / std::log(3.0);
  EXPECT_NEAR(total_loss(pred, target, m.net, m.table, {0.5, 3.0}).item(), expected, 1e-4);
}

TEST(TotalLossTest, ShapeMismatchThrows) {
  Micro m;
  EXPECT_THROW(total_loss(Tensor<float>(Shape{1, 1, 32, 32}), Tensor<float>(Shape{1, 1, 16, 16}), m.net, m.table,
                          {0.1, 2.0}),
               std::invalid_argument);
}

TEST(ScheduleTest, Validation) {
  SearchSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.joint_epochs = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.drop_rate = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.batch_size = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.arch.lr = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  const auto full = SearchSchedule::full();
  EXPECT_EQ(full.warmup_epochs, 60);
  EXPECT_EQ(full.joint_epochs, 150);
}

TEST(EngineTest, ZeroWarmupLeavesWeights) {
  Micro m;
  const auto before = snapshot(m.net.state().parameters);
  SearchEngine<float> engine(m.net, m.data, m.split, m.table, micro_schedule(0, 1), {0.1, 2.0});
  engine.warmup_weights();
  EXPECT_EQ(snapshot(m.net.state().parameters), before);
  EXPECT_TRUE(engine.trace().records.empty());
}

TEST(EngineTest, WarmupLeavesAlpha) {
  Micro m;
  for (std::size_t l = 0; l < m.net.num_layers(); ++l) {
    auto a = m.net.layer(l).alpha().values();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.1f * static_cast<float>(i + 1);
  }
  const auto before = alphas(m.net);
  const auto weights = snapshot(m.net.state().parameters);
  SearchEngine<float> engine(m.net, m.data, m.split, m.table, micro_schedule(2, 1), {0.1, 2.0});
  engine.warmup_weights();
  EXPECT_EQ(alphas(m.net), before);
  EXPECT_NE(snapshot(m.net.state().parameters), weights);
  ASSERT_EQ(engine.trace().records.size(), 2u);
  for (const auto& r : engine.trace().records) EXPECT_EQ(r.phase, 'w');
}

TEST(EngineTest, PhasesTouchOnlyTheirParameters) {
  Micro m;
  SearchEngine<float> engine(m.net, m.data, m.split, m.table, micro_schedule(1, 2), {0.1, 2.0});
  engine.warmup_weights();
  auto state = m.net.state();
  const auto weights = snapshot(state.parameters), stats = snapshot(state.buffers);
  auto alpha = alphas(m.net);
  const auto ra = engine.arch_epoch();
  EXPECT_EQ(ra.phase, 'a');
  state = m.net.state();
  EXPECT_EQ(snapshot(state.parameters), weights);
  EXPECT_EQ(snapshot(state.buffers), stats);
  EXPECT_NE(alphas(m.net), alpha);
  alpha = alphas(m.net);
  const auto rw = engine.weight_epoch();
  EXPECT_EQ(rw.phase, 'w');
  EXPECT_EQ(alphas(m.net), alpha);
  EXPECT_NE(snapshot(m.net.state().parameters), weights);
}

TEST(EngineTest, TraceShapeAndProbabilities) {
  Micro m;
  SearchEngine<float> engine(m.net, m.data, m.split, m.table, micro_schedule(1, 2), {0.1, 2.0});
  engine.warmup_weights();
  engine.joint_search();
  const auto& tr = engine.trace();
  ASSERT_EQ(tr.records.size(), 5u);
  EXPECT_EQ(tr.records[0].phase, 'w');
  EXPECT_EQ(tr.records[1].phase, 'w');
  EXPECT_EQ(tr.records[2].phase, 'a');
  EXPECT_EQ(tr.records[4].epoch, 3);
  ASSERT_EQ(tr.snapshots.size(), 2u);
  for (const auto& s : tr.snapshots) {
    for (const auto& p : s.probs) EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
  }
  for (const auto& r : tr.records) {
    EXPECT_TRUE(std::isfinite(r.loss));
    EXPECT_GT(r.cost, 1.0);
  }
  EXPECT_EQ(engine.weight_steps_taken(), engine.total_weight_steps());
  const auto text = tr.to_text();
  EXPECT_NE(text.find("epoch 1 phase w"), std::string::npos);
  EXPECT_NE(text.find("probs 0 "), std::string::npos);
}

TEST(EngineTest, TraceIsReproducible) {
  Micro a, b;
  const auto ta = run_search(a.net, a.data, a.split, a.table, micro_schedule(1, 2), {0.1, 2.0});
  const auto tb = run_search(b.net, b.data, b.split, b.table, micro_schedule(1, 2), {0.1, 2.0});
  ASSERT_EQ(ta.records.size(), tb.records.size());
  for (std::size_t i = 0; i < ta.records.size(); ++i) {
    EXPECT_NEAR(ta.records[i].loss, tb.records[i].loss, 1e-5);
    EXPECT_NEAR(ta.records[i].cost, tb.records[i].cost, 1e-5);
  }
  EXPECT_EQ(alphas(a.net), alphas(b.net));
}

TEST(EngineTest, MissingCostThrowsBeforeTraining) {
  Micro m;
  CostTable partial(Benchmark::kFlops, "MFLOPs");
  partial.set(0, m.space.candidates[0], 1.0);
  const auto before = snapshot(m.net.state().parameters);
  EXPECT_THROW(SearchEngine<float>(m.net, m.data, m.split, partial, micro_schedule(1, 1), {0.1, 2.0}),
               std::out_of_range);
  EXPECT_EQ(snapshot(m.net.state().parameters), before);
}

TEST(EngineTest, JointBeforeWarmupThrows) {
  Micro m;
  SearchEngine<float> engine(m.net, m.data, m.split, m.table, micro_schedule(1, 1), {0.1, 2.0});
  EXPECT_THROW(engine.joint_search(), std::logic_error);
}

TEST(EngineTest, WarmupLossDecreases) {
  const testing::ToyTask task;
  const auto space = testing::toy_space(task);
  Rng rng(0);
  auto net = build_supernet<float>(space, rng);
  const auto data = testing::toy_dataset(160, 2, task);
  auto s = micro_schedule(5, 1);
  s.batch_size = 16;
  s.weight.lr = 0.2;
  SearchEngine<float> engine(net, data, split_dataset(data.size(), 0.8, 0), testing::toy_table(space), s, {0.0, 2.0});
  engine.warmup_weights();
  const auto& r = engine.trace().records;
  ASSERT_EQ(r.size(), 5u);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r[i].mse, r[i - 1].mse) << "epoch " << r[i].epoch;
}

TEST(EngineTest, HeavyCostPenaltyPicksCheaperOp) {
  Micro m;
  auto s = micro_schedule(1, 3);
  s.arch.lr = 0.2;
  const auto trace = run_search(m.net, m.data, m.split, m.table, s, {50.0, 2.0});
  // candidate 0 is the 3x3 op
  for (std::size_t e = 1; e < trace.snapshots.size(); ++e) {
    EXPECT_GT(trace.snapshots[e].probs[0][0], trace.snapshots[e - 1].probs[0][0]);
  }
  EXPECT_GT(m.net.layer(0).probs()[0], 0.5f);
  const auto desc = derive_architecture(m.net, m.space, &m.table);
  EXPECT_EQ(desc.layers[0].op, OpSpec::mbconv(3, 3));
}

TEST(RandomSearchTest, SampledArchitecturesAreValid) {
  const auto space = SupernetConfig::desk();
  Rng rng(9);
  for (int i = 0; i < 30; ++i) EXPECT_NO_THROW(sample_architecture(space, rng).validate(space.downsamplings));
}

TEST(RandomSearchTest, BestIsFirstMaximum) {
  const auto space = SupernetConfig::desk();
  std::vector<std::size_t> seen;
  const std::vector<double> scores{0.2, 0.7, 0.1, 0.7, 0.5};
  const auto r = random_search_baseline(space, 5, 4, [&](const ArchitectureDescriptor&, std::size_t i) {
    seen.push_back(i);
    return scores[i];
  });
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(r.best, 1u);
  EXPECT_EQ(r.scores, scores);
  for (double s : r.scores) EXPECT_GE(r.scores[r.best], s);
  EXPECT_EQ(r.best_architecture(), r.samples[1]);
}

TEST(RandomSearchTest, DeterministicAndEdgeCases) {
  const auto space = SupernetConfig::desk();
  auto score = [](const ArchitectureDescriptor& d, std::size_t) { return -to_mflops(flops_of(d).total()); };
  const auto a = random_search_baseline(space, 6, 21, score), b = random_search_baseline(space, 6, 21, score);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.best, b.best);
  const auto one = random_search_baseline(space, 1, 21, score);
  EXPECT_EQ(one.samples.size(), 1u);
  EXPECT_EQ(one.best, 0u);
  EXPECT_EQ(one.samples[0], a.samples[0]);
  EXPECT_THROW(random_search_baseline(space, 0, 21, score), std::invalid_argument);
}

}  // namespace
}  // namespace posenas
