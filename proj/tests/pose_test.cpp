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

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "posenas/cost/flops.hpp"
#include "posenas/nn/conv.hpp"
#include "posenas/pose/ablation.hpp"
#include "posenas/pose/config.hpp"
#include "posenas/pose/heatmap.hpp"
#include "posenas/pose/model_io.hpp"
#include "posenas/pose/pipeline.hpp"
#include "posenas/pose/train.hpp"

namespace posenas {
namespace {

namespace fs = std::filesystem;

constexpr const char* kTinyArch = R"(efficientpose-arch v1
input 32 32 3
stem conv3 8 s2 ; sepdepth3 8 s1
layer 0 stage 1 mbconv k3 e3 w8 s2
layer 1 stage 2 mbconv k5 e3 w12 s2
layer 2 stage 3 skip
layer 3 stage 3 mbconv k3 e6 w16 s2
head tconv 8 tconv 8 sic 1 style plain k 4
)";

ArchitectureDescriptor tiny_arch() { return parse_architecture(kTinyArch); }

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("posenas_pose_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

KeypointSample blank_sample(int size, std::vector<Keypoint> kps) {
  KeypointSample s;
  s.id = "s";
  s.image = Image(size, size, 3);
  s.keypoints = std::move(kps);
  s.bbox = {0, 0, static_cast<double>(size), static_cast<double>(size)};
  return s;
}

TEST(HeatmapTest, PeakAndSigmaRing) {
  const auto s = blank_sample(64, {{32, 20, 1}});
  const auto m = heatmap_targets(s, 16, 2.0);
  ASSERT_EQ(m.size(), 256u);
  // (32, 20) in a 64 image is (8, 5) on the 16 grid
  EXPECT_FLOAT_EQ(m[5 * 16 + 8], 1.0f);
  EXPECT_NEAR(m[5 * 16 + 10], std::exp(-0.5), 1e-6);
  EXPECT_NEAR(m[7 * 16 + 8], std::exp(-0.5), 1e-6);
  for (float v : m) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  // beyond 3 sigma
  EXPECT_EQ(m[5 * 16 + 15], 0.0f);
}

TEST(HeatmapTest, InvisibleIsZero) {
  const auto s = blank_sample(32, {{10, 10, 0}, {5, 5, 1}});
  const auto m = heatmap_targets(s, 8, 2.0);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(m[i], 0.0f);
  EXPECT_GT(*std::max_element(m.begin() + 64, m.end()), 0.0f);
  EXPECT_THROW(heatmap_targets(s, 8, 0.0), std::invalid_argument);
}

TEST(DecodeTest, ArgmaxScaledByStride) {
  std::vector<float> maps(2 * 6 * 8, 0.0f);
  maps[3 * 8 + 5] = 0.9f;
  maps[48 + 1 * 8 + 2] = -0.3f;
  for (std::size_t i = 48; i < maps.size(); ++i) maps[i] = -1.0f;
  maps[48 + 1 * 8 + 2] = -0.3f;
  const auto p = decode_keypoints(maps, 2, 6, 8, 4.0);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[0].x, 20.0);
  EXPECT_DOUBLE_EQ(p[0].y, 12.0);
  EXPECT_NEAR(p[0].confidence, 0.9, 1e-7);
  EXPECT_DOUBLE_EQ(p[1].x, 8.0);
  EXPECT_DOUBLE_EQ(p[1].confidence, 0.0);
  EXPECT_THROW(decode_keypoints(maps, 3, 6, 8), std::invalid_argument);
}

TEST(DecodeTest, TiesAndZeroMaps) {
  std::vector<float> maps(16, 0.0f);
  auto p = decode_keypoints(maps, 1, 4, 4);
  EXPECT_DOUBLE_EQ(p[0].x, 0.0);
  EXPECT_DOUBLE_EQ(p[0].y, 0.0);
  EXPECT_DOUBLE_EQ(p[0].confidence, 0.0);
  maps[6] = maps[9] = 0.5f;
  p = decode_keypoints(maps, 1, 4, 4, 1.0);
  EXPECT_DOUBLE_EQ(p[0].x, 2.0);
  EXPECT_DOUBLE_EQ(p[0].y, 1.0);
}

TEST(DecodeTest, RecoversTargetsWithinStride) {
  const auto data = synth_dataset(20, 64, 8, 3);
  for (const auto& s : data) {
    const auto m = heatmap_targets(s, 16, 2.0);
    const auto p = decode_keypoints(m, 8, 16, 16, 4.0);
    for (std::size_t k = 0; k < 8; ++k) {
      EXPECT_LE(std::hypot(p[k].x - s.keypoints[k].x, p[k].y - s.keypoints[k].y), 4.0) << s.id << " joint " << k;
    }
  }
}

TEST(PckTest, Example) {
  auto s = blank_sample(64, {{10, 10, 1}, {30, 30, 1}, {50, 50, 0}});
  s.bbox = {5, 5, 10, 20};  // threshold 0.2 * 20 = 4
  const std::vector<std::vector<Prediction>> p{{{13, 10, 1}, {30, 35, 1}, {0, 0, 0}}};
  EXPECT_DOUBLE_EQ(pck(p, {s}, 0.2), 0.5);
  EXPECT_DOUBLE_EQ(pck(p, {s}, 0.25), 1.0);
  EXPECT_DOUBLE_EQ(pck(p, {s}, 0.1), 0.0);
}

TEST(PckTest, MonotoneInAlpha) {
  const auto data = synth_dataset(10, 64, 6, 8);
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 64);
  std::vector<std::vector<Prediction>> preds;
  for (const auto& s : data) {
    std::vector<Prediction> p;
    for (std::size_t k = 0; k < s.keypoints.size(); ++k) p.push_back({u(gen), u(gen), 1});
    preds.push_back(p);
  }
  double last = 0;
  for (double a = 0.05; a <= 1.0; a += 0.05) {
    const double v = pck(preds, data, a);
    EXPECT_GE(v, last);
    last = v;
  }
}

TEST(PckTest, Rejects) {
  const auto s = blank_sample(32, {{4, 4, 1}});
  const std::vector<std::vector<Prediction>> p{{{4, 4, 1}}};
  EXPECT_THROW(pck(p, {s}, 0.0), std::invalid_argument);
  EXPECT_THROW(pck(p, {s}, 1.5), std::invalid_argument);
  EXPECT_THROW(pck({}, {s}, 0.2), std::invalid_argument);
  EXPECT_THROW(pck({{}}, {s}, 0.2), std::invalid_argument);
  const auto hidden = blank_sample(32, {{4, 4, 0}});
  EXPECT_THROW(pck(p, {hidden}, 0.2), std::invalid_argument);
}

std::vector<float> coverage_window(int k) {
  const auto g = transposed_overlap_pattern(k, 2, 12);
  // an 18 x 18 window whose 1-pixel border is the only part outside the interior
  const int begin = g.interior_begin - 1;
  std::vector<float> out;
  for (int r = begin; r < begin + 18; ++r) {
    for (int c = begin; c < begin + 18; ++c) out.push_back(static_cast<float>(g.at(r, c)));
  }
  return out;
}

TEST(CheckerboardTest, Examples) {
  EXPECT_DOUBLE_EQ(checkerboard_score(std::vector<float>(64, 3.0f), 8, 8), 0.0);
  std::vector<float> periodic(64);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) periodic[y * 8 + x] = static_cast<float>((y % 2) * 2 + x % 2);
  }
  EXPECT_NEAR(checkerboard_score(periodic, 8, 8), 1.0, 1e-6);
  EXPECT_GT(checkerboard_score(coverage_window(3), 18, 18), 0.5);
  EXPECT_LT(checkerboard_score(coverage_window(4), 18, 18), 0.05);
}

TEST(CheckerboardTest, NoiseIsLowAndShapesChecked) {
  std::mt19937_64 gen(5);
  std::normal_distribution<float> n;
  std::vector<float> noise(64 * 64);
  for (auto& v : noise) v = n(gen);
  EXPECT_LT(checkerboard_score(noise, 64, 64), 0.01);
  EXPECT_THROW(checkerboard_score(noise, 63, 65), std::invalid_argument);
  EXPECT_THROW(checkerboard_score(std::vector<float>(4), 2, 2), std::invalid_argument);
}

TEST(SynthTest, DeterministicPerIndex) {
  const auto a = synth_dataset(5, 64, 8, 11), b = synth_dataset(3, 64, 8, 11), c = synth_dataset(3, 64, 8, 12);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a[i], b[i]);
  EXPECT_NE(a[0].image, c[0].image);
}

TEST(SynthTest, BoundsAndSkeleton) {
  const auto data = synth_dataset(50, 64, 8, 4);
  for (const auto& s : data) {
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.image.width, 64);
    for (const auto& k : s.keypoints) {
      EXPECT_EQ(k.visible, 1);
      EXPECT_GE(k.x, s.bbox.x - 1e-9);
      EXPECT_LE(k.x, s.bbox.x + s.bbox.w + 1e-9);
      EXPECT_GE(k.y, s.bbox.y - 1e-9);
      EXPECT_LE(k.y, s.bbox.y + s.bbox.h + 1e-9);
    }
  }
  EXPECT_EQ(synth_parent(1), 0);
  EXPECT_EQ(synth_parent(6), 2);
  EXPECT_THROW(synth_dataset(0, 64, 8, 0), std::invalid_argument);
  EXPECT_THROW(synth_dataset(4, 8, 8, 0), std::invalid_argument);
}

TEST(SynthTest, GenerationIsFast) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = synth_dataset(1000, 64, 8, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(data.size(), 1000u);
  EXPECT_LT(secs, 10.0);
}

TEST(AnnotationTest, RoundTrip) {
  auto data = synth_dataset(4, 32, 6, 2);
  const auto dir = scratch_dir("roundtrip");
  const auto ann = save_dataset(data, dir);
  const auto back = load_annotations(ann);
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(back[i], data[i]);
  fs::remove_all(dir);
}

TEST(AnnotationTest, RejectsBadRecords) {
  auto data = synth_dataset(2, 32, 4, 2);
  const auto dir = scratch_dir("reject");
  const auto ann = save_dataset(data, dir);
  std::ifstream in(ann);
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  in.close();
  auto write = [&](const std::string& text) { std::ofstream(ann, std::ios::trunc) << text; };
  auto line_of = [&]() -> int {
    try {
      load_annotations(ann);
    } catch (const AnnotationError& e) {
      return e.line();
    }
    return -1;
  };
  auto moved = l2;
  const auto pos = moved.find("\"keypoints\":[[");
  ASSERT_NE(pos, std::string::npos);
  moved.insert(pos + 14, "100");
  write(l1 + "\n" + moved + "\n");
  EXPECT_EQ(line_of(), 2);
  write(l1 + "\n{\"id\":\"x\"\n");
  EXPECT_EQ(line_of(), 2);
  write("");
  try {
    load_annotations(ann);
    FAIL() << "empty file accepted";
  } catch (const AnnotationError& e) {
    EXPECT_NE(std::string(e.what()).find("no samples"), std::string::npos);
  }
  EXPECT_THROW(load_annotations(dir / "missing.jsonl"), AnnotationError);
  fs::remove_all(dir);
}

TEST(ModelIoTest, ByteExactRoundTrip) {
  Rng rng(4);
  Network<float> net(tiny_arch(), rng);
  const auto bytes = serialize_model(net);
  auto back = parse_model<float>(bytes);
  EXPECT_EQ(serialize_model(back), bytes);
  EXPECT_EQ(back.descriptor(), net.descriptor());
  net.set_norm_mode(NormMode::kRunningStats);
  back.set_norm_mode(NormMode::kRunningStats);
  Tensor<float> x(Shape{1, 3, 32, 32});
  for (std::size_t i = 0; i < x.values().size(); ++i) x.values()[i] = std::sin(static_cast<float>(i));
  const auto a = net.forward(x), b = back.forward(x);
  ASSERT_EQ(a.shape(), (Shape{1, 4, 8, 8}));
  for (std::size_t i = 0; i < a.values().size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
}

TEST(ModelIoTest, RejectsCorruption) {
  Rng rng(4);
  Network<float> net(tiny_arch(), rng);
  const auto bytes = serialize_model(net);
  auto bad = bytes;
  bad[0] = 'x';
  EXPECT_THROW(parse_model<float>(bad), ModelFormatError);
  EXPECT_THROW(parse_model<float>(bytes.substr(0, bytes.size() - 3)), ModelFormatError);
  EXPECT_THROW(parse_model<float>(bytes + "zz"), ModelFormatError);
}

TEST(ConfigTest, ParsesSectionsAndComments) {
  const auto c = Config::parse("# top\nname = a b\n[train]\n; note\nepochs = 7\nwidths = 1, 2,3\nflag = true\n");
  EXPECT_EQ(c.get("name"), "a b");
  EXPECT_EQ(c.get_int("train.epochs", 0), 7);
  EXPECT_EQ(c.get_ints("train.widths", {}), (std::vector<int>{1, 2, 3}));
  EXPECT_TRUE(c.get_bool("train.flag", false));
  EXPECT_EQ(c.get_int("train.missing", 4), 4);
  EXPECT_THROW(c.get("train.missing"), ConfigError);
}

TEST(ConfigTest, Errors) {
  auto line_of = [](const std::string& text) -> int {
    try {
      Config::parse(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  EXPECT_EQ(line_of("a = 1\nno equals here\n"), 2);
  EXPECT_EQ(line_of("a = 1\na = 2\n"), 2);
  EXPECT_EQ(line_of("[open\n"), 1);
  const auto c = Config::parse("[train]\nepochs = seven\n");
  EXPECT_THROW(c.get_int("train.epochs", 1), ConfigError);
  EXPECT_THROW(PipelineConfig::from(Config::parse("[train]\nepoch = 3\n")), ConfigError);
  EXPECT_NO_THROW(PipelineConfig::from(Config::parse("[train]\nepochs = 3\n")));
}

TEST(ConfigTest, PipelineDefaultsAndOverrides) {
  const auto p = PipelineConfig::from(Config::parse("[search]\nweight_lr = 0.1\n[regularizer]\nlambda = 0.5\n"));
  EXPECT_EQ(p.train_samples, 800);
  EXPECT_EQ(p.supernet, SupernetConfig::desk());
  EXPECT_DOUBLE_EQ(p.schedule.weight.lr, 0.1);
  EXPECT_DOUBLE_EQ(p.regularizer.lambda, 0.5);
  EXPECT_LE(p.regularizer.tau, 0.0);
}

TEST(SearchStateTest, JsonRoundTrip) {
  SearchState s;
  s.config = Config::parse("[supernet]\npreset = desk\n");
  s.ops = {{OpSpec::mbconv(3, 3), OpSpec::mbconv(7, 6)}, {OpSpec::mbconv(5, 3), OpSpec::skip()}};
  s.alpha = {{0.25, -1.5}, {0.0, 2.0}};
  s.costs = {{0.125, 0.75}, {0.5, 0.0}};
  s.tau = 3.5;
  const auto text = s.to_json();
  const auto back = SearchState::parse(text);
  EXPECT_EQ(back.to_json(), text);
  EXPECT_EQ(back.ops, s.ops);
  EXPECT_EQ(back.alpha, s.alpha);
  const auto p = back.probs();
  EXPECT_NEAR(p[1][1], std::exp(2.0) / (1 + std::exp(2.0)), 1e-12);
  EXPECT_THROW(SearchState::parse("{\"tau\": 1}"), std::runtime_error);
  EXPECT_THROW(SearchState::parse("not json"), std::runtime_error);
}

TEST(TrainTest, ZeroEpochsAndLossDecreases) {
  const auto data = synth_dataset(48, 32, 4, 6);
  Rng rng(1);
  Network<float> net(tiny_arch(), rng);
  const auto before = serialize_model(net);
  TrainOptions opts;
  opts.epochs = 0;
  opts.batch_size = 8;
  const auto none = train_derived(net, data, {}, opts);
  EXPECT_TRUE(none.epochs.empty());
  EXPECT_EQ(serialize_model(net), before);
  opts.epochs = 4;
  const auto tr = train_derived(net, data, data, opts);
  ASSERT_EQ(tr.epochs.size(), 4u);
  EXPECT_LT(tr.epochs.back().train_loss, tr.initial_loss);
  EXPECT_GE(tr.epochs.back().val_pck, 0.0);
  EXPECT_NE(tr.to_text().find("epoch 4"), std::string::npos);
  const auto ms = TrainOptions{}.milestones();
  EXPECT_EQ(ms, (std::vector<int>{15, 17}));
}

TEST(AblationTest, ReportStructure) {
  const auto train = synth_dataset(16, 32, 4, 1), test = synth_dataset(8, 32, 4, 2);
  TrainOptions opts;
  opts.epochs = 1;
  opts.batch_size = 8;
  const auto base = tiny_arch();
  const auto r = ablate_sic<float>(train, test, base, opts, {3, 4});
  EXPECT_TRUE(r.on.sic);
  EXPECT_FALSE(r.off.sic);
  ASSERT_EQ(r.on.pck.size(), 2u);
  ASSERT_EQ(r.off.checkerboard.size(), 2u);
  auto off = base;
  off.head.sic = false;
  EXPECT_DOUBLE_EQ(r.on.mflops - r.off.mflops,
                   to_mflops(flops_of(base).total()) - to_mflops(flops_of(off).total()));
  EXPECT_GT(r.on.mflops, r.off.mflops);
  EXPECT_NE(r.to_text().find("sic"), std::string::npos);
  EXPECT_THROW(ablate_sic<float>(train, test, base, opts, {3}), std::invalid_argument);
}

}  // namespace
}  // namespace posenas
