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

#include "posenas/arch/descriptor.hpp"
#include "posenas/pose/dataset.hpp"
#include "posenas/pose/train.hpp"

namespace posenas {

struct SicAblationRow {
  bool sic = false;
  std::vector<double> pck;           // per seed, on the test samples
  std::vector<double> checkerboard;  // per seed: post-SIC features with SIC, post-deconv without
  double mflops = 0;

  double mean_pck() const;
  double mean_checkerboard() const;
};

struct SicAblationReport {
  SicAblationRow on;
  SicAblationRow off;
  std::vector<std::uint64_t> seeds;

  /// Seeds where SIC-on scored a lower checkerboard value than SIC-off.
  int checkerboard_wins() const;
  /// Two-row table: variant, PCK, checkerboard, MFLOPs.
  std::string to_text() const;
};

/// Trains the SIC-on and SIC-off variants of `base` once per seed with
/// otherwise identical settings. Needs at least two seeds.
template <typename T>
SicAblationReport ablate_sic(const std::vector<KeypointSample>& train, const std::vector<KeypointSample>& test,
                             const ArchitectureDescriptor& base, const TrainOptions& opts,
                             const std::vector<std::uint64_t>& seeds);

}  // namespace posenas
