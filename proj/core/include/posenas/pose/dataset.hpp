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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "posenas/pose/image.hpp"

namespace posenas {

struct Keypoint {
  double x = 0;
  double y = 0;
  int visible = 1;  // 0 or 1

  bool operator==(const Keypoint&) const = default;
};

struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  bool operator==(const BBox&) const = default;
};

/// One square single-person crop with pixel-space keypoints.
struct KeypointSample {
  std::string id;
  std::string image_path;  // relative to the annotation file
  Image image;
  std::vector<Keypoint> keypoints;
  BBox bbox;

  /// Throws std::invalid_argument describing the first broken invariant.
  void validate() const;
  bool operator==(const KeypointSample&) const = default;
};

/// Parent of joint k (> 0) in the synthetic skeleton: (k - 1) / 2.
int synth_parent(int joint);

/// Stick figures with K joints on a noisy background. Each limb is drawn
/// anti-aliased in its child joint's colour, each joint as a dot. Every
/// keypoint is visible. Sample i depends only on (seed, i).
std::vector<KeypointSample> synth_dataset(int n, int image_size, int keypoints, std::uint64_t seed);

class AnnotationError : public std::runtime_error {
 public:
  AnnotationError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// One JSON object per line:
///   {"id":..,"image":..,"bbox":[x,y,w,h],"keypoints":[[x,y,v],...]}
std::string annotation_line(const KeypointSample& sample);

/// Writes images (PGM/PPM under `images/`) and annotations.jsonl into `dir`;
/// fills in each sample's image_path. Returns the annotation file path.
std::filesystem::path save_dataset(std::vector<KeypointSample>& samples, const std::filesystem::path& dir);

/// Parses and validates every record; errors carry the line number.
std::vector<KeypointSample> load_annotations(const std::filesystem::path& path);

}  // namespace posenas
