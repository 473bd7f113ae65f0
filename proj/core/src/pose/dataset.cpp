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

#include "posenas/pose/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

namespace posenas {
namespace {

using Json = nlohmann::ordered_json;

struct Rgb {
  double r, g, b;
};

/// Evenly spaced saturated hues.
Rgb joint_colour(int k, int count) {
  const double h = 6.0 * k / count;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double hi = 235, lo = 20, up = lo + (hi - lo) * f, down = hi - (hi - lo) * f;
  switch (sector) {
    case 0: return {hi, up, lo};
    case 1: return {down, hi, lo};
    case 2: return {lo, hi, up};
    case 3: return {lo, down, hi};
    case 4: return {up, lo, hi};
    default: return {hi, lo, down};
  }
}

constexpr double kAngleJitter = std::numbers::pi / 5;

/// Rest direction of the limb ending at `joint`: the root's two children
/// point up and down, deeper limbs fan out 45 degrees from their parent.
double template_angle(int joint) {
  if (joint == 1) return -std::numbers::pi / 2;
  if (joint == 2) return std::numbers::pi / 2;
  const double fan = joint % 2 == 1 ? -std::numbers::pi / 4 : std::numbers::pi / 4;
  return template_angle(synth_parent(joint)) + fan;
}

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

/// Blends `c` with coverage max(0, min(1, radius + 0.5 - distance)).
template <typename Dist>
void paint(Image& img, double x0, double y0, double x1, double y1, double radius, Rgb c, Dist&& dist) {
  const int lo_x = std::max(0, static_cast<int>(std::floor(std::min(x0, x1) - radius - 1)));
  const int hi_x = std::min(img.width - 1, static_cast<int>(std::ceil(std::max(x0, x1) + radius + 1)));
  const int lo_y = std::max(0, static_cast<int>(std::floor(std::min(y0, y1) - radius - 1)));
  const int hi_y = std::min(img.height - 1, static_cast<int>(std::ceil(std::max(y0, y1) + radius + 1)));
  for (int y = lo_y; y <= hi_y; ++y) {
    for (int x = lo_x; x <= hi_x; ++x) {
      const double a = std::clamp(radius + 0.5 - dist(x, y), 0.0, 1.0);
      if (a <= 0) continue;
      const double rgb[3] = {c.r, c.g, c.b};
      for (int ch = 0; ch < 3; ++ch) {
        const double v = (1 - a) * img.at(x, y, ch) + a * rgb[ch];
        img.at(x, y, ch) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
      }
    }
  }
}

KeypointSample synth_one(int size, int k, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 2.0;
  std::vector<Keypoint> kp(static_cast<std::size_t>(k));
  bool placed = false;
  for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
    const double scale = size * (0.12 + 0.08 * unit(rng));
    kp[0] = {size * (0.3 + 0.4 * unit(rng)), size * (0.3 + 0.4 * unit(rng)), 1};
    placed = true;
    for (int j = 1; j < k; ++j) {
      const auto& p = kp[static_cast<std::size_t>(synth_parent(j))];
      const double angle = template_angle(j) + kAngleJitter * (2 * unit(rng) - 1);
      const double len = scale * (0.7 + 0.6 * unit(rng));
      const double x = p.x + len * std::cos(angle), y = p.y + len * std::sin(angle);
      if (x < margin || y < margin || x > size - 1 - margin || y > size - 1 - margin) {
        placed = false;
        break;
      }
      kp[static_cast<std::size_t>(j)] = {x, y, 1};
    }
  }
  if (!placed) throw std::invalid_argument("synth_dataset: image too small to place " + std::to_string(k) + " joints");

  Image img(size, size, 3);
  const double base = 60 + 80 * unit(rng);
  std::uniform_real_distribution<double> noise(-25.0, 25.0);
  for (auto& px : img.pixels) px = static_cast<std::uint8_t>(std::lround(std::clamp(base + noise(rng), 0.0, 255.0)));
  for (int j = 1; j < k; ++j) {
    const auto& a = kp[static_cast<std::size_t>(synth_parent(j))];
    const auto& b = kp[static_cast<std::size_t>(j)];
    paint(img, a.x, a.y, b.x, b.y, 0.9, joint_colour(j, k),
          [&](int x, int y) { return segment_distance(x, y, a.x, a.y, b.x, b.y); });
  }
  for (int j = 0; j < k; ++j) {
    const auto& p = kp[static_cast<std::size_t>(j)];
    paint(img, p.x, p.y, p.x, p.y, 1.6, joint_colour(j, k),
          [&](int x, int y) { return std::hypot(x - p.x, y - p.y); });
  }

  double x0 = size, y0 = size, x1 = 0, y1 = 0;
  for (const auto& p : kp) {
    x0 = std::min(x0, p.x), y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
  }
  x0 = std::max(0.0, std::floor(x0) - 2), y0 = std::max(0.0, std::floor(y0) - 2);
  x1 = std::min(static_cast<double>(size), std::ceil(x1) + 3), y1 = std::min(static_cast<double>(size), std::ceil(y1) + 3);

  KeypointSample s;
  s.id = "synth_" + std::to_string(seed) + "_" + std::to_string(index);
  s.image = std::move(img);
  s.keypoints = std::move(kp);
  s.bbox = {x0, y0, x1 - x0, y1 - y0};
  return s;
}

double number_at(const Json& arr, std::size_t i, const std::string& what) {
  if (!arr.at(i).is_number()) throw std::invalid_argument(what + " must be numeric");
  const double v = arr.at(i).get<double>();
  if (!std::isfinite(v)) throw std::invalid_argument(what + " must be finite");
  return v;
}

KeypointSample parse_record(const std::string& line, const std::filesystem::path& base) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  for (const auto& [key, v] : j.items()) {
    if (key != "id" && key != "image" && key != "bbox" && key != "keypoints") {
      throw std::invalid_argument("unknown field '" + key + "'");
    }
  }
  for (const char* key : {"id", "image", "bbox", "keypoints"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  if (!j["id"].is_string() || !j["image"].is_string()) throw std::invalid_argument("id and image must be strings");
  KeypointSample s;
  s.id = j["id"].get<std::string>();
  s.image_path = j["image"].get<std::string>();
  const auto& bb = j["bbox"];
  if (!bb.is_array() || bb.size() != 4) throw std::invalid_argument("bbox must be [x, y, w, h]");
  s.bbox = {number_at(bb, 0, "bbox"), number_at(bb, 1, "bbox"), number_at(bb, 2, "bbox"), number_at(bb, 3, "bbox")};
  const auto& kps = j["keypoints"];
  if (!kps.is_array() || kps.empty()) throw std::invalid_argument("keypoints must be a non-empty array");
  for (const auto& k : kps) {
    if (!k.is_array() || k.size() != 3) throw std::invalid_argument("each keypoint must be [x, y, v]");
    if (!k[2].is_number_integer()) throw std::invalid_argument("keypoint visibility must be 0 or 1");
    const auto v = k[2].get<long long>();
    if (v != 0 && v != 1) throw std::invalid_argument("keypoint visibility must be 0 or 1");
    s.keypoints.push_back({number_at(k, 0, "keypoint x"), number_at(k, 1, "keypoint y"), static_cast<int>(v)});
  }
  const auto img_path = base / s.image_path;
  if (s.image_path.empty() || !std::filesystem::is_regular_file(img_path)) {
    throw std::invalid_argument("missing image file '" + s.image_path + "'");
  }
  try {
    s.image = read_pnm(img_path);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
  s.validate();
  return s;
}

}  // namespace

int synth_parent(int joint) { return (joint - 1) / 2; }

void KeypointSample::validate() const {
  if (id.empty()) throw std::invalid_argument("empty sample id");
  if (image.width <= 0 || image.height <= 0) throw std::invalid_argument(id + ": empty image");
  if (image.width != image.height) throw std::invalid_argument(id + ": image must be square");
  if (keypoints.empty()) throw std::invalid_argument(id + ": no keypoints");
  const double w = image.width, h = image.height;
  if (!(bbox.w > 0 && bbox.h > 0 && bbox.x >= 0 && bbox.y >= 0 && bbox.x + bbox.w <= w && bbox.y + bbox.h <= h)) {
    throw std::invalid_argument(id + ": bbox outside the image");
  }
  for (std::size_t k = 0; k < keypoints.size(); ++k) {
    const auto& p = keypoints[k];
    if (p.visible != 0 && p.visible != 1) throw std::invalid_argument(id + ": visibility must be 0 or 1");
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument(id + ": non-finite keypoint");
    if (p.visible == 1 && !(p.x >= 0 && p.y >= 0 && p.x < w && p.y < h)) {
      throw std::invalid_argument(id + ": visible keypoint " + std::to_string(k) + " outside the image");
    }
  }
}

std::vector<KeypointSample> synth_dataset(int n, int image_size, int keypoints, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("synth_dataset: n must be >= 1");
  if (keypoints < 2) throw std::invalid_argument("synth_dataset: need at least 2 keypoints");
  if (image_size < 16) throw std::invalid_argument("synth_dataset: image too small for " + std::to_string(keypoints) + " joints");
  std::vector<KeypointSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(synth_one(image_size, keypoints, seed, i));
  return out;
}

std::string annotation_line(const KeypointSample& s) {
  Json j;
  j["id"] = s.id;
  j["image"] = s.image_path;
  j["bbox"] = Json::array({s.bbox.x, s.bbox.y, s.bbox.w, s.bbox.h});
  Json kps = Json::array();
  for (const auto& k : s.keypoints) kps.push_back(Json::array({k.x, k.y, k.visible}));
  j["keypoints"] = std::move(kps);
  return j.dump();
}

std::filesystem::path save_dataset(std::vector<KeypointSample>& samples, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  const auto ann = dir / "annotations.jsonl";
  std::ofstream out(ann, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + ann.string());
  for (auto& s : samples) {
    s.image_path = "images/" + s.id + (s.image.channels == 1 ? ".pgm" : ".ppm");
    write_pnm(s.image, dir / s.image_path);
    out << annotation_line(s) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + ann.string());
  return ann;
}

std::vector<KeypointSample> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AnnotationError(0, "cannot open " + path.string());
  const auto base = path.parent_path();
  std::vector<KeypointSample> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_record(line, base));
    } catch (const std::invalid_argument& e) {
      throw AnnotationError(n, e.what());
    }
    if (out.back().keypoints.size() != out.front().keypoints.size()) {
      throw AnnotationError(n, "expected " + std::to_string(out.front().keypoints.size()) + " keypoints, found " +
                                   std::to_string(out.back().keypoints.size()));
    }
    if (out.back().image.width != out.front().image.width) throw AnnotationError(n, "image size differs from the first record");
  }
  if (out.empty()) throw AnnotationError(0, "no samples in " + path.string());
  return out;
}

}  // namespace posenas
