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

#include "posenas/pose/image.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

namespace posenas {
namespace {

[[noreturn]] void pnm_error(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

int read_header_int(std::istream& in, const std::filesystem::path& path) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      in.get();
    } else {
      break;
    }
  }
  int v = -1;
  if (!(in >> v)) pnm_error(path, "truncated header");
  return v;
}

}  // namespace

Image::Image(int w, int h, int c) : width(w), height(h), channels(c) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("Image: dimensions must be positive");
  if (c != 1 && c != 3) throw std::invalid_argument("Image: channels must be 1 or 3");
  pixels.assign(static_cast<std::size_t>(w) * h * c, 0);
}

void write_pnm(const Image& image, const std::filesystem::path& path) {
  if (image.channels != 1 && image.channels != 3) throw std::invalid_argument("write_pnm: channels must be 1 or 3");
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height * image.channels) {
    throw std::invalid_argument("write_pnm: pixel buffer does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) pnm_error(path, "cannot open for writing");
  out << (image.channels == 1 ? "P5" : "P6") << "\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) pnm_error(path, "write failed");
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) pnm_error(path, "cannot open");
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (!in || (magic != "P5" && magic != "P6")) pnm_error(path, "not a binary PGM/PPM file");
  const int w = read_header_int(in, path);
  const int h = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (w <= 0 || h <= 0) pnm_error(path, "bad dimensions");
  if (maxval != 255) pnm_error(path, "only maxval 255 is supported");
  if (!std::isspace(in.get())) pnm_error(path, "malformed header");
  Image img(w, h, magic == "P5" ? 1 : 3);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) pnm_error(path, "truncated pixel data");
  if (in.peek() != std::char_traits<char>::eof()) pnm_error(path, "trailing bytes after pixel data");
  return img;
}

}  // namespace posenas
