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

#include "posenas/arch/descriptor.hpp"

#include <charconv>
#include <sstream>

namespace posenas {
namespace {

constexpr const char* kMagic = "efficientpose-arch v1";

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, int line, const std::string& what) {
  int v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ArchParseError(line, "bad " + what + " '" + tok + "'");
  return v;
}

/// Parses "<prefix><int>", e.g. "k3" or "w24".
int parse_prefixed(const std::string& tok, char prefix, int line, const std::string& what) {
  if (tok.size() < 2 || tok[0] != prefix) throw ArchParseError(line, "expected " + what + " token '" + std::string(1, prefix) + "<n>', got '" + tok + "'");
  return parse_int(tok.substr(1), line, what);
}

void expect(const std::vector<std::string>& t, std::size_t i, const std::string& word, int line) {
  if (i >= t.size() || t[i] != word) {
    throw ArchParseError(line, "expected '" + word + "'" + (i < t.size() ? ", got '" + t[i] + "'" : " at end of line"));
  }
}

}  // namespace

int ArchitectureDescriptor::stride2_count() const {
  int n = 1;  // stem conv
  for (const auto& l : layers) {
    if (!l.op.is_skip() && l.stride == 2) ++n;
  }
  return n;
}

int ArchitectureDescriptor::head_input_channels() const {
  int c = stem.sep_width;
  for (const auto& l : layers) {
    if (!l.op.is_skip()) c = l.width;
  }
  return c;
}

std::vector<MBConvSpec> ArchitectureDescriptor::surviving_blocks() const {
  std::vector<MBConvSpec> out;
  int in = stem.sep_width;
  for (const auto& l : layers) {
    if (l.op.is_skip()) continue;
    out.push_back({l.op.kernel, l.op.expansion, l.stride, in, l.width});
    in = l.width;
  }
  return out;
}

void ArchitectureDescriptor::validate(int expected_downsamplings) const {
  auto fail = [](const std::string& msg) { throw ArchParseError(0, msg); };
  if (version != 1) fail("unsupported version " + std::to_string(version));
  if (input_h <= 0 || input_w <= 0 || stem.input_channels <= 0) fail("input dimensions must be positive");
  if (stem.conv_width <= 0 || stem.sep_width <= 0) fail("stem widths must be positive");
  if (layers.empty()) fail("no layers");
  int stage = 0;
  int stage_width = 0;  // 0 until a non-skip layer of the stage is seen
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string where = "layer " + std::to_string(l.index) + ": ";
    if (l.index != static_cast<int>(i)) fail(where + "indices must run 0.." + std::to_string(layers.size() - 1) + " in order");
    if (l.stage != stage) {
      if (l.stage != stage + 1) fail(where + "stage must advance by one, got " + std::to_string(l.stage));
      stage = l.stage;
      stage_width = 0;
    }
    if (l.op.is_skip()) {
      if (l.width != 0 || l.stride != 1) fail(where + "skip carries no width or stride");
      continue;
    }
    try {
      MBConvSpec{l.op.kernel, l.op.expansion, l.stride, 1, l.width}.validate();
    } catch (const std::invalid_argument& e) {
      fail(where + e.what());
    }
    if (stage_width == 0) {
      stage_width = l.width;
    } else if (l.stride != 1 || l.width != stage_width) {
      fail(where + "only the first layer of a stage may change width or stride");
    }
  }
  try {
    head.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (stride2_count() != expected_downsamplings) {
    fail("expected " + std::to_string(expected_downsamplings) + " stride-2 positions, found " +
         std::to_string(stride2_count()));
  }
}

std::string serialize(const ArchitectureDescriptor& d) {
  std::ostringstream out;
  out << kMagic << "\n";
  out << "input " << d.input_h << " " << d.input_w << " " << d.stem.input_channels << "\n";
  out << "stem conv3 " << d.stem.conv_width << " s2 ; sepdepth3 " << d.stem.sep_width << " s1\n";
  for (const auto& l : d.layers) {
    out << "layer " << l.index << " stage " << l.stage << " ";
    if (l.op.is_skip()) {
      out << "skip\n";
    } else {
      out << "mbconv k" << l.op.kernel << " e" << l.op.expansion << " w" << l.width << " s" << l.stride << "\n";
    }
  }
  out << "head tconv " << d.head.w1 << " tconv " << d.head.w2 << " sic " << (d.head.sic ? 1 : 0) << " style "
      << to_string(d.head.style) << " k " << d.head.keypoints;
  if (d.head.deconv_kernel != 4) out << " deconv " << d.head.deconv_kernel;
  out << "\n";
  return out.str();
}

ArchitectureDescriptor parse_architecture(const std::string& text, int expected_downsamplings) {
  ArchitectureDescriptor d;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool seen_magic = false, seen_input = false, seen_stem = false, seen_head = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto t = tokenize(raw);
    if (t.empty() || t[0][0] == '#') continue;
    if (!seen_magic) {
      if (t.size() != 2 || t[0] != "efficientpose-arch") throw ArchParseError(line, "missing header 'efficientpose-arch v1'");
      if (t[1] != "v1") throw ArchParseError(line, "unsupported version '" + t[1] + "'");
      seen_magic = true;
      continue;
    }
    if (seen_head) throw ArchParseError(line, "content after head line");
    const std::string& kw = t[0];
    if (kw == "input") {
      if (seen_input) throw ArchParseError(line, "duplicate input line");
      if (t.size() != 4) throw ArchParseError(line, "input expects <H> <W> <C>");
      d.input_h = parse_int(t[1], line, "height");
      d.input_w = parse_int(t[2], line, "width");
      d.stem.input_channels = parse_int(t[3], line, "channels");
      if (d.input_h <= 0 || d.input_w <= 0 || d.stem.input_channels <= 0) throw ArchParseError(line, "input dimensions must be positive");
      seen_input = true;
    } else if (kw == "stem") {
      if (!seen_input) throw ArchParseError(line, "stem before input");
      if (seen_stem) throw ArchParseError(line, "duplicate stem line");
      if (t.size() != 8) throw ArchParseError(line, "stem expects 'conv3 <w> s2 ; sepdepth3 <w> s1'");
      expect(t, 1, "conv3", line);
      d.stem.conv_width = parse_int(t[2], line, "stem width");
      expect(t, 3, "s2", line);
      expect(t, 4, ";", line);
      expect(t, 5, "sepdepth3", line);
      d.stem.sep_width = parse_int(t[6], line, "sepdepth width");
      expect(t, 7, "s1", line);
      if (d.stem.conv_width <= 0 || d.stem.sep_width <= 0) throw ArchParseError(line, "stem widths must be positive");
      seen_stem = true;
    } else if (kw == "layer") {
      if (!seen_stem) throw ArchParseError(line, "layer before stem");
      if (t.size() < 5) throw ArchParseError(line, "truncated layer line");
      LayerChoice l;
      l.index = parse_int(t[1], line, "layer index");
      expect(t, 2, "stage", line);
      l.stage = parse_int(t[3], line, "stage");
      if (t[4] == "skip") {
        if (t.size() != 5) throw ArchParseError(line, "unexpected tokens after skip");
        l.op = OpSpec::skip();
        l.width = 0;
        l.stride = 1;
      } else if (t[4] == "mbconv") {
        if (t.size() != 9) throw ArchParseError(line, "mbconv expects k<k> e<e> w<width> s<stride>");
        l.op = OpSpec::mbconv(parse_prefixed(t[5], 'k', line, "kernel"), parse_prefixed(t[6], 'e', line, "expansion"));
        l.width = parse_prefixed(t[7], 'w', line, "width");
        l.stride = parse_prefixed(t[8], 's', line, "stride");
      } else {
        throw ArchParseError(line, "unknown op token '" + t[4] + "'");
      }
      if (l.index != static_cast<int>(d.layers.size())) {
        throw ArchParseError(line, "layer index " + std::to_string(l.index) + " out of order (expected " +
                                       std::to_string(d.layers.size()) + ")");
      }
      d.layers.push_back(l);
      try {
        ArchitectureDescriptor partial = d;
        partial.head = HeadConfig{};
        partial.validate(partial.stride2_count());
      } catch (const ArchParseError& e) {
        throw ArchParseError(line, e.what());
      }
    } else if (kw == "head") {
      if (d.layers.empty()) throw ArchParseError(line, "head before any layer");
      if (t.size() != 11 && t.size() != 13) throw ArchParseError(line, "head expects 'tconv <w1> tconv <w2> sic <0|1> style <s> k <K>'");
      expect(t, 1, "tconv", line);
      d.head.w1 = parse_int(t[2], line, "w1");
      expect(t, 3, "tconv", line);
      d.head.w2 = parse_int(t[4], line, "w2");
      expect(t, 5, "sic", line);
      if (t[6] != "0" && t[6] != "1") throw ArchParseError(line, "sic must be 0 or 1, got '" + t[6] + "'");
      d.head.sic = t[6] == "1";
      expect(t, 7, "style", line);
      try {
        d.head.style = parse_head_style(t[8]);
      } catch (const std::invalid_argument& e) {
        throw ArchParseError(line, e.what());
      }
      expect(t, 9, "k", line);
      d.head.keypoints = parse_int(t[10], line, "keypoint count");
      d.head.deconv_kernel = 4;
      if (t.size() == 13) {
        expect(t, 11, "deconv", line);
        d.head.deconv_kernel = parse_int(t[12], line, "deconv kernel");
      }
      try {
        d.head.validate();
      } catch (const std::invalid_argument& e) {
        throw ArchParseError(line, e.what());
      }
      seen_head = true;
    } else {
      throw ArchParseError(line, "unknown keyword '" + kw + "'");
    }
  }
  if (!seen_magic) throw ArchParseError(line, "empty architecture file");
  if (!seen_head) throw ArchParseError(line, "missing head line");
  try {
    d.validate(expected_downsamplings < 0 ? d.stride2_count() : expected_downsamplings);
  } catch (const ArchParseError& e) {
    throw ArchParseError(line, e.what());
  }
  return d;
}

}  // namespace posenas
