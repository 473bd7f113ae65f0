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

#include "posenas/cost/flops.hpp"

#include <numeric>
#include <stdexcept>

namespace posenas {
namespace {

Shape to_nchw(const Shape& chw) {
  if (chw.size() != 3) throw std::invalid_argument("flops_of: expected a [C, H, W] shape, got " + shape_str(chw));
  return {1, chw[0], chw[1], chw[2]};
}

Shape to_chw(const Shape& nchw) { return {nchw[1], nchw[2], nchw[3]}; }

Macs u(std::size_t v) { return static_cast<Macs>(v); }

/// One 2x upsampling stage of the head; returns its MACs and advances `chw`.
Macs up_stage(HeadStyle style, int kernel, int out, Shape& chw, FlopsOptions opts) {
  const int in = static_cast<int>(chw[0]);
  Macs m = 0;
  switch (style) {
    case HeadStyle::kPlain: {
      const auto c = ConvSpec::transposed(in, out, kernel);
      m = flops_of(c, chw, opts);
      chw = {static_cast<std::size_t>(out), chw[1] * 2, chw[2] * 2};
      break;
    }
    case HeadStyle::kSep: {
      chw = {chw[0], chw[1] * 2, chw[2] * 2};
      m += flops_of(ConvSpec::depthwise(3, in), chw);
      m += flops_of(ConvSpec::pointwise(in, out), chw);
      chw[0] = static_cast<std::size_t>(out);
      break;
    }
    case HeadStyle::kInvertedResidual: {
      const int mid = 6 * in;
      m += flops_of(ConvSpec::pointwise(in, mid), chw);
      chw = {static_cast<std::size_t>(mid), chw[1] * 2, chw[2] * 2};
      m += flops_of(ConvSpec::depthwise(3, mid), chw);
      m += flops_of(ConvSpec::pointwise(mid, out), chw);
      chw[0] = static_cast<std::size_t>(out);
      break;
    }
  }
  return m;
}

}  // namespace

Macs flops_of(const ConvSpec& conv, const Shape& chw, FlopsOptions opts) {
  conv.validate();
  const Shape in = to_nchw(chw);
  const Shape out = conv.output_shape(in);
  const Macs out_px = u(out[2]) * u(out[3]);
  const Macs k2 = u(static_cast<std::size_t>(conv.kernel * conv.kernel));
  const Macs ci = u(static_cast<std::size_t>(conv.in_channels));
  const Macs co = u(static_cast<std::size_t>(conv.out_channels));
  switch (conv.kind) {
    case ConvKind::kPlain:
      return out_px * co * ci * k2;
    case ConvKind::kDepthwise:
      return out_px * ci * k2;
    case ConvKind::kPointwise:
      return out_px * ci * co;
    case ConvKind::kTransposed: {
      const Macs px = opts.transposed == TransposedCounting::kInputTaps ? u(in[2]) * u(in[3]) : out_px;
      return px * ci * co * k2;
    }
  }
  throw std::logic_error("flops_of: unknown conv kind");
}

Macs flops_of(const MBConvSpec& block, const Shape& chw) {
  block.validate();
  Shape s = chw;
  Macs m = flops_of(block.expand_conv(), s);
  s[0] = static_cast<std::size_t>(block.expanded());
  m += flops_of(block.depthwise_conv(), s);
  s = to_chw(block.depthwise_conv().output_shape(to_nchw(s)));
  m += flops_of(block.project_conv(), s);
  return m;
}

Macs flops_of(const OpSpec& op, const LayerGeometry& g) {
  if (op.is_skip()) return 0;
  const auto n = static_cast<std::size_t>(g.in_size);
  return flops_of(g.mbconv(op), Shape{static_cast<std::size_t>(g.in_channels), n, n});
}

Macs stem_flops(const StemConfig& stem, const Shape& chw) {
  const auto conv = ConvSpec::plain(3, stem.input_channels, stem.conv_width, 2);
  Macs m = flops_of(conv, chw);
  const Shape s = to_chw(conv.output_shape(to_nchw(chw)));
  m += flops_of(ConvSpec::depthwise(3, stem.conv_width), s);
  m += flops_of(ConvSpec::pointwise(stem.conv_width, stem.sep_width), s);
  return m;
}

Macs head_flops(const HeadConfig& head, const Shape& chw, FlopsOptions opts) {
  head.validate();
  to_nchw(chw);
  Shape s = chw;
  Macs m = up_stage(head.style, head.deconv_kernel, head.w1, s, opts);
  m += up_stage(head.style, head.deconv_kernel, head.w2, s, opts);
  if (head.sic) m += flops_of(ConvSpec::depthwise(3, head.w2), s);
  m += flops_of(ConvSpec::pointwise(head.w2, head.keypoints), s);
  return m;
}

Macs sic_flops(const HeadConfig& head, const Shape& chw) {
  to_nchw(chw);
  const Shape s{static_cast<std::size_t>(head.w2), chw[1] * 4, chw[2] * 4};
  return flops_of(ConvSpec::depthwise(3, head.w2), s);
}

Macs FlopsBreakdown::backbone() const { return std::accumulate(layers.begin(), layers.end(), stem); }

FlopsBreakdown flops_of(const ArchitectureDescriptor& desc, FlopsOptions opts) {
  desc.validate(desc.stride2_count());
  FlopsBreakdown out;
  Shape s{static_cast<std::size_t>(desc.stem.input_channels), static_cast<std::size_t>(desc.input_h),
          static_cast<std::size_t>(desc.input_w)};
  out.stem = stem_flops(desc.stem, s);
  s = {static_cast<std::size_t>(desc.stem.sep_width), (s[1] + 1) / 2, (s[2] + 1) / 2};
  int in = desc.stem.sep_width;
  for (const auto& l : desc.layers) {
    if (l.op.is_skip()) {
      out.layers.push_back(0);
      continue;
    }
    const MBConvSpec b{l.op.kernel, l.op.expansion, l.stride, in, l.width};
    out.layers.push_back(flops_of(b, s));
    s = {static_cast<std::size_t>(l.width), (s[1] + l.stride - 1) / l.stride, (s[2] + l.stride - 1) / l.stride};
    in = l.width;
  }
  out.head = head_flops(desc.head, s, opts);
  return out;
}

}  // namespace posenas
