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

#include "posenas/nn/conv.hpp"

#include <algorithm>
#include <stdexcept>

#include "posenas/autograd/record.hpp"

namespace posenas {
namespace {

using detail::needs_record;
using detail::record;

// Range [lo, hi) of loop indices i in [0, count) with 0 <= i * s + off < limit.
struct Span {
  long lo;
  long hi;
};

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

Span valid_range(long count, long s, long off, long limit) {
  const long lo = std::max(0L, floor_div(-off + s - 1, s));
  const long hi = std::min(count, floor_div(limit - 1 - off, s) + 1);
  return {lo, std::max(lo, hi)};
}

void require_nchw(const char* name, const Shape& s) {
  if (s.size() != 4) throw std::invalid_argument(std::string(name) + ": expected NCHW input, got " + shape_str(s));
}

[[noreturn]] void conv_error(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::string to_string(ConvKind kind) {
  switch (kind) {
    case ConvKind::kPlain: return "plain";
    case ConvKind::kDepthwise: return "depthwise";
    case ConvKind::kPointwise: return "pointwise";
    case ConvKind::kTransposed: return "transposed";
  }
  return "?";
}

ConvSpec ConvSpec::plain(int k, int in, int out, int stride) {
  return {ConvKind::kPlain, k, stride, in, out};
}
ConvSpec ConvSpec::depthwise(int k, int channels, int stride) {
  return {ConvKind::kDepthwise, k, stride, channels, channels};
}
ConvSpec ConvSpec::pointwise(int in, int out) { return {ConvKind::kPointwise, 1, 1, in, out}; }
ConvSpec ConvSpec::transposed(int in, int out, int k) {
  return {ConvKind::kTransposed, k, 2, in, out};
}

int ConvSpec::padding() const {
  if (kind == ConvKind::kTransposed) return (kernel - stride) / 2;
  return kernel / 2;
}

void ConvSpec::validate() const {
  const std::string where = to_string(kind) + " conv";
  if (in_channels <= 0 || out_channels <= 0) conv_error(where + ": channel counts must be positive");
  switch (kind) {
    case ConvKind::kPlain:
    case ConvKind::kDepthwise:
      if (kernel < 1 || kernel % 2 == 0) conv_error(where + ": kernel must be odd, got " + std::to_string(kernel));
      if (stride != 1 && stride != 2) conv_error(where + ": stride must be 1 or 2");
      if (kind == ConvKind::kDepthwise && in_channels != out_channels) {
        conv_error(where + ": in-channels " + std::to_string(in_channels) + " != out-channels " +
                   std::to_string(out_channels));
      }
      break;
    case ConvKind::kPointwise:
      if (kernel != 1) conv_error(where + ": kernel must be 1, got " + std::to_string(kernel));
      if (stride != 1) conv_error(where + ": stride must be 1");
      break;
    case ConvKind::kTransposed:
      if (stride != 2) conv_error(where + ": stride must be 2, got " + std::to_string(stride));
      if (kernel < 2 || kernel % 2 != 0) {
        conv_error(where + ": kernel " + std::to_string(kernel) +
                   " cannot double the extent with stride 2 (need an even kernel)");
      }
      break;
  }
}

Shape ConvSpec::weight_shape() const {
  const auto k = static_cast<std::size_t>(kernel);
  switch (kind) {
    case ConvKind::kDepthwise:
      return {static_cast<std::size_t>(in_channels), 1, k, k};
    case ConvKind::kTransposed:
      return {static_cast<std::size_t>(in_channels), static_cast<std::size_t>(out_channels), k, k};
    default:
      return {static_cast<std::size_t>(out_channels), static_cast<std::size_t>(in_channels), k, k};
  }
}

Shape ConvSpec::output_shape(const Shape& in) const {
  validate();
  require_nchw("conv", in);
  if (in[1] != static_cast<std::size_t>(in_channels)) {
    conv_error(to_string(kind) + " conv: input has " + std::to_string(in[1]) + " channels, spec expects " +
               std::to_string(in_channels));
  }
  const std::size_t h = in[2], w = in[3];
  if (kind == ConvKind::kTransposed) {
    return {in[0], static_cast<std::size_t>(out_channels), 2 * h, 2 * w};
  }
  if (h == 0 || w == 0) conv_error(to_string(kind) + " conv: empty input " + shape_str(in));
  const std::size_t s = static_cast<std::size_t>(stride);
  return {in[0], static_cast<std::size_t>(out_channels), (h + s - 1) / s, (w + s - 1) / s};
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding) {
  require_nchw("conv2d", x.shape());
  require_nchw("conv2d", w.shape());
  const long n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const long co = w.dim(0), k = w.dim(2);
  if (w.dim(1) != static_cast<std::size_t>(ci) || w.dim(3) != static_cast<std::size_t>(k)) {
    detail::shape_error("conv2d", x.shape(), w.shape());
  }
  const long s = stride, p = padding;
  const long oh = (h + 2 * p - k) / s + 1, ow = (wd + 2 * p - k) / s + 1;
  if (oh <= 0 || ow <= 0) detail::shape_error("conv2d", x.shape(), w.shape());
  Tensor<T> out(Shape{static_cast<std::size_t>(n), static_cast<std::size_t>(co),
                      static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  const T* xv = x.values().data();
  const T* wv = w.values().data();
  T* ov = out.values().data();
  for (long b = 0; b < n; ++b) {
    for (long oc = 0; oc < co; ++oc) {
      T* oplane = ov + (b * co + oc) * oh * ow;
      for (long ic = 0; ic < ci; ++ic) {
        const T* xplane = xv + (b * ci + ic) * h * wd;
        for (long kh = 0; kh < k; ++kh) {
          const Span rows = valid_range(oh, s, kh - p, h);
          for (long kw = 0; kw < k; ++kw) {
            const T wt = wv[((oc * ci + ic) * k + kh) * k + kw];
            const Span cols = valid_range(ow, s, kw - p, wd);
            for (long r = rows.lo; r < rows.hi; ++r) {
              const T* xrow = xplane + (r * s + kh - p) * wd + (kw - p);
              T* orow = oplane + r * ow;
              for (long c = cols.lo; c < cols.hi; ++c) orow[c] += wt * xrow[c * s];
            }
          }
        }
      }
    }
  }
  if (needs_record({&x, &w})) {
    record(out, [x = x.impl(), w = w.impl(), out = out.impl(), n, ci, h, wd, co, k, s, p, oh, ow] {
      const T* gv = out->grad.data();
      for (long b = 0; b < n; ++b) {
        for (long oc = 0; oc < co; ++oc) {
          const T* gplane = gv + (b * co + oc) * oh * ow;
          for (long ic = 0; ic < ci; ++ic) {
            const long xoff = (b * ci + ic) * h * wd;
            for (long kh = 0; kh < k; ++kh) {
              const Span rows = valid_range(oh, s, kh - p, h);
              for (long kw = 0; kw < k; ++kw) {
                const long widx = ((oc * ci + ic) * k + kh) * k + kw;
                const Span cols = valid_range(ow, s, kw - p, wd);
                const T wt = w->value[widx];
                T acc = T(0);
                for (long r = rows.lo; r < rows.hi; ++r) {
                  const long xrow = xoff + (r * s + kh - p) * wd + (kw - p);
                  const T* grow = gplane + r * ow;
                  if (x->requires_grad) {
                    T* dx = x->grad.data() + xrow;
                    for (long c = cols.lo; c < cols.hi; ++c) dx[c * s] += wt * grow[c];
                  }
                  const T* xr = x->value.data() + xrow;
                  for (long c = cols.lo; c < cols.hi; ++c) acc += grow[c] * xr[c * s];
                }
                if (w->requires_grad) w->grad[widx] += acc;
              }
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> depthwise_conv2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding) {
  require_nchw("depthwise_conv2d", x.shape());
  require_nchw("depthwise_conv2d", w.shape());
  const long n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const long k = w.dim(2);
  if (w.dim(0) != static_cast<std::size_t>(c) || w.dim(1) != 1 || w.dim(3) != static_cast<std::size_t>(k)) {
    detail::shape_error("depthwise_conv2d", x.shape(), w.shape());
  }
  const long s = stride, p = padding;
  const long oh = (h + 2 * p - k) / s + 1, ow = (wd + 2 * p - k) / s + 1;
  if (oh <= 0 || ow <= 0) detail::shape_error("depthwise_conv2d", x.shape(), w.shape());
  Tensor<T> out(Shape{static_cast<std::size_t>(n), static_cast<std::size_t>(c),
                      static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  const T* xv = x.values().data();
  const T* wv = w.values().data();
  T* ov = out.values().data();
  for (long b = 0; b < n; ++b) {
    for (long ch = 0; ch < c; ++ch) {
      T* oplane = ov + (b * c + ch) * oh * ow;
      const T* xplane = xv + (b * c + ch) * h * wd;
      for (long kh = 0; kh < k; ++kh) {
        const Span rows = valid_range(oh, s, kh - p, h);
        for (long kw = 0; kw < k; ++kw) {
          const T wt = wv[(ch * k + kh) * k + kw];
          const Span cols = valid_range(ow, s, kw - p, wd);
          for (long r = rows.lo; r < rows.hi; ++r) {
            const T* xrow = xplane + (r * s + kh - p) * wd + (kw - p);
            T* orow = oplane + r * ow;
            for (long cc = cols.lo; cc < cols.hi; ++cc) orow[cc] += wt * xrow[cc * s];
          }
        }
      }
    }
  }
  if (needs_record({&x, &w})) {
    record(out, [x = x.impl(), w = w.impl(), out = out.impl(), n, c, h, wd, k, s, p, oh, ow] {
      const T* gv = out->grad.data();
      for (long b = 0; b < n; ++b) {
        for (long ch = 0; ch < c; ++ch) {
          const T* gplane = gv + (b * c + ch) * oh * ow;
          const long xoff = (b * c + ch) * h * wd;
          for (long kh = 0; kh < k; ++kh) {
            const Span rows = valid_range(oh, s, kh - p, h);
            for (long kw = 0; kw < k; ++kw) {
              const long widx = (ch * k + kh) * k + kw;
              const Span cols = valid_range(ow, s, kw - p, wd);
              const T wt = w->value[widx];
              T acc = T(0);
              for (long r = rows.lo; r < rows.hi; ++r) {
                const long xrow = xoff + (r * s + kh - p) * wd + (kw - p);
                const T* grow = gplane + r * ow;
                if (x->requires_grad) {
                  T* dx = x->grad.data() + xrow;
                  for (long cc = cols.lo; cc < cols.hi; ++cc) dx[cc * s] += wt * grow[cc];
                }
                const T* xr = x->value.data() + xrow;
                for (long cc = cols.lo; cc < cols.hi; ++cc) acc += grow[cc] * xr[cc * s];
              }
              if (w->requires_grad) w->grad[widx] += acc;
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> pointwise_conv2d(const Tensor<T>& x, const Tensor<T>& w) {
  require_nchw("pointwise_conv2d", x.shape());
  require_nchw("pointwise_conv2d", w.shape());
  const long n = x.dim(0), ci = x.dim(1), hw = x.dim(2) * x.dim(3);
  const long co = w.dim(0);
  if (w.dim(1) != static_cast<std::size_t>(ci) || w.dim(2) != 1 || w.dim(3) != 1) {
    detail::shape_error("pointwise_conv2d", x.shape(), w.shape());
  }
  Tensor<T> out(Shape{x.dim(0), static_cast<std::size_t>(co), x.dim(2), x.dim(3)});
  const T* xv = x.values().data();
  const T* wv = w.values().data();
  T* ov = out.values().data();
  for (long b = 0; b < n; ++b) {
    for (long oc = 0; oc < co; ++oc) {
      T* o = ov + (b * co + oc) * hw;
      for (long ic = 0; ic < ci; ++ic) {
        const T wt = wv[oc * ci + ic];
        const T* xi = xv + (b * ci + ic) * hw;
        for (long i = 0; i < hw; ++i) o[i] += wt * xi[i];
      }
    }
  }
  if (needs_record({&x, &w})) {
    record(out, [x = x.impl(), w = w.impl(), out = out.impl(), n, ci, co, hw] {
      const T* gv = out->grad.data();
      for (long b = 0; b < n; ++b) {
        for (long oc = 0; oc < co; ++oc) {
          const T* g = gv + (b * co + oc) * hw;
          for (long ic = 0; ic < ci; ++ic) {
            const long xoff = (b * ci + ic) * hw;
            if (w->requires_grad) {
              const T* xi = x->value.data() + xoff;
              T acc = T(0);
              for (long i = 0; i < hw; ++i) acc += g[i] * xi[i];
              w->grad[oc * ci + ic] += acc;
            }
            if (x->requires_grad) {
              const T wt = w->value[oc * ci + ic];
              T* dx = x->grad.data() + xoff;
              for (long i = 0; i < hw; ++i) dx[i] += wt * g[i];
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> conv_transpose2d(const Tensor<T>& x, const Tensor<T>& w, int stride, int padding) {
  require_nchw("conv_transpose2d", x.shape());
  require_nchw("conv_transpose2d", w.shape());
  const long n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const long co = w.dim(1), k = w.dim(2);
  if (w.dim(0) != static_cast<std::size_t>(ci) || w.dim(3) != static_cast<std::size_t>(k)) {
    detail::shape_error("conv_transpose2d", x.shape(), w.shape());
  }
  const long s = stride, p = padding;
  const long oh = (h - 1) * s - 2 * p + k, ow = (wd - 1) * s - 2 * p + k;
  if (oh <= 0 || ow <= 0) detail::shape_error("conv_transpose2d", x.shape(), w.shape());
  Tensor<T> out(Shape{static_cast<std::size_t>(n), static_cast<std::size_t>(co),
                      static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  const T* xv = x.values().data();
  const T* wv = w.values().data();
  T* ov = out.values().data();
  for (long b = 0; b < n; ++b) {
    for (long ic = 0; ic < ci; ++ic) {
      const T* xplane = xv + (b * ci + ic) * h * wd;
      for (long oc = 0; oc < co; ++oc) {
        T* oplane = ov + (b * co + oc) * oh * ow;
        for (long kh = 0; kh < k; ++kh) {
          const Span rows = valid_range(h, s, kh - p, oh);
          for (long kw = 0; kw < k; ++kw) {
            const T wt = wv[((ic * co + oc) * k + kh) * k + kw];
            const Span cols = valid_range(wd, s, kw - p, ow);
            for (long r = rows.lo; r < rows.hi; ++r) {
              const T* xrow = xplane + r * wd;
              T* orow = oplane + (r * s + kh - p) * ow + (kw - p);
              for (long c = cols.lo; c < cols.hi; ++c) orow[c * s] += wt * xrow[c];
            }
          }
        }
      }
    }
  }
  if (needs_record({&x, &w})) {
    record(out, [x = x.impl(), w = w.impl(), out = out.impl(), n, ci, h, wd, co, k, s, p, oh, ow] {
      const T* gv = out->grad.data();
      for (long b = 0; b < n; ++b) {
        for (long ic = 0; ic < ci; ++ic) {
          const long xoff = (b * ci + ic) * h * wd;
          for (long oc = 0; oc < co; ++oc) {
            const T* gplane = gv + (b * co + oc) * oh * ow;
            for (long kh = 0; kh < k; ++kh) {
              const Span rows = valid_range(h, s, kh - p, oh);
              for (long kw = 0; kw < k; ++kw) {
                const long widx = ((ic * co + oc) * k + kh) * k + kw;
                const Span cols = valid_range(wd, s, kw - p, ow);
                const T wt = w->value[widx];
                T acc = T(0);
                for (long r = rows.lo; r < rows.hi; ++r) {
                  const T* grow = gplane + (r * s + kh - p) * ow + (kw - p);
                  if (x->requires_grad) {
                    T* dx = x->grad.data() + xoff + r * wd;
                    for (long c = cols.lo; c < cols.hi; ++c) dx[c] += wt * grow[c * s];
                  }
                  const T* xr = x->value.data() + xoff + r * wd;
                  for (long c = cols.lo; c < cols.hi; ++c) acc += xr[c] * grow[c * s];
                }
                if (w->requires_grad) w->grad[widx] += acc;
              }
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> upsample_nearest2x(const Tensor<T>& x) {
  require_nchw("upsample_nearest2x", x.shape());
  const std::size_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor<T> out(Shape{x.dim(0), x.dim(1), 2 * h, 2 * w});
  const T* xv = x.values().data();
  T* ov = out.values().data();
  for (std::size_t pl = 0; pl < planes; ++pl) {
    for (std::size_t r = 0; r < 2 * h; ++r) {
      for (std::size_t c = 0; c < 2 * w; ++c) {
        ov[(pl * 2 * h + r) * 2 * w + c] = xv[(pl * h + r / 2) * w + c / 2];
      }
    }
  }
  if (needs_record({&x})) {
    record(out, [x = x.impl(), out = out.impl(), planes, h, w] {
      for (std::size_t pl = 0; pl < planes; ++pl) {
        for (std::size_t r = 0; r < 2 * h; ++r) {
          for (std::size_t c = 0; c < 2 * w; ++c) {
            x->grad[(pl * h + r / 2) * w + c / 2] += out->grad[(pl * 2 * h + r) * 2 * w + c];
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> conv_forward(const ConvSpec& spec, const Tensor<T>& w, const Tensor<T>& x) {
  spec.output_shape(x.shape());
  if (w.shape() != spec.weight_shape()) detail::shape_error(to_string(spec.kind) + " conv weights", spec.weight_shape(), w.shape());
  switch (spec.kind) {
    case ConvKind::kPlain: return conv2d(x, w, spec.stride, spec.padding());
    case ConvKind::kDepthwise: return depthwise_conv2d(x, w, spec.stride, spec.padding());
    case ConvKind::kPointwise: return pointwise_conv2d(x, w);
    case ConvKind::kTransposed: return conv_transpose2d(x, w, spec.stride, spec.padding());
  }
  throw std::logic_error("conv_forward: unknown kind");
}

CoverageGrid transposed_overlap_pattern(int k, int s, int extent) {
  if (s < 1 || k < s || extent < 1) {
    throw std::invalid_argument("transposed_overlap_pattern: need k >= s >= 1 and extent >= 1");
  }
  CoverageGrid grid;
  grid.size = (extent - 1) * s + k;
  grid.counts.assign(static_cast<std::size_t>(grid.size) * grid.size, 0);
  for (int ih = 0; ih < extent; ++ih) {
    for (int iw = 0; iw < extent; ++iw) {
      for (int kh = 0; kh < k; ++kh) {
        for (int kw = 0; kw < k; ++kw) {
          ++grid.counts[static_cast<std::size_t>((ih * s + kh) * grid.size + iw * s + kw)];
        }
      }
    }
  }
  grid.interior_begin = k - 1;
  grid.interior_end = (extent - 1) * s;
  return grid;
}

#define POSENAS_INSTANTIATE_CONV(T)                                                    \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, int, int);             \
  template Tensor<T> depthwise_conv2d(const Tensor<T>&, const Tensor<T>&, int, int);   \
  template Tensor<T> pointwise_conv2d(const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> conv_transpose2d(const Tensor<T>&, const Tensor<T>&, int, int);   \
  template Tensor<T> upsample_nearest2x(const Tensor<T>&);                             \
  template Tensor<T> conv_forward(const ConvSpec&, const Tensor<T>&, const Tensor<T>&);

POSENAS_INSTANTIATE_CONV(float)
POSENAS_INSTANTIATE_CONV(double)

#undef POSENAS_INSTANTIATE_CONV

}  // namespace posenas
