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

// Naive reference implementations used as test oracles.

#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "posenas/autograd/tensor.hpp"

namespace posenas::testing {

inline Tensor<double> random_tensor(const Shape& shape, std::uint64_t seed, bool grad = true, double lo = -1,
                                    double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = d(rng);
  return Tensor<double>(shape, std::move(v), grad);
}

/// Direct seven-loop cross-correlation with zero padding. groups == Cin gives
/// depthwise (weight [C,1,k,k]); groups == 1 gives [Cout,Cin,k,k].
inline std::vector<double> naive_conv(const std::vector<double>& x, std::size_t n, std::size_t ci, std::size_t h,
                                      std::size_t w, const std::vector<double>& wt, std::size_t co, std::size_t k,
                                      int stride, int pad, bool depthwise, std::size_t* macs = nullptr) {
  const long oh = (static_cast<long>(h) + 2 * pad - static_cast<long>(k)) / stride + 1;
  const long ow = (static_cast<long>(w) + 2 * pad - static_cast<long>(k)) / stride + 1;
  std::vector<double> out(n * co * static_cast<std::size_t>(oh * ow), 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t o = 0; o < co; ++o)
      for (long r = 0; r < oh; ++r)
        for (long c = 0; c < ow; ++c)
          for (std::size_t i = 0; i < (depthwise ? 1 : ci); ++i)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                if (macs) ++*macs;
                const long y = r * stride + static_cast<long>(kh) - pad;
                const long xx = c * stride + static_cast<long>(kw) - pad;
                if (y < 0 || xx < 0 || y >= static_cast<long>(h) || xx >= static_cast<long>(w)) continue;
                const std::size_t ic = depthwise ? o : i;
                const double wv = depthwise ? wt[(o * k + kh) * k + kw] : wt[((o * ci + i) * k + kh) * k + kw];
                out[((b * co + o) * oh + r) * ow + c] += wv * x[((b * ci + ic) * h + y) * w + xx];
              }
  return out;
}

/// Scatter form of a transposed convolution, weight [Cin, Cout, k, k]; the
/// full output is cropped by `pad` on each side.
inline std::vector<double> naive_conv_transpose(const std::vector<double>& x, std::size_t n, std::size_t ci,
                                                std::size_t h, std::size_t w, const std::vector<double>& wt,
                                                std::size_t co, std::size_t k, int stride, int pad) {
  const long fh = (static_cast<long>(h) - 1) * stride + static_cast<long>(k);
  const long fw = (static_cast<long>(w) - 1) * stride + static_cast<long>(k);
  const long oh = fh - 2 * pad, ow = fw - 2 * pad;
  std::vector<double> out(n * co * static_cast<std::size_t>(oh * ow), 0.0);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t i = 0; i < ci; ++i)
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
          for (std::size_t o = 0; o < co; ++o)
            for (std::size_t kh = 0; kh < k; ++kh)
              for (std::size_t kw = 0; kw < k; ++kw) {
                const long y = static_cast<long>(r) * stride + static_cast<long>(kh) - pad;
                const long xx = static_cast<long>(c) * stride + static_cast<long>(kw) - pad;
                if (y < 0 || xx < 0 || y >= oh || xx >= ow) continue;
                out[((b * co + o) * oh + y) * ow + xx] +=
                    x[((b * ci + i) * h + r) * w + c] * wt[((i * co + o) * k + kh) * k + kw];
              }
  return out;
}

}  // namespace posenas::testing
