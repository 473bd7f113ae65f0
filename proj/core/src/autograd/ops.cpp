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

#include "posenas/autograd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "posenas/autograd/record.hpp"

namespace posenas {
namespace {

using detail::needs_record;
using detail::record;
using detail::shape_error;

enum class Broadcast { kNone, kLeftScalar, kRightScalar };

template <typename T>
Broadcast check_binary(const char* name, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() == b.shape()) return Broadcast::kNone;
  if (b.numel() == 1) return Broadcast::kRightScalar;
  if (a.numel() == 1) return Broadcast::kLeftScalar;
  shape_error(name, a.shape(), b.shape());
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  const Broadcast bc = check_binary("add", a, b);
  const Tensor<T>& big = bc == Broadcast::kLeftScalar ? b : a;
  Tensor<T> out(big.shape());
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  const std::size_t n = o.size();
  for (std::size_t i = 0; i < n; ++i) {
    o[i] = av[bc == Broadcast::kLeftScalar ? 0 : i] + bv[bc == Broadcast::kRightScalar ? 0 : i];
  }
  if (needs_record({&a, &b})) {
    record(out, [a = a.impl(), b = b.impl(), out = out.impl(), bc] {
      const std::size_t n = out->grad.size();
      if (a->requires_grad) {
        for (std::size_t i = 0; i < n; ++i) a->grad[bc == Broadcast::kLeftScalar ? 0 : i] += out->grad[i];
      }
      if (b->requires_grad) {
        for (std::size_t i = 0; i < n; ++i) b->grad[bc == Broadcast::kRightScalar ? 0 : i] += out->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return add(a, scale(b, T(-1)));
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  const Broadcast bc = check_binary("mul", a, b);
  const Tensor<T>& big = bc == Broadcast::kLeftScalar ? b : a;
  Tensor<T> out(big.shape());
  auto o = out.values();
  auto av = a.values();
  auto bv = b.values();
  const std::size_t n = o.size();
  for (std::size_t i = 0; i < n; ++i) {
    o[i] = av[bc == Broadcast::kLeftScalar ? 0 : i] * bv[bc == Broadcast::kRightScalar ? 0 : i];
  }
  if (needs_record({&a, &b})) {
    record(out, [a = a.impl(), b = b.impl(), out = out.impl(), bc] {
      const std::size_t n = out->grad.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ia = bc == Broadcast::kLeftScalar ? 0 : i;
        const std::size_t ib = bc == Broadcast::kRightScalar ? 0 : i;
        if (a->requires_grad) a->grad[ia] += out->grad[i] * b->value[ib];
        if (b->requires_grad) b->grad[ib] += out->grad[i] * a->value[ia];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  Tensor<T> out(a.shape());
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = av[i] * factor;
  if (needs_record({&a})) {
    record(out, [a = a.impl(), out = out.impl(), factor] {
      for (std::size_t i = 0; i < out->grad.size(); ++i) a->grad[i] += out->grad[i] * factor;
    });
  }
  return out;
}

template <typename T>
Tensor<T> relu6(const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::clamp(av[i], T(0), T(6));
  if (needs_record({&a})) {
    record(out, [a = a.impl(), out = out.impl()] {
      for (std::size_t i = 0; i < out->grad.size(); ++i) {
        const T v = a->value[i];
        if (v > T(0) && v < T(6)) a->grad[i] += out->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> log(const Tensor<T>& a) {
  Tensor<T> out(a.shape());
  auto o = out.values();
  auto av = a.values();
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (!(av[i] > T(0))) {
      throw std::domain_error("log: non-positive input " + std::to_string(av[i]));
    }
    o[i] = std::log(av[i]);
  }
  if (needs_record({&a})) {
    record(out, [a = a.impl(), out = out.impl()] {
      for (std::size_t i = 0; i < out->grad.size(); ++i) a->grad[i] += out->grad[i] / a->value[i];
    });
  }
  return out;
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T acc = T(0);
  for (T v : a.values()) acc += v;
  Tensor<T> out = Tensor<T>::scalar(acc);
  if (needs_record({&a})) {
    record(out, [a = a.impl(), out = out.impl()] {
      const T g = out->grad[0];
      for (T& ga : a->grad) ga += g;
    });
  }
  return out;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  if (logits.rank() != 1 || logits.numel() == 0) {
    throw std::invalid_argument("softmax: expected a non-empty 1-D vector, got " +
                                shape_str(logits.shape()));
  }
  auto in = logits.values();
  const T top = *std::max_element(in.begin(), in.end());
  Tensor<T> out(logits.shape());
  auto o = out.values();
  T total = T(0);
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = std::exp(in[i] - top);
    total += o[i];
  }
  for (T& v : o) v /= total;
  if (needs_record({&logits})) {
    record(out, [a = logits.impl(), out = out.impl()] {
      T dot = T(0);
      for (std::size_t i = 0; i < out->grad.size(); ++i) dot += out->grad[i] * out->value[i];
      for (std::size_t i = 0; i < out->grad.size(); ++i) {
        a->grad[i] += out->value[i] * (out->grad[i] - dot);
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& weights, std::span<const Tensor<T>> tensors) {
  if (tensors.empty()) throw std::invalid_argument("weighted_sum: no tensors");
  if (weights.rank() != 1 || weights.numel() != tensors.size()) {
    throw std::invalid_argument("weighted_sum: weights of shape " + shape_str(weights.shape()) +
                                " for " + std::to_string(tensors.size()) + " tensors");
  }
  for (const auto& t : tensors) {
    if (t.shape() != tensors[0].shape()) shape_error("weighted_sum", tensors[0].shape(), t.shape());
  }
  auto w = weights.values();
  Tensor<T> out(tensors[0].shape());
  auto o = out.values();
  {
    auto t0 = tensors[0].values();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = w[0] * t0[j];
  }
  for (std::size_t i = 1; i < tensors.size(); ++i) {
    auto ti = tensors[i].values();
    for (std::size_t j = 0; j < o.size(); ++j) o[j] += w[i] * ti[j];
  }
  bool any = active_tape<T>() != nullptr && weights.requires_grad();
  for (const auto& t : tensors) any = any || (active_tape<T>() != nullptr && t.requires_grad());
  if (any) {
    std::vector<std::shared_ptr<detail::TensorImpl<T>>> parts;
    parts.reserve(tensors.size());
    for (const auto& t : tensors) parts.push_back(t.impl());
    record(out, [w = weights.impl(), parts = std::move(parts), out = out.impl()] {
      const auto& g = out->grad;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& p = parts[i];
        if (w->requires_grad) {
          T dot = T(0);
          for (std::size_t j = 0; j < g.size(); ++j) dot += g[j] * p->value[j];
          w->grad[i] += dot;
        }
        if (p->requires_grad) {
          const T wi = w->value[i];
          for (std::size_t j = 0; j < g.size(); ++j) p->grad[j] += wi * g[j];
        }
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> mse(const Tensor<T>& pred, const Tensor<T>& target) {
  if (pred.shape() != target.shape()) shape_error("mse", pred.shape(), target.shape());
  const std::size_t norm = pred.rank() == 4 ? pred.dim(0) * pred.dim(1) : pred.numel();
  if (norm == 0) throw std::invalid_argument("mse: empty input");
  auto p = pred.values();
  auto t = target.values();
  T acc = T(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const T d = p[i] - t[i];
    acc += d * d;
  }
  Tensor<T> out = Tensor<T>::scalar(acc / static_cast<T>(norm));
  if (needs_record({&pred, &target})) {
    record(out, [p = pred.impl(), t = target.impl(), out = out.impl(), norm] {
      const T g = out->grad[0] * T(2) / static_cast<T>(norm);
      for (std::size_t i = 0; i < p->value.size(); ++i) {
        const T d = g * (p->value[i] - t->value[i]);
        if (p->requires_grad) p->grad[i] += d;
        if (t->requires_grad) t->grad[i] -= d;
      }
    });
  }
  return out;
}

template <typename T>
Tensor<T> batch_norm(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                     std::span<T> running_mean, std::span<T> running_var,
                     const NormOptions& options) {
  if (x.rank() != 4) throw std::invalid_argument("batch_norm: expected NCHW, got " + shape_str(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  if (gamma.numel() != c || beta.numel() != c || running_mean.size() != c ||
      running_var.size() != c) {
    shape_error("batch_norm", x.shape(), gamma.shape());
  }
  const std::size_t count = n * hw;
  const bool batch_stats = options.mode != NormMode::kRunningStats;
  std::vector<T> mean(c), inv_std(c);
  auto xv = x.values();
  for (std::size_t ch = 0; ch < c; ++ch) {
    if (batch_stats) {
      T m = T(0);
      for (std::size_t b = 0; b < n; ++b) {
        const T* src = xv.data() + (b * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) m += src[i];
      }
      m /= static_cast<T>(count);
      T v = T(0);
      for (std::size_t b = 0; b < n; ++b) {
        const T* src = xv.data() + (b * c + ch) * hw;
        for (std::size_t i = 0; i < hw; ++i) v += (src[i] - m) * (src[i] - m);
      }
      v /= static_cast<T>(count);
      mean[ch] = m;
      inv_std[ch] = T(1) / std::sqrt(v + static_cast<T>(options.eps));
      if (options.mode == NormMode::kBatchStats) {
        const T mom = static_cast<T>(options.momentum);
        const T unbiased = count > 1 ? v * static_cast<T>(count) / static_cast<T>(count - 1) : v;
        running_mean[ch] = (T(1) - mom) * running_mean[ch] + mom * m;
        running_var[ch] = (T(1) - mom) * running_var[ch] + mom * unbiased;
      }
    } else {
      mean[ch] = running_mean[ch];
      inv_std[ch] = T(1) / std::sqrt(running_var[ch] + static_cast<T>(options.eps));
    }
  }
  Tensor<T> out(x.shape());
  auto o = out.values();
  auto gv = gamma.values();
  auto bv = beta.values();
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t base = (b * c + ch) * hw;
      const T a = gv[ch] * inv_std[ch];
      const T shift = bv[ch] - a * mean[ch];
      for (std::size_t i = 0; i < hw; ++i) o[base + i] = a * xv[base + i] + shift;
    }
  }
  if (needs_record({&x, &gamma, &beta})) {
    record(out, [x = x.impl(), g = gamma.impl(), bt = beta.impl(), out = out.impl(),
                 mean = std::move(mean), inv_std = std::move(inv_std), n, c, hw, batch_stats] {
      const auto& go = out->grad;
      const T cnt = static_cast<T>(n * hw);
      for (std::size_t ch = 0; ch < c; ++ch) {
        T sum_g = T(0), sum_gx = T(0);
        for (std::size_t b = 0; b < n; ++b) {
          const std::size_t base = (b * c + ch) * hw;
          for (std::size_t i = 0; i < hw; ++i) {
            const T xhat = (x->value[base + i] - mean[ch]) * inv_std[ch];
            sum_g += go[base + i];
            sum_gx += go[base + i] * xhat;
          }
        }
        if (g->requires_grad) g->grad[ch] += sum_gx;
        if (bt->requires_grad) bt->grad[ch] += sum_g;
        if (!x->requires_grad) continue;
        const T a = g->value[ch] * inv_std[ch];
        for (std::size_t b = 0; b < n; ++b) {
          const std::size_t base = (b * c + ch) * hw;
          for (std::size_t i = 0; i < hw; ++i) {
            if (batch_stats) {
              const T xhat = (x->value[base + i] - mean[ch]) * inv_std[ch];
              x->grad[base + i] += a * (go[base + i] - sum_g / cnt - xhat * sum_gx / cnt);
            } else {
              x->grad[base + i] += a * go[base + i];
            }
          }
        }
      }
    });
  }
  return out;
}

#define POSENAS_INSTANTIATE_OPS(T)                                                            \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> scale(const Tensor<T>&, T);                                              \
  template Tensor<T> relu6(const Tensor<T>&);                                                 \
  template Tensor<T> log(const Tensor<T>&);                                                   \
  template Tensor<T> sum(const Tensor<T>&);                                                   \
  template Tensor<T> softmax(const Tensor<T>&);                                               \
  template Tensor<T> weighted_sum(const Tensor<T>&, std::span<const Tensor<T>>);              \
  template Tensor<T> mse(const Tensor<T>&, const Tensor<T>&);                                 \
  template Tensor<T> batch_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,         \
                                std::span<T>, std::span<T>, const NormOptions&);

POSENAS_INSTANTIATE_OPS(float)
POSENAS_INSTANTIATE_OPS(double)

#undef POSENAS_INSTANTIATE_OPS

}  // namespace posenas
