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

#include "posenas/autograd/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "posenas/autograd/tape.hpp"

namespace posenas {

double grad_check_param(const std::function<Tensor<double>()>& f, Tensor<double> param,
                        double step) {
  const bool had_grad = param.requires_grad();
  std::vector<double> analytic;
  {
    param.set_requires_grad(true);
    param.zero_grad();
    Tape<double> tape;
    TapeScope<double> scope(tape);
    Tensor<double> y = f();
    if (!y.defined() || y.numel() != 1) {
      throw std::invalid_argument("grad_check: function is not scalar-valued");
    }
    if (y.requires_grad()) tape.backward(y);
    analytic.assign(param.grad().begin(), param.grad().end());
  }
  param.set_requires_grad(had_grad);

  double worst = 0.0;
  auto values = param.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = f().item();
    values[i] = saved - step;
    const double down = f().item();
    values[i] = saved;
    const double fd = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(analytic[i] - fd) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

double grad_check(const ScalarFn& f, Tensor<double> x, double step) {
  return grad_check_param([&] { return f(x); }, x, step);
}

}  // namespace posenas
