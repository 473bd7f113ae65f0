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

#include <functional>

#include "posenas/autograd/tensor.hpp"

namespace posenas {

using ScalarFn = std::function<Tensor<double>(const Tensor<double>&)>;

/// Compares the taped gradient of `f` at `x` against central differences.
///
/// Returns max_i |analytic_i - fd_i| / max(1, |fd_i|). `f` must return a
/// one-element tensor; it is evaluated once under a fresh tape and 2*numel(x)
/// times without one. `x` keeps its values; its grad flag is restored.
double grad_check(const ScalarFn& f, Tensor<double> x, double step = 1e-5);

/// Variant for functions of state captured by `f` (e.g. module weights):
/// `param` must be the tensor `f` reads, and is perturbed in place.
double grad_check_param(const std::function<Tensor<double>()>& f, Tensor<double> param,
                        double step = 1e-5);

}  // namespace posenas
