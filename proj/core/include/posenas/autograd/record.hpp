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

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>

#include "posenas/autograd/tape.hpp"

// Helpers for writing primitives outside autograd-core (convolutions etc.).

namespace posenas::detail {

/// True when the output of a primitive over `inputs` must be recorded.
template <typename T>
bool needs_record(std::initializer_list<const Tensor<T>*> inputs) {
  if (active_tape<T>() == nullptr) return false;
  for (const Tensor<T>* t : inputs) {
    if (t->requires_grad()) return true;
  }
  return false;
}

/// Marks `out` grad-enabled and appends `adjoint` to the active tape.
template <typename T, typename F>
void record(Tensor<T>& out, F&& adjoint) {
  out.set_requires_grad(true);
  active_tape<T>()->record(std::forward<F>(adjoint));
}

[[noreturn]] inline void shape_error(const std::string& primitive, const Shape& a,
                                     const Shape& b) {
  throw std::invalid_argument(primitive + ": shape mismatch " + shape_str(a) + " vs " +
                              shape_str(b));
}

}  // namespace posenas::detail
