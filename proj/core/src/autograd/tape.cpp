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

#include "posenas/autograd/tape.hpp"

#include <stdexcept>

namespace posenas {
namespace {

template <typename T>
thread_local Tape<T>* g_active_tape = nullptr;

}  // namespace

template <typename T>
void Tape<T>::record(std::function<void()> adjoint) {
  entries_.push_back(std::move(adjoint));
  replayed_ = false;
}

template <typename T>
void Tape<T>::backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " +
                                (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
  }
  if (!loss.requires_grad()) return;  // constant loss: nothing to propagate
  if (replayed_) {
    throw std::logic_error("backward: tape already replayed; record the graph again");
  }
  loss.impl()->grad[0] += T(1);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
  clear();
  replayed_ = true;
}

template <typename T>
void Tape<T>::clear() {
  entries_.clear();
  entries_.shrink_to_fit();
}

template <typename T>
TapeScope<T>::TapeScope(Tape<T>& tape) : previous_(g_active_tape<T>) {
  g_active_tape<T> = &tape;
}

template <typename T>
TapeScope<T>::~TapeScope() {
  g_active_tape<T> = previous_;
}

template <typename T>
Tape<T>* active_tape() {
  return g_active_tape<T>;
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw std::invalid_argument("backward: loss must be a scalar");
  }
  Tape<T>* tape = active_tape<T>();
  if (tape == nullptr) throw std::logic_error("backward: no active tape");
  tape->backward(loss);
}

template class Tape<float>;
template class Tape<double>;
template class TapeScope<float>;
template class TapeScope<double>;
template Tape<float>* active_tape<float>();
template Tape<double>* active_tape<double>();
template void backward<float>(const Tensor<float>&);
template void backward<double>(const Tensor<double>&);

}  // namespace posenas
