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

#include <cstddef>
#include <functional>
#include <vector>

#include "posenas/autograd/tensor.hpp"

namespace posenas {

/// Ordered record of executed primitives. Each entry is the adjoint of one
/// primitive: it reads the output gradient and accumulates into its inputs.
///
/// A tape is single-writer. It only records while made active on the current
/// thread with a TapeScope. `backward` replays entries in reverse order, then
/// frees them; replaying again without re-recording is an error.
template <typename T>
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(std::function<void()> adjoint);
  std::size_t size() const { return entries_.size(); }
  bool replayed() const { return replayed_; }

  void backward(const Tensor<T>& loss);
  void clear();

 private:
  std::vector<std::function<void()>> entries_;
  bool replayed_ = false;
};

/// Makes `tape` the recording target of the current thread for its lifetime.
template <typename T>
class TapeScope {
 public:
  explicit TapeScope(Tape<T>& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape<T>* previous_;
};

template <typename T>
Tape<T>* active_tape();

/// Backward through the currently active tape.
template <typename T>
void backward(const Tensor<T>& loss);

extern template class Tape<float>;
extern template class Tape<double>;
extern template class TapeScope<float>;
extern template class TapeScope<double>;

}  // namespace posenas
