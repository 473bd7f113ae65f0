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

#include <filesystem>
#include <stdexcept>
#include <string>

#include "posenas/arch/network.hpp"

namespace posenas {

class ModelFormatError : public std::runtime_error {
 public:
  ModelFormatError(std::size_t offset, const std::string& what)
      : std::runtime_error("byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Binary layout, integers little-endian u32:
///   "epmodel v1\n"
///   arch_len, architecture text
///   count, then per tensor: name_len, name, rank, dims..., float32 values
/// Tensors are the network's parameters followed by its buffers.
template <typename T>
std::string serialize_model(Network<T>& net);

/// Rebuilds the network from the embedded architecture and loads every
/// tensor; names, shapes and count must match exactly.
template <typename T>
Network<T> parse_model(const std::string& bytes);

template <typename T>
void save_model(Network<T>& net, const std::filesystem::path& path);
template <typename T>
Network<T> load_model(const std::filesystem::path& path);

}  // namespace posenas
