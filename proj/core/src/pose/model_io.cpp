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

#include "posenas/pose/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace posenas {
namespace {

constexpr std::string_view kMagic = "epmodel v1\n";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  explicit Reader(const std::string& b) : b_(b) {}

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n, const char* what) const {
    if (b_.size() - pos_ < n) throw ModelFormatError(pos_, std::string("truncated ") + what);
  }

  const std::string& b_;
  std::size_t pos_ = 0;
};

template <typename T>
std::vector<NamedTensor<T>> all_tensors(Network<T>& net) {
  auto sd = net.state();
  auto out = std::move(sd.parameters);
  out.insert(out.end(), sd.buffers.begin(), sd.buffers.end());
  return out;
}

}  // namespace

template <typename T>
std::string serialize_model(Network<T>& net) {
  std::string out(kMagic);
  const std::string arch = serialize(net.descriptor());
  put_u32(out, static_cast<std::uint32_t>(arch.size()));
  out += arch;
  const auto tensors = all_tensors(net);
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
    for (T v : t.values()) put_f32(out, static_cast<float>(v));
  }
  return out;
}

template <typename T>
Network<T> parse_model(const std::string& bytes) {
  Reader r(bytes);
  if (r.bytes(std::min(bytes.size(), kMagic.size()), "header") != kMagic) throw ModelFormatError(0, "missing 'epmodel v1' header");
  const std::size_t arch_at = r.pos();
  const auto arch_len = r.u32("architecture length");
  const std::string arch = r.bytes(arch_len, "architecture text");
  ArchitectureDescriptor desc;
  try {
    desc = parse_architecture(arch, -1);
  } catch (const ArchParseError& e) {
    throw ModelFormatError(arch_at, std::string("architecture ") + e.what());
  }
  Rng rng(0);
  Network<T> net(desc, rng);
  auto tensors = all_tensors(net);
  const std::size_t count_at = r.pos();
  const auto count = r.u32("tensor count");
  if (count != tensors.size()) {
    throw ModelFormatError(count_at, "expected " + std::to_string(tensors.size()) + " tensors, found " + std::to_string(count));
  }
  for (auto& [name, t] : tensors) {
    const std::size_t at = r.pos();
    const auto len = r.u32("name length");
    const auto got = r.bytes(len, "tensor name");
    if (got != name) throw ModelFormatError(at, "expected tensor '" + name + "', found '" + got + "'");
    const std::size_t shape_at = r.pos();
    const auto rank = r.u32("rank");
    Shape s;
    for (std::uint32_t i = 0; i < rank && i < 8; ++i) s.push_back(r.u32("dimension"));
    if (s != t.shape()) throw ModelFormatError(shape_at, "tensor '" + name + "' has shape " + shape_str(s) + ", expected " + shape_str(t.shape()));
    for (auto& v : t.values()) v = static_cast<T>(r.f32("tensor values"));
  }
  if (!r.done()) throw ModelFormatError(r.pos(), "trailing bytes after the last tensor");
  return net;
}

template <typename T>
void save_model(Network<T>& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto b = serialize_model(net);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

template <typename T>
Network<T> load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model<T>(ss.str());
}

template std::string serialize_model<float>(Network<float>&);
template std::string serialize_model<double>(Network<double>&);
template Network<float> parse_model<float>(const std::string&);
template Network<double> parse_model<double>(const std::string&);
template void save_model<float>(Network<float>&, const std::filesystem::path&);
template void save_model<double>(Network<double>&, const std::filesystem::path&);
template Network<float> load_model<float>(const std::filesystem::path&);
template Network<double> load_model<double>(const std::filesystem::path&);

}  // namespace posenas
