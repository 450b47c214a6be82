// Copyright 2026 The evptrack Authors
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

#include "evptrack/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "evptrack/errors.hpp"

namespace evp {

namespace {

constexpr char kMagic[8] = {'E', 'V', 'P', 'C', 'K', 'P', 'T', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

void put_bytes(std::vector<std::uint8_t>& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void magic() {
    need(sizeof(kMagic));
    if (std::memcmp(bytes_.data(), kMagic, sizeof(kMagic)) != 0) {
      throw FormatError("checkpoint: bad magic");
    }
    pos_ += sizeof(kMagic);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint: truncated archive");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_bytes(out, ckpt.metadata);
  put_u32(out, static_cast<std::uint32_t>(ckpt.entries.size()));
  for (const auto& [path, entry] : ckpt.entries) {
    if (shape_numel(entry.shape) != entry.values.size()) {
      throw FormatError("checkpoint: entry '" + path + "' shape/value count mismatch");
    }
    put_bytes(out, path);
    put_u32(out, static_cast<std::uint32_t>(entry.shape.size()));
    for (std::size_t d : entry.shape) put_u32(out, static_cast<std::uint32_t>(d));
    for (float v : entry.values) put_f32(out, v);
  }
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  in.magic();
  Checkpoint ckpt;
  ckpt.metadata = in.str();
  const std::uint32_t count = in.u32();
  for (std::uint32_t e = 0; e < count; ++e) {
    std::string path = in.str();
    CheckpointEntry entry;
    const std::uint32_t rank = in.u32();
    for (std::uint32_t r = 0; r < rank; ++r) entry.shape.push_back(in.u32());
    const std::size_t n = shape_numel(entry.shape);
    entry.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) entry.values.push_back(in.f32());
    if (!ckpt.entries.emplace(std::move(path), std::move(entry)).second) {
      throw FormatError("checkpoint: duplicate entry");
    }
  }
  if (!in.done()) throw FormatError("checkpoint: trailing bytes");
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

template <typename T>
Checkpoint snapshot(const ParameterList<T>& params, std::string metadata) {
  Checkpoint ckpt;
  ckpt.metadata = std::move(metadata);
  for (const auto& p : params) {
    CheckpointEntry entry;
    entry.shape = p.tensor.shape();
    entry.values.assign(p.tensor.data().begin(), p.tensor.data().end());
    if (!ckpt.entries.emplace(p.path, std::move(entry)).second) {
      throw FormatError("snapshot: duplicate parameter path '" + p.path + "'");
    }
  }
  return ckpt;
}

template <typename T>
void restore(const ParameterList<T>& params, const Checkpoint& ckpt) {
  if (params.size() != ckpt.entries.size()) {
    throw FormatError("checkpoint has " + std::to_string(ckpt.entries.size()) +
                      " entries but the model has " + std::to_string(params.size()) + " parameters");
  }
  for (const auto& p : params) {
    const auto it = ckpt.entries.find(p.path);
    if (it == ckpt.entries.end()) throw FormatError("checkpoint is missing '" + p.path + "'");
    if (it->second.shape != p.tensor.shape()) {
      throw FormatError("checkpoint entry '" + p.path + "' has shape " + shape_str(it->second.shape) +
                        ", model expects " + shape_str(p.tensor.shape()));
    }
    Tensor<T> t = p.tensor;
    auto dst = t.mutable_data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(it->second.values[i]);
  }
}

template Checkpoint snapshot<float>(const ParameterList<float>&, std::string);
template Checkpoint snapshot<double>(const ParameterList<double>&, std::string);
template void restore<float>(const ParameterList<float>&, const Checkpoint&);
template void restore<double>(const ParameterList<double>&, const Checkpoint&);

}  // namespace evp
