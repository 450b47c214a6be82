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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evptrack/tensor.hpp"

namespace evp {

/// Optimizer groups. The backbone is the patch embedding plus the fusion
/// encoder; everything else (prompt generators, temporal encoder, head) is
/// "other".
enum class ParamGroup { kBackbone, kOther };

template <typename T>
struct NamedParameter {
  std::string path;
  Tensor<T> tensor;
  ParamGroup group = ParamGroup::kOther;
};

template <typename T>
using ParameterList = std::vector<NamedParameter<T>>;

struct CheckpointEntry {
  Shape shape;
  std::vector<float> values;
};

/// In-memory form of a parameter archive. Entries are keyed (and therefore
/// serialized) in bytewise path order, which makes encoding byte-stable.
struct Checkpoint {
  std::string metadata;  // free-form JSON text, typically the model config
  std::map<std::string, CheckpointEntry> entries;
};

/// Binary layout, all integers little-endian:
///
///   char[8]  magic "EVPCKPT1"
///   u32      metadata byte length, followed by the metadata bytes
///   u32      entry count
///   per entry, ascending bytewise path order:
///     u32    path byte length, followed by the path bytes
///     u32    rank, followed by rank u32 dimensions
///     f32    product(dims) values, IEEE-754 binary32
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

template <typename T>
Checkpoint snapshot(const ParameterList<T>& params, std::string metadata = {});

/// Copies archived values into `params`. Every parameter must be present with
/// a matching shape; extra archive entries are an error as well.
template <typename T>
void restore(const ParameterList<T>& params, const Checkpoint& ckpt);

}  // namespace evp
