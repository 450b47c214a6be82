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
#include <random>

namespace evp {

/// Seeded pseudo-random source. Draw sequences depend only on the seed; the
/// distribution transforms are implemented here rather than taken from
/// <random> so results do not vary between standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal (Box-Muller).
  double normal();
  /// Standard normal resampled until |z| <= bound.
  double truncated_normal(double bound = 2.0);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Independent generator derived from this seed and a stream id.
  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace evp
