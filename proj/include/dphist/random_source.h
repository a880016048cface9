//
// Copyright 2026 The dphist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPHIST_RANDOM_SOURCE_H_
#define DPHIST_RANDOM_SOURCE_H_

#include <cstdint>
#include <random>

#include "absl/strings/string_view.h"

namespace dphist {

// SplitMix64 finalizer. Used to derive child seeds.
uint64_t MixSeed(uint64_t value);

// Derives a child seed from a parent seed and a stream index or key. Pure
// function of its arguments, independent of any engine state.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);
uint64_t DeriveSeed(uint64_t seed, absl::string_view key);

// A seeded, single-owner stream of uniform draws. The engine is
// std::mt19937_64, whose output sequence is fixed by the standard, so the same
// seed and call sequence produce bit-identical draws on every platform.
//
// Not thread-safe. Parallel callers take independent children via Child().
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextBits() { return engine_(); }

  // Uniform on the open interval (0, 1): the 52-bit lattice shifted by half a
  // step. Every k + 0.5 is exact in a double, so neither endpoint is reachable.
  double Uniform() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  RandomSource Child(uint64_t stream) const {
    return RandomSource(DeriveSeed(seed_, stream));
  }
  RandomSource Child(absl::string_view key) const {
    return RandomSource(DeriveSeed(seed_, key));
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dphist

#endif  // DPHIST_RANDOM_SOURCE_H_
