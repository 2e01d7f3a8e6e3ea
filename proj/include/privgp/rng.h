//
// Copyright 2026 The privgp Authors
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

#ifndef PRIVGP_RNG_H_
#define PRIVGP_RNG_H_

#include <cstdint>
#include <random>

namespace privgp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent, reproducible stream seeds
// from a master seed.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t DeriveSeed(uint64_t base, uint64_t stream,
                              uint64_t index = 0) {
  return Mix64(Mix64(Mix64(base) ^ stream) ^ index);
}

// Named streams of a single run. Keeping them separate makes the decision-set
// sequence independent of the actions played.
enum class Stream : uint64_t {
  kFunction = 1,
  kDecisionSets = 2,
  kRewards = 3,
  kPrivacyNoise = 4,
  kRandomFeatures = 5,
};

inline Rng MakeRng(uint64_t seed, Stream stream, uint64_t index = 0) {
  return Rng(DeriveSeed(seed, static_cast<uint64_t>(stream), index));
}

}  // namespace privgp

#endif  // PRIVGP_RNG_H_
