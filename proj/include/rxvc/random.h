// Copyright 2026 The rxvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RXVC_RANDOM_H_
#define RXVC_RANDOM_H_

#include <cstdint>
#include <random>

namespace rxvc {

// All randomness flows through mt19937_64 and the portable draws below, so
// seeded runs reproduce across standard libraries.
using Rng = std::mt19937_64;

uint64_t MixSeed(uint64_t a, uint64_t b);

// Independent stream keyed by (seed, a, b, c). Used for per-step and
// per-item streams in training.
Rng StreamRng(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

// Uniform double in [0, 1).
double UniformReal(Rng& rng);
// Uniform integer in [lo, hi], unbiased.
int64_t UniformInt(Rng& rng, int64_t lo, int64_t hi);
// Standard normal via Box-Muller.
double Normal(Rng& rng);

}  // namespace rxvc

#endif  // RXVC_RANDOM_H_
