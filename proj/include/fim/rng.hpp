// SPDX-License-Identifier: Apache-2.0
//
// fim-mimo: capacity optimization for MIMO links between flexible
// intelligent metasurfaces
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fim {

/// SplitMix64 finalizer. Used to derive independent per-realization seeds
/// from a base seed: realization r uses the (r+1)-th output of a SplitMix64
/// sequence started at `base`, i.e. mix(base + (r+1) * GAMMA).
std::uint64_t split_seed(std::uint64_t base, std::uint64_t index);

/// Deterministic random source. Draw order and bit derivation are fixed by
/// this implementation (mt19937_64 words, explicit [0,1) mapping, Box-Muller
/// Gaussians), so a seed fully determines the stream independent of the
/// standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Uniform double in [low, high). Returns low when the interval is empty.
  double uniform(double low, double high);

  /// Standard Gaussian N(0, 1).
  double gaussian();

  /// Circularly symmetric complex Gaussian CN(0, variance).
  std::complex<double> complex_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fim
