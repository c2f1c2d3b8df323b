// Copyright 2026 The dpdirichlet Authors
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

#ifndef DPDIR_RNG_HPP_
#define DPDIR_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace dpdir {

// SplitMix64 step; used only for seed expansion and stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random source. All distributions in this library transform
// raw engine output themselves (no std:: distribution objects), so results
// for a fixed seed are bit-identical across platforms and compilers.
//
// derive(k) produces an independent child stream as a pure function of
// (seed, k), regardless of how much of the parent stream has been consumed.
// Call sites that run concurrently (chains, bootstrap iterations, grid
// replicates) each get their own derived stream, which makes parallel and
// serial execution produce identical output.
//
// Ownership contract: a function taking Rng& owns that stream for the
// duration of the call; callers wanting several independent calls pass
// distinct derived children.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  Rng derive(std::uint64_t stream) const {
    // seed + C*(stream+1) is a bijection in stream for fixed seed (C odd),
    // and SplitMix64 scrambles it into an unrelated child seed.
    std::uint64_t s = seed_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
    std::uint64_t a = splitmix64_next(s);
    std::uint64_t b = splitmix64_next(s);
    return Rng(a ^ (b << 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in {0, ..., bound-1} by rejection (unbiased).
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Standard normal via Box-Muller (two uniforms per draw, no cached state).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dpdir

#endif  // DPDIR_RNG_HPP_
