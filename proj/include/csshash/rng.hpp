// Copyright 2026 The csshash Authors
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

#pragma once

#include <algorithm>
#include <cassert>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace csshash {

/// A uniform random bit generator producing full 64-bit words.
template <typename Rng>
concept Rng64 = std::uniform_random_bit_generator<Rng> && Rng::min() == 0 &&
                Rng::max() == std::numeric_limits<uint64_t>::max();

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent generator for sub-stream `stream` of a master seed. The same
/// (seed, stream) pair always yields the same sequence on every platform.
inline std::mt19937_64 make_stream(uint64_t seed, uint64_t stream) {
    uint64_t a = splitmix64(seed);
    uint64_t b = splitmix64(a ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
    std::seed_seq seq{
        static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32), static_cast<uint32_t>(b),
        static_cast<uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform integer in [0, n). Requires n >= 1.
template <Rng64 Rng>
uint64_t uniform_below(Rng &rng, uint64_t n) {
    assert(n >= 1);
    if ((n & (n - 1)) == 0) {
        return rng() & (n - 1);
    }
    uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % n;
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
template <Rng64 Rng>
double uniform_unit(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Cumulative table for drawing indices with given non-negative weights.
class DiscreteSampler {
   public:
    explicit DiscreteSampler(const std::vector<double> &weights) {
        cdf_.reserve(weights.size());
        double acc = 0;
        for (double w : weights) {
            acc += w;
            cdf_.push_back(acc);
        }
        total_ = acc;
    }

    template <Rng64 Rng>
    std::size_t operator()(Rng &rng) const {
        double u = uniform_unit(rng) * total_;
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        if (i >= cdf_.size()) {
            i = cdf_.size() - 1;
        }
        // Never return an index of zero weight, even at the floating-point edge.
        while (i > 0 && cdf_[i] == cdf_[i - 1]) {
            i--;
        }
        return i;
    }

   private:
    std::vector<double> cdf_;
    double total_ = 0;
};

}  // namespace csshash
