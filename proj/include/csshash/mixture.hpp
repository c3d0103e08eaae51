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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "csshash/errors.hpp"
#include "csshash/gf2.hpp"

namespace csshash {

inline constexpr std::size_t kMaxMixtureBits = 24;

/// A distribution over phase vectors b in Z_2^n, stored densely. Entry u holds
/// p(b) for the b whose bit i is bit i of u; bits are ordered z-phases first,
/// then x-phases.
struct DiagonalMixture {
    std::size_t n = 0;
    std::vector<double> p;

    std::size_t size() const {
        return p.size();
    }
    double operator()(const BitVector &b) const {
        return p[b.to_u64()];
    }
};

inline constexpr double kMixtureSumTolerance = 1e-12;

/// Checks n, table size, non-negativity and normalization.
inline void validate_mixture(const DiagonalMixture &mix, double tolerance = kMixtureSumTolerance) {
    if (mix.n > kMaxMixtureBits) {
        throw TooLarge("mixture over " + std::to_string(mix.n) + " bits refused");
    }
    if (mix.p.size() != (std::size_t{1} << mix.n)) {
        throw BadDimensions("mixture table must have 2^n entries");
    }
    double sum = 0;
    for (double x : mix.p) {
        if (!(x >= 0) || !std::isfinite(x)) {
            throw BadDimensions("mixture probabilities must be finite and non-negative");
        }
        sum += x;
    }
    if (std::abs(sum - 1) > tolerance) {
        throw BadDimensions("mixture probabilities sum to " + std::to_string(sum));
    }
}

inline DiagonalMixture make_mixture(std::size_t n, std::vector<double> p) {
    DiagonalMixture mix{n, std::move(p)};
    validate_mixture(mix);
    return mix;
}

inline DiagonalMixture point_mass(std::size_t n, uint64_t at = 0) {
    DiagonalMixture mix{n, std::vector<double>(std::size_t{1} << n, 0.0)};
    mix.p[at] = 1;
    return mix;
}

inline DiagonalMixture uniform_mixture(std::size_t n) {
    std::size_t size = std::size_t{1} << n;
    return {n, std::vector<double>(size, 1.0 / static_cast<double>(size))};
}

namespace detail {

inline double entropy_of(const std::vector<double> &weights) {
    double h = 0;
    for (double x : weights) {
        if (x > 0) {
            h -= x * std::log2(x);
        }
    }
    return h;
}

inline uint64_t index_mask(const std::vector<std::size_t> &bits, std::size_t n) {
    uint64_t mask = 0;
    for (auto b : bits) {
        if (b >= n) {
            throw BadDimensions("bit index " + std::to_string(b) + " out of range");
        }
        mask |= uint64_t{1} << b;
    }
    return mask;
}

}  // namespace detail

inline double entropy(const DiagonalMixture &mix) {
    return detail::entropy_of(mix.p);
}

/// Entropy of the joint marginal of the listed bits (0-based).
inline double marginal_entropy(const DiagonalMixture &mix, const std::vector<std::size_t> &bits) {
    uint64_t mask = detail::index_mask(bits, mix.n);
    std::vector<double> marginal(mix.p.size(), 0.0);
    for (uint64_t u = 0; u < mix.p.size(); u++) {
        marginal[u & mask] += mix.p[u];
    }
    return detail::entropy_of(marginal);
}

/// H(target | given) = H(target, given) - H(given).
inline double conditional_entropy(
    const DiagonalMixture &mix, const std::vector<std::size_t> &target, const std::vector<std::size_t> &given) {
    std::vector<std::size_t> joint = target;
    joint.insert(joint.end(), given.begin(), given.end());
    return marginal_entropy(mix, joint) - marginal_entropy(mix, given);
}

/// Distribution of L b for invertible L: p'(L b) = p(b).
inline DiagonalMixture transform_mixture(const DiagonalMixture &mix, const BitMatrix &l) {
    if (l.rows() != mix.n || l.cols() != mix.n) {
        throw BadDimensions("transform must be n x n");
    }
    if (!is_invertible(l)) {
        throw SingularMatrix("mixture transform must be invertible");
    }
    DiagonalMixture out{mix.n, std::vector<double>(mix.p.size(), 0.0)};
    for (uint64_t u = 0; u < mix.p.size(); u++) {
        if (mix.p[u] != 0) {
            out.p[(l * BitVector::from_u64(u, mix.n)).to_u64()] += mix.p[u];
        }
    }
    return out;
}

}  // namespace csshash
