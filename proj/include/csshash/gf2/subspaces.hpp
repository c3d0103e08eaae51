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

#include <cstdint>
#include <functional>
#include <vector>

#include "csshash/gf2/bit_matrix.hpp"

namespace csshash {

constexpr std::size_t kMaxSubspaceDimension = 14;

/// Number of d-dimensional subspaces of GF(2)^n.
inline uint64_t gaussian_binomial(std::size_t n, std::size_t d) {
    if (d > n) {
        return 0;
    }
    // [n, d] = prod_{i<d} (2^{n-i} - 1) / (2^{i+1} - 1); each partial product is integral.
    unsigned __int128 num = 1;
    unsigned __int128 den = 1;
    for (std::size_t i = 0; i < d; i++) {
        num *= (static_cast<unsigned __int128>(1) << (n - i)) - 1;
        den *= (static_cast<unsigned __int128>(1) << (i + 1)) - 1;
    }
    return static_cast<uint64_t>(num / den);
}

/// Calls `visit` once per d-dimensional subspace of GF(2)^n with an n x d basis
/// matrix in reduced column echelon form. Subspaces are visited in a fixed
/// order: pivot sets in lexicographic order, then free entries as a binary
/// counter. Throws TooLarge when n exceeds kMaxSubspaceDimension.
inline void for_each_subspace(std::size_t n, std::size_t d, const std::function<void(const BitMatrix &)> &visit) {
    if (n > kMaxSubspaceDimension) {
        throw TooLarge("subspace enumeration refused for n = " + std::to_string(n));
    }
    if (d > n) {
        throw BadDimensions("subspace dimension exceeds ambient dimension");
    }
    std::vector<std::size_t> pivots(d);
    for (std::size_t i = 0; i < d; i++) {
        pivots[i] = i;
    }
    while (true) {
        // Free positions: (basis vector i, coordinate c) with c > pivots[i] and c not a pivot.
        std::vector<bool> is_pivot(n, false);
        for (auto p : pivots) {
            is_pivot[p] = true;
        }
        std::vector<std::pair<std::size_t, std::size_t>> free;
        for (std::size_t i = 0; i < d; i++) {
            for (std::size_t c = pivots[i] + 1; c < n; c++) {
                if (!is_pivot[c]) {
                    free.emplace_back(c, i);
                }
            }
        }
        BitMatrix basis(n, d);
        for (std::size_t i = 0; i < d; i++) {
            basis.set(pivots[i], i, true);
        }
        uint64_t combos = uint64_t{1} << free.size();
        for (uint64_t mask = 0; mask < combos; mask++) {
            BitMatrix m = basis;
            for (std::size_t f = 0; f < free.size(); f++) {
                if ((mask >> f) & 1) {
                    m.set(free[f].first, free[f].second, true);
                }
            }
            visit(m);
        }

        // Next pivot combination in lexicographic order.
        std::size_t i = d;
        while (i > 0 && pivots[i - 1] == n - d + i - 1) {
            i--;
        }
        if (i == 0) {
            return;
        }
        pivots[i - 1]++;
        for (std::size_t j = i; j < d; j++) {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}

inline std::vector<BitMatrix> enumerate_subspaces(std::size_t n, std::size_t d) {
    std::vector<BitMatrix> out;
    for_each_subspace(n, d, [&](const BitMatrix &m) { out.push_back(m); });
    return out;
}

}  // namespace csshash
