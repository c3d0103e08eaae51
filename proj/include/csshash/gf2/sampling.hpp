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

#include <functional>
#include <vector>

#include "csshash/gf2/linalg.hpp"
#include "csshash/rng.hpp"

namespace csshash {

constexpr std::size_t kMaxSymplecticHalfDimension = 64;

template <Rng64 Rng>
BitVector random_vector(std::size_t len, Rng &rng) {
    BitVector v(len);
    auto w = v.mutable_words();
    for (std::size_t i = 0; i < w.size(); i++) {
        w[i] = rng();
    }
    if (!w.empty()) {
        w.back() &= detail::tail_mask(len);
    }
    return v;
}

template <Rng64 Rng>
BitMatrix random_matrix(std::size_t rows, std::size_t cols, Rng &rng) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; r++) {
        m.set_row(r, random_vector(cols, rng));
    }
    return m;
}

/// Uniform random element of the span of the columns of `basis`.
template <Rng64 Rng>
BitVector random_combination(const BitMatrix &basis, Rng &rng) {
    return basis * random_vector(basis.cols(), rng);
}

/// Uniform element of GL(n, 2) by rejection.
template <Rng64 Rng>
BitMatrix sample_invertible(std::size_t n, Rng &rng) {
    if (n == 0) {
        throw BadDimensions("sample_invertible requires n >= 1");
    }
    while (true) {
        BitMatrix m = random_matrix(n, n, rng);
        if (rank(m) == n) {
            return m;
        }
    }
}

/// The 2k x 2k form [[0, I], [I, 0]].
inline BitMatrix symplectic_form(std::size_t k) {
    BitMatrix p(2 * k, 2 * k);
    for (std::size_t i = 0; i < k; i++) {
        p.set(i, k + i, true);
        p.set(k + i, i, true);
    }
    return p;
}

/// u^T P v for vectors of length 2k.
inline bool symplectic_product(const BitVector &u, const BitVector &v) {
    std::size_t k = u.size() / 2;
    bool acc = false;
    for (std::size_t i = 0; i < k; i++) {
        acc ^= (u[i] && v[k + i]) ^ (u[k + i] && v[i]);
    }
    return acc;
}

inline bool is_symplectic(const BitMatrix &c) {
    if (!c.is_square() || c.rows() % 2 != 0) {
        return false;
    }
    BitMatrix p = symplectic_form(c.rows() / 2);
    return c.transpose() * p * c == p;
}

namespace detail {

/// Removes the hyperbolic pair (e, f) from the symplectic space spanned by the
/// columns of `w`, returning a basis of its symplectic complement in that span.
inline BitMatrix symplectic_complement(const BitMatrix &w, const BitVector &e, const BitVector &f) {
    std::vector<BitVector> projected;
    for (std::size_t c = 0; c < w.cols(); c++) {
        BitVector v = w.column(c);
        bool ve = symplectic_product(v, e);
        bool vf = symplectic_product(v, f);
        if (vf) {
            v += e;
        }
        if (ve) {
            v += f;
        }
        projected.push_back(std::move(v));
    }
    return row_space_basis(BitMatrix::from_row_vectors(projected, w.rows())).transpose();
}

inline void for_each_symplectic_rec(
    std::size_t k, std::size_t depth, const BitMatrix &w, BitMatrix &c,
    const std::function<void(const BitMatrix &)> &visit) {
    if (depth == k) {
        visit(c);
        return;
    }
    uint64_t count = uint64_t{1} << w.cols();
    for (uint64_t a = 1; a < count; a++) {
        BitVector e = w * BitVector::from_u64(a, w.cols());
        for (uint64_t b = 0; b < count; b++) {
            BitVector f = w * BitVector::from_u64(b, w.cols());
            if (!symplectic_product(e, f)) {
                continue;
            }
            c.set_column(depth, e);
            c.set_column(k + depth, f);
            for_each_symplectic_rec(k, depth + 1, symplectic_complement(w, e, f), c, visit);
        }
    }
}

}  // namespace detail

/// Uniform element of Sp(2k, 2), built column pair by column pair: e is a
/// uniform nonzero vector of the remaining symplectic subspace W and f a
/// uniform vector of W with <e, f> = 1.
template <Rng64 Rng>
BitMatrix sample_symplectic(std::size_t k, Rng &rng) {
    if (k == 0) {
        throw BadDimensions("sample_symplectic requires k >= 1");
    }
    if (k > kMaxSymplecticHalfDimension) {
        throw TooLarge("sample_symplectic refused for k = " + std::to_string(k));
    }
    BitMatrix w = BitMatrix::identity(2 * k);
    BitMatrix c(2 * k, 2 * k);
    for (std::size_t i = 0; i < k; i++) {
        BitVector e;
        do {
            e = random_combination(w, rng);
        } while (e.none());
        BitVector f;
        do {
            f = random_combination(w, rng);
        } while (!symplectic_product(e, f));
        c.set_column(i, e);
        c.set_column(k + i, f);
        if (i + 1 < k) {
            w = detail::symplectic_complement(w, e, f);
        }
    }
    return c;
}

/// Visits every element of Sp(2k, 2) exactly once. Refuses k > 3
/// (|Sp(8, 2)| is about 4.7e10).
inline void for_each_symplectic(std::size_t k, const std::function<void(const BitMatrix &)> &visit) {
    if (k == 0) {
        throw BadDimensions("for_each_symplectic requires k >= 1");
    }
    if (k > 3) {
        throw TooLarge("symplectic enumeration refused for k = " + std::to_string(k));
    }
    BitMatrix c(2 * k, 2 * k);
    detail::for_each_symplectic_rec(k, 0, BitMatrix::identity(2 * k), c, visit);
}

/// |Sp(2k, 2)| = 2^{k^2} prod_{i=1..k} (4^i - 1).
inline uint64_t symplectic_group_order(std::size_t k) {
    uint64_t order = uint64_t{1} << (k * k);
    for (std::size_t i = 1; i <= k; i++) {
        order *= (uint64_t{1} << (2 * i)) - 1;
    }
    return order;
}

}  // namespace csshash
