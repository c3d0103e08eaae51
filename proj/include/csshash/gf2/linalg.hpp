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

#include <optional>
#include <vector>

#include "csshash/gf2/bit_matrix.hpp"

namespace csshash {

struct RowEchelon {
    BitMatrix reduced;                 ///< reduced row echelon form
    std::vector<std::size_t> pivots;   ///< pivot column of each nonzero row
};

/// Gauss-Jordan elimination to reduced row echelon form.
inline RowEchelon rref(BitMatrix m) {
    RowEchelon out;
    std::size_t pivot_row = 0;
    for (std::size_t c = 0; c < m.cols() && pivot_row < m.rows(); c++) {
        std::size_t r = pivot_row;
        while (r < m.rows() && !m.get(r, c)) {
            r++;
        }
        if (r == m.rows()) {
            continue;
        }
        m.swap_rows(r, pivot_row);
        for (std::size_t other = 0; other < m.rows(); other++) {
            if (other != pivot_row && m.get(other, c)) {
                m.add_row(pivot_row, other);
            }
        }
        out.pivots.push_back(c);
        pivot_row++;
    }
    out.reduced = std::move(m);
    return out;
}

inline std::size_t rank(const BitMatrix &m) {
    return rref(m).pivots.size();
}

/// Inverse of a square matrix. Throws SingularMatrix when rank < dimension.
inline BitMatrix invert(const BitMatrix &m) {
    if (!m.is_square()) {
        throw BadDimensions("invert requires a square matrix");
    }
    std::size_t n = m.rows();
    RowEchelon e = rref(hstack(m, BitMatrix::identity(n)));
    if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] >= n)) {
        throw SingularMatrix("matrix is singular over GF(2)");
    }
    return e.reduced.block(0, n, n, n);
}

inline bool is_invertible(const BitMatrix &m) {
    return m.is_square() && rank(m) == m.rows();
}

/// Canonical basis of the row space: the nonzero rows of the RREF.
inline BitMatrix row_space_basis(const BitMatrix &m) {
    RowEchelon e = rref(m);
    return e.reduced.block(0, 0, e.pivots.size(), m.cols());
}

/// Canonical basis of the column space, as columns in reduced column echelon form.
inline BitMatrix column_space_basis(const BitMatrix &m) {
    return row_space_basis(m.transpose()).transpose();
}

/// Basis of {v : m v = 0} as the columns of the result, in reduced column
/// echelon form. The column count equals cols(m) - rank(m).
inline BitMatrix kernel_basis(const BitMatrix &m) {
    RowEchelon e = rref(m);
    std::size_t n = m.cols();
    std::vector<bool> is_pivot(n, false);
    for (auto p : e.pivots) {
        is_pivot[p] = true;
    }
    std::vector<BitVector> vectors;
    for (std::size_t f = 0; f < n; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVector v(n);
        v.set(f, true);
        for (std::size_t i = 0; i < e.pivots.size(); i++) {
            if (e.reduced.get(i, f)) {
                v.set(e.pivots[i], true);
            }
        }
        vectors.push_back(std::move(v));
    }
    if (vectors.empty()) {
        return BitMatrix(n, 0);
    }
    return row_space_basis(BitMatrix::from_row_vectors(vectors, n)).transpose();
}

/// Some x with m x = y, with every free variable set to zero, or nullopt when
/// the system is inconsistent.
inline std::optional<BitVector> solve(const BitMatrix &m, const BitVector &y) {
    if (y.size() != m.rows()) {
        throw BadDimensions("solve: right-hand side length does not match row count");
    }
    BitMatrix aug(m.rows(), m.cols() + 1);
    aug.set_block(0, 0, m);
    for (std::size_t r = 0; r < m.rows(); r++) {
        aug.set(r, m.cols(), y[r]);
    }
    RowEchelon e = rref(aug);
    BitVector x(m.cols());
    for (std::size_t i = 0; i < e.pivots.size(); i++) {
        if (e.pivots[i] == m.cols()) {
            return std::nullopt;
        }
        x.set(e.pivots[i], e.reduced.get(i, m.cols()));
    }
    return x;
}

/// True iff the column spaces of a and b coincide.
inline bool same_column_space(const BitMatrix &a, const BitMatrix &b) {
    if (a.rows() != b.rows()) {
        return false;
    }
    return column_space_basis(a) == column_space_basis(b);
}

}  // namespace csshash
