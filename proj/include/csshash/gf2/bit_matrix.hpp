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
#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csshash/errors.hpp"

namespace csshash {

namespace detail {

constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t bits) {
    return (bits + kWordBits - 1) / kWordBits;
}

/// Mask of the valid bits in the last word of a `bits`-long row.
constexpr uint64_t tail_mask(std::size_t bits) {
    std::size_t r = bits % kWordBits;
    return r == 0 ? ~uint64_t{0} : (uint64_t{1} << r) - 1;
}

}  // namespace detail

/// Fixed-length vector over GF(2), bit-packed little-endian into 64-bit words.
/// Bits past `size()` in the last word are always zero.
class BitVector {
   public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(detail::words_for(len), 0) {
    }

    /// Parses a string of '0'/'1' characters; character i becomes bit i.
    static BitVector from_string(std::string_view bits) {
        BitVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); i++) {
            if (bits[i] == '1') {
                v.set(i, true);
            } else if (bits[i] != '0') {
                throw BadDimensions("bit string contains a character other than 0/1");
            }
        }
        return v;
    }

    /// Bit i of `value` becomes entry i. Requires len <= 64.
    static BitVector from_u64(uint64_t value, std::size_t len) {
        assert(len <= 64);
        BitVector v(len);
        if (len > 0) {
            v.words_[0] = value & detail::tail_mask(len);
        }
        return v;
    }

    std::size_t size() const {
        return len_;
    }

    bool get(std::size_t i) const {
        assert(i < len_);
        return (words_[i / detail::kWordBits] >> (i % detail::kWordBits)) & 1;
    }
    bool operator[](std::size_t i) const {
        return get(i);
    }
    void set(std::size_t i, bool value) {
        assert(i < len_);
        uint64_t bit = uint64_t{1} << (i % detail::kWordBits);
        if (value) {
            words_[i / detail::kWordBits] |= bit;
        } else {
            words_[i / detail::kWordBits] &= ~bit;
        }
    }
    void flip(std::size_t i) {
        assert(i < len_);
        words_[i / detail::kWordBits] ^= uint64_t{1} << (i % detail::kWordBits);
    }

    BitVector &operator+=(const BitVector &other) {
        if (other.len_ != len_) {
            throw BadDimensions("BitVector length mismatch in addition");
        }
        for (std::size_t w = 0; w < words_.size(); w++) {
            words_[w] ^= other.words_[w];
        }
        return *this;
    }
    friend BitVector operator+(BitVector a, const BitVector &b) {
        a += b;
        return a;
    }

    /// Standard (non-symplectic) inner product mod 2.
    bool dot(const BitVector &other) const {
        if (other.len_ != len_) {
            throw BadDimensions("BitVector length mismatch in dot product");
        }
        uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); w++) {
            acc ^= words_[w] & other.words_[w];
        }
        return std::popcount(acc) & 1;
    }

    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](uint64_t w) { return w != 0; });
    }
    bool none() const {
        return !any();
    }
    std::size_t popcount() const {
        std::size_t c = 0;
        for (uint64_t w : words_) {
            c += std::popcount(w);
        }
        return c;
    }

    /// Requires size() <= 64.
    uint64_t to_u64() const {
        assert(len_ <= 64);
        return words_.empty() ? 0 : words_[0];
    }

    /// Sub-vector [start, start + len).
    BitVector slice(std::size_t start, std::size_t len) const {
        assert(start + len <= len_);
        BitVector out(len);
        for (std::size_t i = 0; i < len; i++) {
            if (get(start + i)) {
                out.set(i, true);
            }
        }
        return out;
    }

    std::span<const uint64_t> words() const {
        return words_;
    }
    std::span<uint64_t> mutable_words() {
        return words_;
    }

    std::string to_string() const {
        std::string s(len_, '0');
        for (std::size_t i = 0; i < len_; i++) {
            if (get(i)) {
                s[i] = '1';
            }
        }
        return s;
    }

    friend bool operator==(const BitVector &, const BitVector &) = default;
    friend auto operator<=>(const BitVector &a, const BitVector &b) {
        if (auto c = a.len_ <=> b.len_; c != 0) {
            return c;
        }
        return a.words_ <=> b.words_;
    }

   private:
    std::size_t len_ = 0;
    std::vector<uint64_t> words_;
};

inline BitVector concat(const BitVector &a, const BitVector &b) {
    BitVector out(a.size() + b.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        out.set(i, a[i]);
    }
    for (std::size_t i = 0; i < b.size(); i++) {
        out.set(a.size() + i, b[i]);
    }
    return out;
}

/// Entry-wise product of two equal-length vectors (the "⊙" of two columns).
inline BitVector elementwise_product(const BitVector &a, const BitVector &b) {
    if (a.size() != b.size()) {
        throw BadDimensions("elementwise product of vectors of different length");
    }
    BitVector out = a;
    auto ow = out.mutable_words();
    auto bw = b.words();
    for (std::size_t w = 0; w < ow.size(); w++) {
        ow[w] &= bw[w];
    }
    return out;
}

inline std::ostream &operator<<(std::ostream &out, const BitVector &v) {
    return out << v.to_string();
}

/// Dense matrix over GF(2) with bit-packed rows. Dimensions are fixed at
/// construction; all arithmetic is mod 2.
class BitMatrix {
   public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_(detail::words_for(cols)), data_(rows * stride_, 0) {
    }

    static BitMatrix zero(std::size_t rows, std::size_t cols) {
        return BitMatrix(rows, cols);
    }
    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            m.set(i, i, true);
        }
        return m;
    }
    static BitMatrix ones(std::size_t rows, std::size_t cols) {
        BitMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; r++) {
            for (std::size_t c = 0; c < cols; c++) {
                m.set(r, c, true);
            }
        }
        return m;
    }

    /// Builds a matrix from '0'/'1' row strings, e.g. {"110", "011"}.
    static BitMatrix from_rows(std::initializer_list<std::string_view> rows) {
        return from_rows(std::vector<std::string_view>(rows));
    }
    static BitMatrix from_rows(const std::vector<std::string_view> &rows) {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        BitMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); r++) {
            if (rows[r].size() != cols) {
                throw BadDimensions("ragged rows in BitMatrix::from_rows");
            }
            m.set_row(r, BitVector::from_string(rows[r]));
        }
        return m;
    }
    static BitMatrix from_row_vectors(const std::vector<BitVector> &rows, std::size_t cols) {
        BitMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); r++) {
            m.set_row(r, rows[r]);
        }
        return m;
    }
    static BitMatrix from_column_vectors(const std::vector<BitVector> &columns, std::size_t rows) {
        BitMatrix m(rows, columns.size());
        for (std::size_t c = 0; c < columns.size(); c++) {
            m.set_column(c, columns[c]);
        }
        return m;
    }

    std::size_t rows() const {
        return rows_;
    }
    std::size_t cols() const {
        return cols_;
    }

    bool get(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return (data_[r * stride_ + c / detail::kWordBits] >> (c % detail::kWordBits)) & 1;
    }
    bool operator()(std::size_t r, std::size_t c) const {
        return get(r, c);
    }
    void set(std::size_t r, std::size_t c, bool value) {
        assert(r < rows_ && c < cols_);
        uint64_t bit = uint64_t{1} << (c % detail::kWordBits);
        uint64_t &w = data_[r * stride_ + c / detail::kWordBits];
        w = value ? (w | bit) : (w & ~bit);
    }
    void flip(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        data_[r * stride_ + c / detail::kWordBits] ^= uint64_t{1} << (c % detail::kWordBits);
    }

    std::span<const uint64_t> row_words(std::size_t r) const {
        return {data_.data() + r * stride_, stride_};
    }
    std::span<uint64_t> row_words(std::size_t r) {
        return {data_.data() + r * stride_, stride_};
    }

    /// row[dst] += row[src]
    void add_row(std::size_t src, std::size_t dst) {
        uint64_t *d = data_.data() + dst * stride_;
        const uint64_t *s = data_.data() + src * stride_;
        for (std::size_t w = 0; w < stride_; w++) {
            d[w] ^= s[w];
        }
    }
    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) {
            return;
        }
        std::swap_ranges(
            data_.begin() + a * stride_, data_.begin() + (a + 1) * stride_, data_.begin() + b * stride_);
    }
    bool row_is_zero(std::size_t r) const {
        auto w = row_words(r);
        return std::all_of(w.begin(), w.end(), [](uint64_t x) { return x == 0; });
    }

    BitVector row(std::size_t r) const {
        BitVector v(cols_);
        auto dst = v.mutable_words();
        auto src = row_words(r);
        std::copy(src.begin(), src.end(), dst.begin());
        return v;
    }
    void set_row(std::size_t r, const BitVector &v) {
        if (v.size() != cols_) {
            throw BadDimensions("set_row: vector length does not match column count");
        }
        auto src = v.words();
        std::copy(src.begin(), src.end(), row_words(r).begin());
    }
    BitVector column(std::size_t c) const {
        BitVector v(rows_);
        for (std::size_t r = 0; r < rows_; r++) {
            if (get(r, c)) {
                v.set(r, true);
            }
        }
        return v;
    }
    void set_column(std::size_t c, const BitVector &v) {
        if (v.size() != rows_) {
            throw BadDimensions("set_column: vector length does not match row count");
        }
        for (std::size_t r = 0; r < rows_; r++) {
            set(r, c, v[r]);
        }
    }

    BitMatrix transpose() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; r++) {
            auto w = row_words(r);
            for (std::size_t k = 0; k < stride_; k++) {
                uint64_t bits = w[k];
                while (bits) {
                    std::size_t c = k * detail::kWordBits + std::countr_zero(bits);
                    t.set(c, r, true);
                    bits &= bits - 1;
                }
            }
        }
        return t;
    }

    /// Copy of the nr x nc block whose top-left corner is (r0, c0).
    BitMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) {
            throw BadDimensions("block extends past matrix bounds");
        }
        BitMatrix out(nr, nc);
        for (std::size_t r = 0; r < nr; r++) {
            for (std::size_t c = 0; c < nc; c++) {
                if (get(r0 + r, c0 + c)) {
                    out.set(r, c, true);
                }
            }
        }
        return out;
    }
    void set_block(std::size_t r0, std::size_t c0, const BitMatrix &m) {
        if (r0 + m.rows() > rows_ || c0 + m.cols() > cols_) {
            throw BadDimensions("set_block extends past matrix bounds");
        }
        for (std::size_t r = 0; r < m.rows(); r++) {
            for (std::size_t c = 0; c < m.cols(); c++) {
                set(r0 + r, c0 + c, m.get(r, c));
            }
        }
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](uint64_t w) { return w == 0; });
    }
    bool is_square() const {
        return rows_ == cols_;
    }
    bool is_identity() const {
        return is_square() && *this == identity(rows_);
    }
    bool is_symmetric() const {
        return is_square() && *this == transpose();
    }

    BitMatrix &operator+=(const BitMatrix &other) {
        if (other.rows_ != rows_ || other.cols_ != cols_) {
            throw BadDimensions("BitMatrix shape mismatch in addition");
        }
        for (std::size_t i = 0; i < data_.size(); i++) {
            data_[i] ^= other.data_[i];
        }
        return *this;
    }
    friend BitMatrix operator+(BitMatrix a, const BitMatrix &b) {
        a += b;
        return a;
    }

    friend BitMatrix operator*(const BitMatrix &a, const BitMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw BadDimensions(
                "cannot multiply " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) + " by " +
                std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
        }
        BitMatrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; r++) {
            uint64_t *dst = out.data_.data() + r * out.stride_;
            auto w = a.row_words(r);
            for (std::size_t k = 0; k < a.stride_; k++) {
                uint64_t bits = w[k];
                while (bits) {
                    std::size_t j = k * detail::kWordBits + std::countr_zero(bits);
                    const uint64_t *src = b.data_.data() + j * b.stride_;
                    for (std::size_t x = 0; x < out.stride_; x++) {
                        dst[x] ^= src[x];
                    }
                    bits &= bits - 1;
                }
            }
        }
        return out;
    }

    friend BitVector operator*(const BitMatrix &m, const BitVector &v) {
        if (m.cols_ != v.size()) {
            throw BadDimensions("matrix-vector shape mismatch");
        }
        BitVector out(m.rows_);
        auto vw = v.words();
        for (std::size_t r = 0; r < m.rows_; r++) {
            auto w = m.row_words(r);
            uint64_t acc = 0;
            for (std::size_t k = 0; k < m.stride_; k++) {
                acc ^= w[k] & vw[k];
            }
            if (std::popcount(acc) & 1) {
                out.set(r, true);
            }
        }
        return out;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t r = 0; r < rows_; r++) {
            s += row(r).to_string();
            s += '\n';
        }
        return s;
    }

    friend bool operator==(const BitMatrix &, const BitMatrix &) = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<uint64_t> data_;
};

inline std::ostream &operator<<(std::ostream &out, const BitMatrix &m) {
    return out << m.rows() << "x" << m.cols() << "\n" << m.to_string();
}

inline BitMatrix hstack(const BitMatrix &a, const BitMatrix &b) {
    if (a.rows() != b.rows()) {
        throw BadDimensions("hstack of matrices with different row counts");
    }
    BitMatrix out(a.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(0, a.cols(), b);
    return out;
}

inline BitMatrix vstack(const BitMatrix &a, const BitMatrix &b) {
    if (a.cols() != b.cols()) {
        throw BadDimensions("vstack of matrices with different column counts");
    }
    BitMatrix out(a.rows() + b.rows(), a.cols());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), 0, b);
    return out;
}

/// Assembles a matrix from a grid of blocks. Every block in a grid row must
/// share a row count, every block in a grid column a column count.
inline BitMatrix block_matrix(const std::vector<std::vector<BitMatrix>> &grid) {
    if (grid.empty()) {
        return {};
    }
    std::vector<std::size_t> heights, widths;
    for (const auto &g : grid) {
        if (g.size() != grid.front().size()) {
            throw BadDimensions("block_matrix: ragged block grid");
        }
        heights.push_back(g.front().rows());
    }
    for (const auto &b : grid.front()) {
        widths.push_back(b.cols());
    }
    std::size_t total_rows = 0, total_cols = 0;
    for (auto h : heights) total_rows += h;
    for (auto w : widths) total_cols += w;
    BitMatrix out(total_rows, total_cols);
    std::size_t r0 = 0;
    for (std::size_t i = 0; i < grid.size(); i++) {
        std::size_t c0 = 0;
        for (std::size_t j = 0; j < grid[i].size(); j++) {
            const BitMatrix &b = grid[i][j];
            if (b.rows() != heights[i] || b.cols() != widths[j]) {
                throw BadDimensions("block_matrix: inconsistent block shapes");
            }
            out.set_block(r0, c0, b);
            c0 += widths[j];
        }
        r0 += heights[i];
    }
    return out;
}

/// Block-diagonal matrix diag(blocks[0], blocks[1], ...).
inline BitMatrix block_diagonal(const std::vector<BitMatrix> &blocks) {
    std::size_t rows = 0, cols = 0;
    for (const auto &b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    BitMatrix out(rows, cols);
    std::size_t r0 = 0, c0 = 0;
    for (const auto &b : blocks) {
        out.set_block(r0, c0, b);
        r0 += b.rows();
        c0 += b.cols();
    }
    return out;
}

/// Kronecker product a ⊗ b.
inline BitMatrix kron(const BitMatrix &a, const BitMatrix &b) {
    BitMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t j = 0; j < a.cols(); j++) {
            if (a.get(i, j)) {
                out.set_block(i * b.rows(), j * b.cols(), b);
            }
        }
    }
    return out;
}

inline BitVector kron(const BitVector &a, const BitVector &b) {
    BitVector out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        if (!a[i]) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); j++) {
            if (b[j]) {
                out.set(i * b.size() + j, true);
            }
        }
    }
    return out;
}

/// Entry-wise product of column `ca` of `a` with column `cb` of `b`.
inline BitVector column_elementwise_product(const BitMatrix &a, std::size_t ca, const BitMatrix &b, std::size_t cb) {
    return elementwise_product(a.column(ca), b.column(cb));
}

/// Rows of `m` selected (and reordered) by `order`.
inline BitMatrix permute_rows(const BitMatrix &m, std::span<const std::size_t> order) {
    BitMatrix out(order.size(), m.cols());
    for (std::size_t i = 0; i < order.size(); i++) {
        out.set_row(i, m.row(order[i]));
    }
    return out;
}

}  // namespace csshash
