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

#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "csshash/gf2.hpp"

namespace csshash {

constexpr std::size_t kMaxSeparabilityQubits = 12;

/// Throws NotFullRank or NotCommuting unless S (2n x n) describes a valid
/// stabilizer: rank(S) = n and S^T P S = 0.
inline void validate_stabilizer(const BitMatrix &s) {
    if (s.rows() != 2 * s.cols()) {
        throw BadDimensions("stabilizer matrix must be 2n x n");
    }
    if (rank(s) != s.cols()) {
        throw NotFullRank("stabilizer matrix is not full rank: rank(S) < n");
    }
    if (!(s.transpose() * symplectic_form(s.cols()) * s).is_zero()) {
        throw NotCommuting("stabilizer generators do not commute: S^T P S != 0");
    }
}

struct StabilizerState {
    BitMatrix S;
    BitVector b;

    std::size_t n() const {
        return S.cols();
    }
};

inline StabilizerState make_stabilizer_state(BitMatrix s, std::optional<BitVector> b = std::nullopt) {
    validate_stabilizer(s);
    BitVector phases = b.value_or(BitVector(s.cols()));
    if (phases.size() != s.cols()) {
        throw BadDimensions("phase vector length must equal the qubit count");
    }
    return {std::move(s), std::move(phases)};
}

/// Stabilizer of |psi_1> (x) |psi_2>: z-rows of both states first, then x-rows.
inline StabilizerState tensor(const StabilizerState &s1, const StabilizerState &s2) {
    std::size_t n1 = s1.n(), n2 = s2.n();
    BitMatrix s(2 * (n1 + n2), n1 + n2);
    s.set_block(0, 0, s1.S.block(0, 0, n1, n1));
    s.set_block(n1, n1, s2.S.block(0, 0, n2, n2));
    s.set_block(n1 + n2, 0, s1.S.block(n1, 0, n1, n1));
    s.set_block(2 * n1 + n2, n1, s2.S.block(n2, 0, n2, n2));
    return {std::move(s), concat(s1.b, s2.b)};
}

/// Binary image of a Clifford operation; phase data is not tracked.
struct CliffordOp {
    BitMatrix C;

    explicit CliffordOp(BitMatrix c) : C(std::move(c)) {
        if (!is_symplectic(C)) {
            throw NotSymplectic("Clifford matrix is not symplectic: C^T P C != P");
        }
    }
    std::size_t n() const {
        return C.rows() / 2;
    }
};

/// S' = C S with unchanged phases.
inline StabilizerState apply_clifford(const CliffordOp &q, const StabilizerState &s) {
    if (q.n() != s.n()) {
        throw BadDimensions("Clifford and state act on different qubit counts");
    }
    return {q.C * s.S, s.b};
}

/// S' = S R, b' = R^T b.
inline StabilizerState change_generators(const StabilizerState &s, const BitMatrix &r) {
    if (r.rows() != s.n() || !r.is_square()) {
        throw BadDimensions("generator change must be n x n");
    }
    if (!is_invertible(r)) {
        throw SingularMatrix("generator change matrix is singular");
    }
    return {s.S * r, r.transpose() * s.b};
}

/// A CSS state. After css_canonicalize, S_z = [I; theta] and S_x = [theta^T; I]
/// literally, with qubits listed in the order `qubit_perm` (entry i is the
/// original index of canonical qubit i) and generators changed by R_z, R_x
/// (canonical S_z = T S_z R_z, canonical b_z = R_z^T b_z, same for x).
struct CssState {
    std::size_t n = 0;
    std::size_t n_z = 0;
    std::size_t n_x = 0;
    BitMatrix S_z;
    BitMatrix S_x;
    BitVector b;
    std::optional<BitMatrix> theta;
    std::vector<std::size_t> qubit_perm;
    BitMatrix R_z;
    BitMatrix R_x;
    bool orthogonal = false;

    bool canonical() const {
        return theta.has_value();
    }
    BitVector b_z() const {
        return b.slice(0, n_z);
    }
    BitVector b_x() const {
        return b.slice(n_z, n_x);
    }
    StabilizerState stabilizer() const {
        return {block_diagonal({S_z, S_x}), b};
    }
};

/// Validates and wraps a CSS description. Throws NotCss, NotFullRank or
/// BadDimensions.
inline CssState make_css_state(BitMatrix s_z, BitMatrix s_x, std::optional<BitVector> b = std::nullopt) {
    if (s_z.rows() != s_x.rows() || s_z.cols() + s_x.cols() != s_z.rows()) {
        throw BadDimensions("CSS blocks must be n x n_z and n x n_x with n_z + n_x = n");
    }
    CssState out;
    out.n = s_z.rows();
    out.n_z = s_z.cols();
    out.n_x = s_x.cols();
    if (!(s_z.transpose() * s_x).is_zero()) {
        throw NotCss("S_z^T S_x != 0");
    }
    if (rank(s_z) != out.n_z) {
        throw NotFullRank("S_z is not full column rank");
    }
    if (rank(s_x) != out.n_x) {
        throw NotFullRank("S_x is not full column rank");
    }
    out.b = b.value_or(BitVector(out.n));
    if (out.b.size() != out.n) {
        throw BadDimensions("phase vector length must equal n");
    }
    out.S_z = std::move(s_z);
    out.S_x = std::move(s_x);
    out.qubit_perm.resize(out.n);
    std::iota(out.qubit_perm.begin(), out.qubit_perm.end(), 0);
    out.R_z = BitMatrix::identity(out.n_z);
    out.R_x = BitMatrix::identity(out.n_x);
    return out;
}

inline bool theta_is_orthogonal(const BitMatrix &theta) {
    return theta.is_square() && (theta.transpose() * theta).is_identity() && (theta * theta.transpose()).is_identity();
}

/// Brings S_z to [I; theta] and S_x to [theta^T; I]. When the leading n_z rows
/// of S_z are dependent, qubits are reordered: the first n_z canonical qubits
/// are the lexicographically smallest independent set of S_z rows, the rest
/// follow in their original order.
inline CssState css_canonicalize(const CssState &s) {
    if (!(s.S_z.transpose() * s.S_x).is_zero()) {
        throw NotCss("S_z^T S_x != 0");
    }
    std::size_t n = s.n, n_z = s.n_z, n_x = s.n_x;

    std::vector<std::size_t> chosen, rest;
    BitMatrix acc(0, n_z);
    for (std::size_t q = 0; q < n; q++) {
        BitMatrix trial = vstack(acc, BitMatrix::from_row_vectors({s.S_z.row(q)}, n_z));
        if (chosen.size() < n_z && rank(trial) == chosen.size() + 1) {
            chosen.push_back(q);
            acc = std::move(trial);
        } else {
            rest.push_back(q);
        }
    }
    if (chosen.size() != n_z) {
        throw NotFullRank("S_z is not full column rank");
    }
    std::vector<std::size_t> order = chosen;
    order.insert(order.end(), rest.begin(), rest.end());

    BitMatrix tz = permute_rows(s.S_z, order);
    BitMatrix tx = permute_rows(s.S_x, order);
    BitMatrix r_z = invert(tz.block(0, 0, n_z, n_z));
    BitMatrix new_z = tz * r_z;
    BitMatrix r_x = invert(tx.block(n_z, 0, n_x, n_x));
    BitMatrix new_x = tx * r_x;

    CssState out = s;
    out.S_z = new_z;
    out.S_x = new_x;
    out.theta = new_z.block(n_z, 0, n_x, n_z);
    out.b = concat(r_z.transpose() * s.b_z(), r_x.transpose() * s.b_x());
    for (std::size_t i = 0; i < n; i++) {
        out.qubit_perm[i] = s.qubit_perm[order[i]];
    }
    out.R_z = s.R_z * r_z;
    out.R_x = s.R_x * r_x;
    out.orthogonal = theta_is_orthogonal(*out.theta);
    return out;
}

/// Canonical CSS state with the given theta (n_x x n_z) and zero phases.
inline CssState css_from_theta(const BitMatrix &theta) {
    std::size_t n_x = theta.rows(), n_z = theta.cols();
    CssState s = make_css_state(
        vstack(BitMatrix::identity(n_z), theta), vstack(theta.transpose(), BitMatrix::identity(n_x)));
    s.theta = theta;
    s.orthogonal = theta_is_orthogonal(theta);
    return s;
}

/// Qubit sets of a separating bipartition, in the caller's original qubit labels.
struct Bipartition {
    std::vector<std::size_t> first;
    std::vector<std::size_t> second;
};

/// Connected components of the bipartite graph of theta, with canonical
/// qubits 0..n_z-1 as z-nodes and n_z..n-1 as x-nodes.
inline std::vector<std::size_t> theta_components(const BitMatrix &theta) {
    std::size_t n_z = theta.cols(), n = theta.rows() + theta.cols();
    std::vector<std::size_t> label(n, n);
    std::size_t next = 0;
    for (std::size_t start = 0; start < n; start++) {
        if (label[start] != n) {
            continue;
        }
        std::vector<std::size_t> stack{start};
        label[start] = next;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t u = 0; u < n; u++) {
                bool edge = false;
                if (v < n_z && u >= n_z) {
                    edge = theta.get(u - n_z, v);
                } else if (v >= n_z && u < n_z) {
                    edge = theta.get(v - n_z, u);
                }
                if (edge && label[u] == n) {
                    label[u] = next;
                    stack.push_back(u);
                }
            }
        }
        next++;
    }
    return label;
}

/// Finds a qubit bipartition Q | Q^c with rank(S_z[Q]) + rank(S_z[Q^c]) = n_z,
/// i.e. one along which S_z block-diagonalizes. Candidates containing the first
/// qubit are tried by increasing size, then lexicographically; only unions of
/// connected components of the theta graph can succeed, so others are skipped.
/// Throws TooLarge for n > 12.
inline std::optional<Bipartition> separating_bipartition(const CssState &s) {
    if (s.n > kMaxSeparabilityQubits) {
        throw TooLarge("separability check refused for n = " + std::to_string(s.n));
    }
    if (s.n <= 1) {
        return std::nullopt;
    }
    CssState c = s.canonical() ? s : css_canonicalize(s);
    std::vector<std::size_t> comp = theta_components(*c.theta);
    std::size_t n = c.n;

    std::optional<std::vector<std::size_t>> best;
    for (uint64_t mask = 1; mask < (uint64_t{1} << n) - 1; mask++) {
        bool closed = true;
        for (std::size_t a = 0; a < n && closed; a++) {
            for (std::size_t b = a + 1; b < n && closed; b++) {
                if (comp[a] == comp[b] && (((mask >> a) ^ (mask >> b)) & 1)) {
                    closed = false;
                }
            }
        }
        if (!closed) {
            continue;
        }
        std::vector<std::size_t> in, out;
        for (std::size_t q = 0; q < n; q++) {
            ((mask >> q) & 1 ? in : out).push_back(q);
        }
        if (rank(permute_rows(c.S_z, in)) + rank(permute_rows(c.S_z, out)) != c.n_z) {
            continue;
        }
        // Compare in original labels so the answer does not depend on the canonical order.
        std::vector<std::size_t> orig;
        for (auto q : in) {
            orig.push_back(c.qubit_perm[q]);
        }
        std::sort(orig.begin(), orig.end());
        if (orig.front() != 0) {
            continue;
        }
        if (!best || orig.size() < best->size() || (orig.size() == best->size() && orig < *best)) {
            best = orig;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    Bipartition bp;
    bp.first = *best;
    for (std::size_t q = 0; q < n; q++) {
        if (!std::binary_search(best->begin(), best->end(), q)) {
            bp.second.push_back(q);
        }
    }
    return bp;
}

inline bool is_separable(const CssState &s) {
    return separating_bipartition(s).has_value();
}

/// Phase flips caused by the Pauli error sigma_e, e = (z-part; x-part) of
/// length 2n: Delta b = S^T P e = (S_z^T e_x; S_x^T e_z).
inline BitVector syndrome_flip(const CssState &s, const BitVector &e) {
    if (e.size() != 2 * s.n) {
        throw BadDimensions("error vector must have length 2n");
    }
    BitVector v = e.slice(0, s.n);
    BitVector w = e.slice(s.n, s.n);
    return concat(s.S_z.transpose() * w, s.S_x.transpose() * v);
}

/// Basis (as rows, in reduced row echelon form) of the functionals r whose
/// values r^T b are revealed by measuring sigma_z on M_z and sigma_x on M_x.
inline BitMatrix measure_reveal(
    const CssState &s, const std::vector<std::size_t> &m_z, const std::vector<std::size_t> &m_x) {
    std::vector<int> seen(s.n, 0);
    for (auto q : m_z) {
        if (q >= s.n || seen[q]++) {
            throw BadPartition("measurement sets overlap or name a missing qubit");
        }
    }
    for (auto q : m_x) {
        if (q >= s.n || seen[q]++) {
            throw BadPartition("measurement sets overlap or name a missing qubit");
        }
    }
    for (auto c : seen) {
        if (c != 1) {
            throw BadPartition("measurement sets must cover every qubit");
        }
    }
    BitMatrix full = block_diagonal({s.S_z, s.S_x});
    std::vector<std::size_t> constraint_rows;
    for (auto q : m_x) {
        constraint_rows.push_back(q);
    }
    for (auto q : m_z) {
        constraint_rows.push_back(s.n + q);
    }
    BitMatrix k = kernel_basis(permute_rows(full, constraint_rows));
    return k.transpose();
}

}  // namespace csshash
