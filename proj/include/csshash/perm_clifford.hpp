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

#include <utility>
#include <vector>

#include "csshash/stabilizer.hpp"

namespace csshash {

/// Elementwise products of all column pairs j < l of m, reduced to a column
/// basis. Zero columns when no pair exists or every product vanishes.
inline BitMatrix pairwise_column_products(const BitMatrix &m) {
    std::vector<BitVector> cols;
    for (std::size_t j = 0; j < m.cols(); j++) {
        for (std::size_t l = j + 1; l < m.cols(); l++) {
            cols.push_back(column_elementwise_product(m, j, m, l));
        }
    }
    if (cols.empty()) {
        return BitMatrix(m.rows(), 0);
    }
    return column_space_basis(BitMatrix::from_column_vectors(cols, m.rows()));
}

/// Derived matrices of theta that drive the permutation constraints and the
/// J matrix.
struct ThetaStructure {
    BitMatrix theta;
    BitMatrix L_theta;
    BitMatrix L_thetaT;
    BitMatrix M_theta;
    BitMatrix M_thetaT;
    BitMatrix constraint_B;
    BitMatrix constraint_C;
    BitMatrix kernel_B;  ///< columns: basis of {v : constraint_B v = 0}
    BitMatrix kernel_C;
    bool orthogonal = false;

    std::size_t n_z() const {
        return theta.cols();
    }
    std::size_t n_x() const {
        return theta.rows();
    }
    std::size_t n() const {
        return theta.rows() + theta.cols();
    }
};

inline ThetaStructure build_theta_structure(const BitMatrix &theta) {
    ThetaStructure ts;
    std::size_t n_x = theta.rows(), n_z = theta.cols();
    ts.theta = theta;
    ts.L_theta = pairwise_column_products(theta);
    ts.L_thetaT = pairwise_column_products(theta.transpose());
    ts.M_theta = kernel_basis(ts.L_theta.transpose());
    ts.M_thetaT = kernel_basis(ts.L_thetaT.transpose());
    ts.constraint_B = block_matrix({
        {theta, BitMatrix::identity(n_x)},
        {ts.L_thetaT.transpose(), BitMatrix::zero(ts.L_thetaT.cols(), n_x)},
    });
    ts.constraint_C = block_matrix({
        {BitMatrix::identity(n_z), theta.transpose()},
        {BitMatrix::zero(ts.L_theta.cols(), n_z), ts.L_theta.transpose()},
    });
    ts.kernel_B = kernel_basis(ts.constraint_B);
    ts.kernel_C = kernel_basis(ts.constraint_C);
    ts.orthogonal = theta_is_orthogonal(theta);
    return ts;
}

/// A local Clifford operation that permutes the k-fold tensor products of a
/// CSS state. Party i applies [[A_i, B_i], [C_i, D_i]] to its k qubits.
/// Phase vectors are indexed party-major: entry j*k + i is generator j of copy i.
/// In the orthogonal case the state is represented with S_x = S_z.
struct PermClifford {
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t n_z = 0;
    bool orthogonal = false;
    std::vector<BitMatrix> A_blocks;
    std::vector<BitMatrix> B_blocks;
    std::vector<BitMatrix> C_blocks;
    std::vector<BitMatrix> D_blocks;
    BitMatrix R;

    const BitMatrix &A() const {
        return A_blocks.front();
    }
    const BitMatrix &D() const {
        return D_blocks.front();
    }
    BitMatrix party_block(std::size_t i) const {
        return block_matrix({{A_blocks[i], B_blocks[i]}, {C_blocks[i], D_blocks[i]}});
    }

    /// The 2nk x 2nk matrix of the overall operation, rows and columns ordered
    /// (z-part party-major, then x-part party-major).
    BitMatrix full_clifford() const {
        std::size_t nk = n * k;
        BitMatrix c(2 * nk, 2 * nk);
        for (std::size_t i = 0; i < n; i++) {
            c.set_block(i * k, i * k, A_blocks[i]);
            c.set_block(i * k, nk + i * k, B_blocks[i]);
            c.set_block(nk + i * k, i * k, C_blocks[i]);
            c.set_block(nk + i * k, nk + i * k, D_blocks[i]);
        }
        return c;
    }
};

/// S (x) I_k for the representation the permutation acts on.
inline BitMatrix copies_stabilizer(const CssState &canon, bool orthogonal, std::size_t k) {
    const BitMatrix &s_x = orthogonal ? canon.S_z : canon.S_x;
    return kron(block_diagonal({canon.S_z, s_x}), BitMatrix::identity(k));
}

namespace detail {

inline void require_fully_entangled(const ThetaStructure &ts) {
    auto comp = theta_components(ts.theta);
    for (auto c : comp) {
        if (c != 0) {
            throw NotFullyEntangled("theta describes a separable state");
        }
    }
}

inline PermClifford orthogonal_from_symplectic(const ThetaStructure &ts, const BitMatrix &c, std::size_t k) {
    PermClifford pc;
    pc.k = k;
    pc.n = ts.n();
    pc.n_z = ts.n_z();
    pc.orthogonal = true;
    BitMatrix a = c.block(0, 0, k, k), b = c.block(0, k, k, k);
    BitMatrix cc = c.block(k, 0, k, k), d = c.block(k, k, k, k);
    pc.A_blocks.assign(pc.n, a);
    pc.B_blocks.assign(pc.n, b);
    pc.C_blocks.assign(pc.n, cc);
    pc.D_blocks.assign(pc.n, d);
    BitMatrix id = BitMatrix::identity(pc.n_z);
    pc.R = block_matrix({
        {kron(id, d.transpose()), kron(id, b.transpose())},
        {kron(id, cc.transpose()), kron(id, a.transpose())},
    });
    return pc;
}

}  // namespace detail

/// Assembles R for the non-orthogonal case from A and the per-party B_i, C_i:
/// R = [[I (x) A^{-1}, B~_z^T (theta^T (x) I)], [C~_x^T (theta (x) I), I (x) A^T]].
inline BitMatrix assemble_r_non_orthogonal(
    const BitMatrix &theta, const BitMatrix &a, const std::vector<BitMatrix> &b_blocks,
    const std::vector<BitMatrix> &c_blocks) {
    std::size_t n_x = theta.rows(), n_z = theta.cols(), k = a.rows();
    std::size_t n = n_x + n_z;
    BitMatrix a_inv = invert(a);
    BitMatrix r(n * k, n * k);
    for (std::size_t j = 0; j < n_z; j++) {
        r.set_block(j * k, j * k, a_inv);
    }
    for (std::size_t l = 0; l < n_x; l++) {
        r.set_block((n_z + l) * k, (n_z + l) * k, a.transpose());
    }
    for (std::size_t j = 0; j < n_z; j++) {
        for (std::size_t l = 0; l < n_x; l++) {
            if (theta.get(l, j)) {
                r.set_block(j * k, (n_z + l) * k, b_blocks[j].transpose());
                r.set_block((n_z + l) * k, j * k, c_blocks[n_z + l].transpose());
            }
        }
    }
    return r;
}

/// Uniform sample from the permuting local Cliffords of k copies.
template <Rng64 Rng>
PermClifford sample_perm_clifford(const ThetaStructure &ts, bool orthogonal, std::size_t k, Rng &rng) {
    if (k == 0) {
        throw BadDimensions("copy count must be at least 1");
    }
    detail::require_fully_entangled(ts);
    if (orthogonal) {
        if (!ts.orthogonal) {
            throw BadDimensions("orthogonal sampling requested for a non-orthogonal theta");
        }
        return detail::orthogonal_from_symplectic(ts, sample_symplectic(k, rng), k);
    }

    std::size_t n = ts.n();
    for (std::size_t i = 0; i < n; i++) {
        if (!ts.kernel_B.row_is_zero(i) && !ts.kernel_C.row_is_zero(i)) {
            throw NotPermutation(
                "party " + std::to_string(i + 1) + " admits both B_i != 0 and C_i != 0; theta must be orthogonal");
        }
    }

    PermClifford pc;
    pc.k = k;
    pc.n = n;
    pc.n_z = ts.n_z();
    pc.orthogonal = false;
    BitMatrix a = sample_invertible(k, rng);
    BitMatrix a_inv_t = invert(a).transpose();

    std::vector<BitMatrix> x(n, BitMatrix(k, k)), y(n, BitMatrix(k, k));
    for (std::size_t s = 0; s < k; s++) {
        for (std::size_t t = s; t < k; t++) {
            BitVector xv = random_combination(ts.kernel_B, rng);
            BitVector yv = random_combination(ts.kernel_C, rng);
            for (std::size_t i = 0; i < n; i++) {
                x[i].set(s, t, xv[i]);
                x[i].set(t, s, xv[i]);
                y[i].set(s, t, yv[i]);
                y[i].set(t, s, yv[i]);
            }
        }
    }
    pc.A_blocks.assign(n, a);
    pc.D_blocks.assign(n, a_inv_t);
    for (std::size_t i = 0; i < n; i++) {
        pc.B_blocks.push_back(a * x[i]);
        pc.C_blocks.push_back(a_inv_t * y[i]);
    }
    pc.R = assemble_r_non_orthogonal(ts.theta, a, pc.B_blocks, pc.C_blocks);
    return pc;
}

/// Convenience overload using the orthogonality of theta to pick the case.
template <Rng64 Rng>
PermClifford sample_perm_clifford(const ThetaStructure &ts, std::size_t k, Rng &rng) {
    return sample_perm_clifford(ts, ts.orthogonal, k, rng);
}

inline PermClifford identity_perm_clifford(std::size_t n, std::size_t n_z, std::size_t k, bool orthogonal = false) {
    PermClifford pc;
    pc.k = k;
    pc.n = n;
    pc.n_z = n_z;
    pc.orthogonal = orthogonal;
    pc.A_blocks.assign(n, BitMatrix::identity(k));
    pc.B_blocks.assign(n, BitMatrix::zero(k, k));
    pc.C_blocks.assign(n, BitMatrix::zero(k, k));
    pc.D_blocks.assign(n, BitMatrix::identity(k));
    pc.R = BitMatrix::identity(n * k);
    return pc;
}

/// Throws NotSymplectic if a party's block is not symplectic, NotPermutation if
/// R is singular or C_full (S (x) I_k) R != S (x) I_k.
inline void verify_permutation(const PermClifford &pc, const CssState &css) {
    CssState canon = css.canonical() ? css : css_canonicalize(css);
    if (pc.n != canon.n || pc.n_z != canon.n_z || pc.A_blocks.size() != pc.n || pc.B_blocks.size() != pc.n ||
        pc.C_blocks.size() != pc.n || pc.D_blocks.size() != pc.n || pc.R.rows() != pc.n * pc.k ||
        !pc.R.is_square()) {
        throw BadDimensions("PermClifford does not match the state dimensions");
    }
    for (std::size_t i = 0; i < pc.n; i++) {
        if (!is_symplectic(pc.party_block(i))) {
            throw NotSymplectic("local Clifford of party " + std::to_string(i + 1) + " is not symplectic");
        }
    }
    if (!is_invertible(pc.R)) {
        throw NotPermutation("R is singular");
    }
    BitMatrix s = copies_stabilizer(canon, pc.orthogonal, pc.k);
    if (pc.full_clifford() * s * pc.R != s) {
        throw NotPermutation("C (S (x) I_k) R != S (x) I_k");
    }
}

inline bool is_valid_permutation(const PermClifford &pc, const CssState &css) {
    try {
        verify_permutation(pc, css);
        return true;
    } catch (const NotPermutation &) {
        return false;
    } catch (const NotSymplectic &) {
        return false;
    }
}

/// b~ -> R^T b~.
inline BitVector apply_perm(const PermClifford &pc, const BitVector &btilde) {
    if (btilde.size() != pc.R.rows()) {
        throw BadDimensions("phase vector length must be n*k");
    }
    return pc.R.transpose() * btilde;
}

/// The operation "first pc1, then pc2". Its R is R1 R2, so b~ -> R2^T R1^T b~.
inline PermClifford compose(const PermClifford &pc1, const PermClifford &pc2) {
    if (pc1.k != pc2.k || pc1.n != pc2.n || pc1.n_z != pc2.n_z || pc1.orthogonal != pc2.orthogonal) {
        throw BadDimensions("cannot compose PermCliffords of different shapes");
    }
    PermClifford out = pc1;
    for (std::size_t i = 0; i < pc1.n; i++) {
        BitMatrix m = pc2.party_block(i) * pc1.party_block(i);
        std::size_t k = pc1.k;
        out.A_blocks[i] = m.block(0, 0, k, k);
        out.B_blocks[i] = m.block(0, k, k, k);
        out.C_blocks[i] = m.block(k, 0, k, k);
        out.D_blocks[i] = m.block(k, k, k, k);
    }
    out.R = pc1.R * pc2.R;
    return out;
}

/// Dimensions (d_z, d_x) of the spaces of outcome differences a single sigma_z
/// (resp. sigma_x) copy measurement can show between two phase vectors that
/// differ by delta (length n*k, party-major).
inline std::pair<std::size_t, std::size_t> candidate_degrees(
    const ThetaStructure &ts, bool orthogonal, std::size_t k, const BitVector &delta) {
    std::size_t n_z = ts.n_z(), n_x = ts.n_x(), n = ts.n();
    if (delta.size() != n * k) {
        throw BadDimensions("delta length must be n*k");
    }
    auto bit = [&](std::size_t gen, std::size_t copy) { return delta[gen * k + copy]; };

    if (orthogonal) {
        // Generator j contributes the 2k-vector (delta_z[j, :], delta_x[j, :]).
        BitMatrix m(n_z, 2 * k);
        for (std::size_t j = 0; j < n_z; j++) {
            for (std::size_t i = 0; i < k; i++) {
                m.set(j, i, bit(j, i));
                m.set(j, k + i, bit(n_z + j, i));
            }
        }
        std::size_t d = rank(m);
        return {d, d};
    }

    // Each row is a linear functional on g; the blind g form its kernel.
    std::vector<BitVector> fz;
    for (std::size_t i = 0; i < k; i++) {
        BitVector f(n_z);
        for (std::size_t j = 0; j < n_z; j++) {
            f.set(j, bit(j, i));
        }
        fz.push_back(f);
        for (std::size_t c = 0; c < ts.M_theta.cols(); c++) {
            BitVector h(n_z);
            for (std::size_t j = 0; j < n_z; j++) {
                bool acc = false;
                for (std::size_t l = 0; l < n_x; l++) {
                    acc ^= ts.theta.get(l, j) && ts.M_theta.get(l, c) && bit(n_z + l, i);
                }
                h.set(j, acc);
            }
            fz.push_back(h);
        }
    }
    std::vector<BitVector> fx;
    for (std::size_t i = 0; i < k; i++) {
        BitVector f(n_x);
        for (std::size_t l = 0; l < n_x; l++) {
            f.set(l, bit(n_z + l, i));
        }
        fx.push_back(f);
        for (std::size_t c = 0; c < ts.M_thetaT.cols(); c++) {
            BitVector h(n_x);
            for (std::size_t l = 0; l < n_x; l++) {
                bool acc = false;
                for (std::size_t j = 0; j < n_z; j++) {
                    acc ^= ts.theta.get(l, j) && ts.M_thetaT.get(j, c) && bit(j, i);
                }
                h.set(l, acc);
            }
            fx.push_back(h);
        }
    }
    return {rank(BitMatrix::from_row_vectors(fz, n_z)), rank(BitMatrix::from_row_vectors(fx, n_x))};
}

}  // namespace csshash
