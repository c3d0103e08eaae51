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

#include "csshash/perm_clifford.hpp"

#include <cmath>
#include <set>
#include <string>

#include "gtest/gtest.h"

using namespace csshash;

namespace {

CssState cat4() {
    return css_canonicalize(make_css_state(
        BitMatrix::from_rows({"100", "010", "001", "111"}), BitMatrix::from_rows({"1", "1", "1", "1"})));
}

CssState css8() {
    BitMatrix theta = BitMatrix::ones(4, 4) + BitMatrix::identity(4);
    return css_from_theta(theta);
}

CssState bell() {
    return css_canonicalize(make_css_state(BitMatrix::from_rows({"1", "1"}), BitMatrix::from_rows({"1", "1"})));
}

CssState dual_cat() {
    return css_from_theta(BitMatrix::from_rows({"1", "1", "1"}));
}

std::vector<BitVector> all_vectors(std::size_t n) {
    std::vector<BitVector> out;
    for (uint64_t v = 0; v < (uint64_t{1} << n); v++) {
        out.push_back(BitVector::from_u64(v, n));
    }
    return out;
}

bool in_column_span(const BitMatrix &basis, const BitVector &v) {
    return solve(basis, v).has_value();
}

std::vector<BitMatrix> all_sp2() {
    std::vector<BitMatrix> out;
    for_each_symplectic(1, [&](const BitMatrix &c) { out.push_back(c); });
    return out;
}

// A tuple of per-party local Cliffords permutes the copies iff it maps the
// column space of S (x) I_k onto itself.
bool tuple_is_valid(const PermClifford &pc, const CssState &canon) {
    BitMatrix s = copies_stabilizer(canon, pc.orthogonal, pc.k);
    return same_column_space(pc.full_clifford() * s, s);
}

PermClifford tuple_from_blocks(const std::vector<BitMatrix> &blocks, const CssState &canon, bool orthogonal) {
    PermClifford pc;
    pc.k = blocks.front().rows() / 2;
    pc.n = canon.n;
    pc.n_z = canon.n_z;
    pc.orthogonal = orthogonal;
    std::size_t k = pc.k;
    for (const auto &b : blocks) {
        pc.A_blocks.push_back(b.block(0, 0, k, k));
        pc.B_blocks.push_back(b.block(0, k, k, k));
        pc.C_blocks.push_back(b.block(k, 0, k, k));
        pc.D_blocks.push_back(b.block(k, k, k, k));
    }
    pc.R = BitMatrix::identity(pc.n * k);
    return pc;
}

std::string tuple_key(const PermClifford &pc) {
    std::string key;
    for (std::size_t i = 0; i < pc.n; i++) {
        key += pc.party_block(i).to_string() + "|";
    }
    return key;
}

// Dimension of the span of all outcome differences seen by single-copy
// measurements over many sampled permutations.
std::pair<std::size_t, std::size_t> observed_degrees(
    const CssState &canon, bool orthogonal, std::size_t k, const BitVector &delta, std::size_t samples, uint64_t seed) {
    auto ts = build_theta_structure(*canon.theta);
    auto rng = make_stream(seed, 0);
    std::vector<BitVector> zs, xs;
    for (std::size_t t = 0; t < samples; t++) {
        auto pc = sample_perm_clifford(ts, orthogonal, k, rng);
        BitVector u = apply_perm(pc, delta);
        for (std::size_t i = 0; i < k; i++) {
            BitVector z(canon.n_z), x(canon.n - canon.n_z);
            for (std::size_t j = 0; j < canon.n_z; j++) {
                z.set(j, u[j * k + i]);
            }
            for (std::size_t l = 0; l < x.size(); l++) {
                x.set(l, u[(canon.n_z + l) * k + i]);
            }
            zs.push_back(z);
            xs.push_back(x);
        }
    }
    return {
        rank(BitMatrix::from_row_vectors(zs, canon.n_z)),
        rank(BitMatrix::from_row_vectors(xs, canon.n - canon.n_z)),
    };
}

}  // namespace

TEST(build_theta_structure, cat4) {
    auto ts = build_theta_structure(BitMatrix::from_rows({"111"}));
    EXPECT_EQ(ts.L_theta, BitMatrix::from_rows({"1"}));
    EXPECT_EQ(ts.L_thetaT.rows(), 3u);
    EXPECT_EQ(ts.L_thetaT.cols(), 0u);
    EXPECT_EQ(ts.M_theta.rows(), 1u);
    EXPECT_EQ(ts.M_theta.cols(), 0u);
    EXPECT_EQ(ts.M_thetaT, BitMatrix::identity(3));
    EXPECT_EQ(ts.constraint_B, BitMatrix::from_rows({"1111"}));
    EXPECT_EQ(ts.constraint_C, BitMatrix::from_rows({"1001", "0101", "0011", "0001"}));
    EXPECT_FALSE(ts.orthogonal);
}

TEST(build_theta_structure, bell) {
    auto ts = build_theta_structure(BitMatrix::from_rows({"1"}));
    EXPECT_EQ(ts.L_theta.cols(), 0u);
    EXPECT_EQ(ts.L_thetaT.cols(), 0u);
    EXPECT_EQ(ts.constraint_B, BitMatrix::from_rows({"11"}));
    EXPECT_EQ(ts.constraint_C, BitMatrix::from_rows({"11"}));
    EXPECT_TRUE(ts.orthogonal);
}

TEST(build_theta_structure, css8) {
    auto ts = build_theta_structure(*css8().theta);
    EXPECT_TRUE(ts.orthogonal);
    EXPECT_EQ(ts.constraint_B.cols(), 8u);
    EXPECT_EQ(ts.constraint_C.cols(), 8u);
}

TEST(build_theta_structure, matches_brute_force_on_random_theta) {
    auto rng = make_stream(11, 0);
    for (int trial = 0; trial < 200; trial++) {
        std::size_t n_x = 1 + uniform_below(rng, 4), n_z = 1 + uniform_below(rng, 4);
        BitMatrix theta = random_matrix(n_x, n_z, rng);
        auto ts = build_theta_structure(theta);
        // L_theta spans exactly the pairwise products of distinct columns.
        std::vector<BitVector> products;
        for (std::size_t j = 0; j < n_z; j++) {
            for (std::size_t l = j + 1; l < n_z; l++) {
                BitVector p(n_x);
                for (std::size_t r = 0; r < n_x; r++) {
                    p.set(r, theta.get(r, j) && theta.get(r, l));
                }
                products.push_back(p);
            }
        }
        for (const auto &p : products) {
            ASSERT_TRUE(in_column_span(ts.L_theta, p));
        }
        ASSERT_EQ(ts.L_theta.cols(), rank(BitMatrix::from_column_vectors(products, n_x)));
        // M_theta spans exactly the vectors orthogonal to every product.
        std::size_t count = 0;
        for (const auto &v : all_vectors(n_x)) {
            bool orth = true;
            for (const auto &p : products) {
                orth = orth && !p.dot(v);
            }
            ASSERT_EQ(orth, in_column_span(ts.M_theta, v));
            count += orth;
        }
        ASSERT_EQ(count, uint64_t{1} << ts.M_theta.cols());
        ASSERT_EQ(ts.constraint_B.cols(), n_x + n_z);
        ASSERT_EQ(ts.constraint_C.cols(), n_x + n_z);
    }
}

TEST(sample_perm_clifford, cat4_structure) {
    auto ts = build_theta_structure(*cat4().theta);
    auto rng = make_stream(1, 0);
    for (std::size_t k = 1; k <= 4; k++) {
        for (int t = 0; t < 200; t++) {
            auto pc = sample_perm_clifford(ts, false, k, rng);
            BitMatrix sum(k, k);
            for (std::size_t i = 0; i < 4; i++) {
                ASSERT_TRUE(pc.C_blocks[i].is_zero());
                ASSERT_EQ(pc.A_blocks[i], pc.A());
                ASSERT_EQ(pc.D_blocks[i], invert(pc.A()).transpose());
                sum += pc.B_blocks[i];
            }
            ASSERT_TRUE(sum.is_zero());
        }
    }
}

TEST(sample_perm_clifford, k1_non_orthogonal_has_trivial_a) {
    auto ts = build_theta_structure(*cat4().theta);
    auto rng = make_stream(2, 0);
    for (int t = 0; t < 50; t++) {
        auto pc = sample_perm_clifford(ts, false, 1, rng);
        ASSERT_EQ(pc.A(), BitMatrix::identity(1));
    }
}

TEST(sample_perm_clifford, bell_orthogonal_r) {
    auto ts = build_theta_structure(*bell().theta);
    auto rng = make_stream(3, 0);
    for (std::size_t k = 1; k <= 3; k++) {
        auto pc = sample_perm_clifford(ts, true, k, rng);
        BitMatrix expected = block_matrix({
            {pc.D().transpose(), pc.B_blocks[0].transpose()},
            {pc.C_blocks[0].transpose(), pc.A().transpose()},
        });
        EXPECT_EQ(pc.R, expected);
        EXPECT_EQ(pc.party_block(0), pc.party_block(1));
    }
}

TEST(sample_perm_clifford, refuses_separable_and_bad_orthogonal_request) {
    auto rng = make_stream(4, 0);
    auto sep = build_theta_structure(BitMatrix::identity(2));
    EXPECT_THROW(sample_perm_clifford(sep, true, 2, rng), NotFullyEntangled);
    auto ts = build_theta_structure(*cat4().theta);
    EXPECT_THROW(sample_perm_clifford(ts, true, 2, rng), BadDimensions);
    EXPECT_THROW(sample_perm_clifford(ts, false, 0, rng), BadDimensions);
    auto b = build_theta_structure(*bell().theta);
    EXPECT_THROW(sample_perm_clifford(b, false, 2, rng), NotPermutation);
}

TEST(verify_permutation, identity) {
    auto c = cat4();
    auto pc = identity_perm_clifford(4, 3, 3);
    EXPECT_NO_THROW(verify_permutation(pc, c));
    EXPECT_EQ(pc.R, BitMatrix::identity(12));
}

TEST(verify_permutation, samples_pass_on_examples) {
    auto rng = make_stream(5, 0);
    for (const auto &[state, orth] : std::vector<std::pair<CssState, bool>>{
             {bell(), true}, {cat4(), false}, {css8(), true}, {dual_cat(), false}}) {
        auto ts = build_theta_structure(*state.theta);
        for (std::size_t k = 1; k <= 4; k++) {
            for (int t = 0; t < 1000; t++) {
                auto pc = sample_perm_clifford(ts, orth, k, rng);
                ASSERT_NO_THROW(verify_permutation(pc, state)) << "k=" << k;
            }
        }
    }
}

TEST(verify_permutation, unequal_a_blocks_are_rejected) {
    auto c = cat4();
    auto pc = identity_perm_clifford(4, 3, 2);
    BitMatrix a2 = BitMatrix::from_rows({"11", "01"});
    pc.A_blocks[1] = a2;
    pc.D_blocks[1] = invert(a2).transpose();
    ASSERT_TRUE(is_symplectic(pc.party_block(1)));
    // No choice of R can help: the column space itself moves.
    BitMatrix s = copies_stabilizer(c, false, 2);
    ASSERT_FALSE(same_column_space(pc.full_clifford() * s, s));
    EXPECT_THROW(verify_permutation(pc, c), NotPermutation);
}

TEST(verify_permutation, non_symplectic_block_is_rejected) {
    auto c = cat4();
    auto pc = identity_perm_clifford(4, 3, 1);
    pc.B_blocks[2] = BitMatrix::identity(1);
    pc.C_blocks[2] = BitMatrix::identity(1);
    EXPECT_THROW(verify_permutation(pc, c), NotSymplectic);
}

TEST(verify_permutation, singular_r_is_rejected) {
    auto c = cat4();
    auto pc = identity_perm_clifford(4, 3, 1);
    pc.R = BitMatrix::zero(4, 4);
    EXPECT_THROW(verify_permutation(pc, c), NotPermutation);
}

TEST(sample_perm_clifford, cat4_k1_support_matches_exhaustive_enumeration) {
    auto c = cat4();
    auto sp = all_sp2();
    ASSERT_EQ(sp.size(), 6u);
    std::set<std::string> valid;
    for (std::size_t idx = 0; idx < 6 * 6 * 6 * 6; idx++) {
        std::vector<BitMatrix> blocks;
        for (std::size_t q = 0, rest = idx; q < 4; q++, rest /= 6) {
            blocks.push_back(sp[rest % 6]);
        }
        auto pc = tuple_from_blocks(blocks, c, false);
        if (tuple_is_valid(pc, c)) {
            valid.insert(tuple_key(pc));
        }
    }
    EXPECT_EQ(valid.size(), 8u);

    auto ts = build_theta_structure(*c.theta);
    auto rng = make_stream(6, 0);
    std::set<std::string> support;
    for (int t = 0; t < 2000; t++) {
        support.insert(tuple_key(sample_perm_clifford(ts, false, 1, rng)));
    }
    EXPECT_EQ(support, valid);
}

TEST(sample_perm_clifford, bell_k1_support_matches_exhaustive_enumeration) {
    auto c = bell();
    auto sp = all_sp2();
    std::set<std::string> valid;
    for (const auto &b1 : sp) {
        for (const auto &b2 : sp) {
            auto pc = tuple_from_blocks({b1, b2}, c, true);
            if (tuple_is_valid(pc, c)) {
                valid.insert(tuple_key(pc));
            }
        }
    }
    EXPECT_EQ(valid.size(), 6u);
    auto ts = build_theta_structure(*c.theta);
    auto rng = make_stream(7, 0);
    std::set<std::string> support;
    for (int t = 0; t < 500; t++) {
        support.insert(tuple_key(sample_perm_clifford(ts, true, 1, rng)));
    }
    EXPECT_EQ(support, valid);
}

TEST(apply_perm, identity_and_linearity) {
    auto pc = identity_perm_clifford(4, 3, 2);
    auto rng = make_stream(8, 0);
    BitVector u = random_vector(8, rng);
    EXPECT_EQ(apply_perm(pc, u), u);
    auto ts = build_theta_structure(*cat4().theta);
    for (int t = 0; t < 100; t++) {
        auto q = sample_perm_clifford(ts, false, 2, rng);
        BitVector a = random_vector(8, rng), b = random_vector(8, rng);
        ASSERT_EQ(apply_perm(q, a) + apply_perm(q, b), apply_perm(q, a + b));
    }
    EXPECT_THROW(apply_perm(pc, BitVector(7)), BadDimensions);
}

TEST(apply_perm, bijective_for_two_parties_two_copies) {
    auto ts = build_theta_structure(*bell().theta);
    auto rng = make_stream(9, 0);
    for (int t = 0; t < 50; t++) {
        auto pc = sample_perm_clifford(ts, true, 2, rng);
        std::set<uint64_t> images;
        for (uint64_t v = 0; v < 16; v++) {
            images.insert(apply_perm(pc, BitVector::from_u64(v, 4)).to_u64());
        }
        ASSERT_EQ(images.size(), 16u);
    }
}

TEST(compose, closed_under_composition) {
    auto rng = make_stream(10, 0);
    for (const auto &[state, orth] : std::vector<std::pair<CssState, bool>>{
             {bell(), true}, {cat4(), false}, {css8(), true}}) {
        auto ts = build_theta_structure(*state.theta);
        for (std::size_t k = 1; k <= 4; k++) {
            for (int t = 0; t < 100; t++) {
                auto p1 = sample_perm_clifford(ts, orth, k, rng);
                auto p2 = sample_perm_clifford(ts, orth, k, rng);
                auto p = compose(p1, p2);
                ASSERT_NO_THROW(verify_permutation(p, state));
                BitVector u = random_vector(state.n * k, rng);
                ASSERT_EQ(apply_perm(p, u), apply_perm(p2, apply_perm(p1, u)));
            }
        }
    }
}

TEST(candidate_degrees, zero_delta) {
    auto ts = build_theta_structure(*cat4().theta);
    auto d = candidate_degrees(ts, false, 3, BitVector(12));
    EXPECT_EQ(d, std::make_pair(std::size_t{0}, std::size_t{0}));
}

TEST(candidate_degrees, cat4_single_x_phase_flip) {
    auto ts = build_theta_structure(*cat4().theta);
    BitVector delta(4);
    delta.set(3, true);
    auto d = candidate_degrees(ts, false, 1, delta);
    EXPECT_EQ(d.first, 0u);
    EXPECT_EQ(d.second, 1u);
}

TEST(candidate_degrees, zero_only_for_zero_delta_cat4_k2) {
    auto ts = build_theta_structure(*cat4().theta);
    for (const auto &delta : all_vectors(8)) {
        auto d = candidate_degrees(ts, false, 2, delta);
        ASSERT_EQ(d.first == 0 && d.second == 0, delta.none()) << delta;
    }
}

TEST(candidate_degrees, matches_observed_outcome_spans) {
    struct Case {
        CssState state;
        bool orth;
        std::size_t k;
    };
    std::vector<Case> cases = {{cat4(), false, 1}, {cat4(), false, 2}, {dual_cat(), false, 2},
                               {bell(), true, 2},  {css8(), true, 1}};
    auto rng = make_stream(12, 0);
    for (const auto &c : cases) {
        auto ts = build_theta_structure(*c.state.theta);
        std::size_t len = c.state.n * c.k;
        std::vector<BitVector> deltas;
        if (len <= 8) {
            deltas = all_vectors(len);
        } else {
            for (int t = 0; t < 40; t++) {
                deltas.push_back(random_vector(len, rng));
            }
        }
        for (const auto &delta : deltas) {
            auto expected = observed_degrees(c.state, c.orth, c.k, delta, 60, 13);
            ASSERT_EQ(candidate_degrees(ts, c.orth, c.k, delta), expected) << "delta=" << delta;
        }
    }
}

TEST(candidate_degrees, cat4_has_no_z_only_class) {
    auto ts = build_theta_structure(*cat4().theta);
    for (std::size_t k = 1; k <= 2; k++) {
        for (const auto &delta : all_vectors(4 * k)) {
            auto d = candidate_degrees(ts, false, k, delta);
            ASSERT_FALSE(d.first > 0 && d.second == 0);
        }
    }
}

TEST(candidate_degrees, survival_probability_matches_degree) {
    struct Case {
        CssState state;
        bool orth;
    };
    const std::size_t k = 10, trials = 4000;
    auto rng = make_stream(14, 0);
    for (const auto &c : std::vector<Case>{{cat4(), false}, {css8(), true}, {dual_cat(), false}}) {
        auto ts = build_theta_structure(*c.state.theta);
        for (int rep = 0; rep < 3; rep++) {
            BitVector delta = random_vector(c.state.n * k, rng);
            if (rep == 0) {
                delta = BitVector(c.state.n * k);
                delta.set(0, true);
            }
            auto [d_z, d_x] = candidate_degrees(ts, c.orth, k, delta);
            std::size_t zero = 0;
            for (std::size_t t = 0; t < trials; t++) {
                BitVector u = apply_perm(sample_perm_clifford(ts, c.orth, k, rng), delta);
                bool hidden = true;
                for (std::size_t j = 0; j < c.state.n_z; j++) {
                    hidden = hidden && !u[j * k];
                }
                zero += hidden;
            }
            double p = std::ldexp(1.0, -static_cast<int>(d_z));
            double sigma = std::sqrt(p * (1 - p) / trials);
            EXPECT_NEAR(static_cast<double>(zero) / trials, p, 3 * sigma + 1e-3) << "d_z=" << d_z;
        }
    }
}
