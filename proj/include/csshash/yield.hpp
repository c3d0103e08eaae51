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
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csshash/mixture.hpp"
#include "csshash/perm_clifford.hpp"

namespace csshash {

inline constexpr double kLpTolerance = 1e-9;

using DegreePair = std::pair<std::size_t, std::size_t>;

/// Row-wise Kronecker product: row r of the result is kron(row r of a, row r of b).
inline BitMatrix row_kron(const BitMatrix &a, const BitMatrix &b) {
    if (a.rows() != b.rows()) {
        throw BadDimensions("row_kron needs equal row counts");
    }
    BitMatrix out(a.rows(), a.cols() * b.cols());
    for (std::size_t r = 0; r < a.rows(); r++) {
        out.set_row(r, kron(a.row(r), b.row(r)));
    }
    return out;
}

/// The matrix J whose left kernel J^perp defines the coset partition for the
/// subspaces spanned by the columns of G_z (n_z rows) and G_x (n_x rows).
inline BitMatrix build_J(const ThetaStructure &ts, bool orthogonal, const BitMatrix &g_z, const BitMatrix &g_x) {
    std::size_t n_z = ts.n_z(), n_x = ts.n_x();
    if (g_z.rows() != n_z || g_x.rows() != n_x) {
        throw BadDimensions("G_z must have n_z rows and G_x n_x rows");
    }
    if (rank(g_z) != g_z.cols() || rank(g_x) != g_x.cols()) {
        throw BadDimensions("G_z and G_x must have full column rank");
    }
    std::size_t cz = g_z.cols(), cx = g_x.cols();
    if (orthogonal) {
        if (n_z != n_x) {
            throw BadDimensions("orthogonal J needs n_z = n_x");
        }
        return block_matrix({
            {g_z, BitMatrix::zero(n_z, cz), BitMatrix::zero(n_z, cx), g_x},
            {BitMatrix::zero(n_x, cz), g_z, g_x, BitMatrix::zero(n_x, cx)},
        });
    }
    BitMatrix u = row_kron(ts.theta * g_z, ts.M_theta);
    BitMatrix v = row_kron(ts.theta.transpose() * g_x, ts.M_thetaT);
    return block_matrix({
        {g_z, BitMatrix::zero(n_z, u.cols()), BitMatrix::zero(n_z, cx), v},
        {BitMatrix::zero(n_x, cz), u, g_x, BitMatrix::zero(n_x, v.cols())},
    });
}

/// Coset label of every b under w ~ w' iff J^T (w + w') = 0, as an integer
/// built from J_basis^T b.
inline std::vector<uint64_t> coset_labels(std::size_t n, const BitMatrix &j) {
    BitMatrix basis_t = column_space_basis(j).transpose();
    if (basis_t.rows() > 63) {
        throw TooLarge("coset label exceeds 63 bits");
    }
    std::vector<uint64_t> labels(std::size_t{1} << n);
    for (uint64_t u = 0; u < labels.size(); u++) {
        labels[u] = (basis_t * BitVector::from_u64(u, n)).to_u64();
    }
    return labels;
}

inline double coset_entropy(const DiagonalMixture &mix, const BitMatrix &j) {
    if (j.rows() != mix.n) {
        throw BadDimensions("J must have n rows");
    }
    auto labels = coset_labels(mix.n, j);
    std::unordered_map<uint64_t, double> mass;
    for (uint64_t u = 0; u < labels.size(); u++) {
        mass[labels[u]] += mix.p[u];
    }
    std::vector<double> w;
    w.reserve(mass.size());
    for (const auto &[label, m] : mass) {
        w.push_back(m);
    }
    std::sort(w.begin(), w.end());
    return detail::entropy_of(w);
}

struct HddEntry {
    double value = 0;
    BitMatrix G_z;
    BitMatrix G_x;
};

namespace detail {

class CosetEntropyCache {
   public:
    explicit CosetEntropyCache(const DiagonalMixture &mix) : mix_(mix) {}

    double operator()(const BitMatrix &j) {
        std::string key = column_space_basis(j).to_string();
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            return it->second;
        }
        double h = coset_entropy(mix_, j);
        cache_.emplace(std::move(key), h);
        return h;
    }

   private:
    const DiagonalMixture &mix_;
    std::unordered_map<std::string, double> cache_;
};

inline HddEntry h_dd_cached(
    CosetEntropyCache &cache, const ThetaStructure &ts, bool orthogonal, std::size_t d_z, std::size_t d_x) {
    if (d_z > ts.n_z() || d_x > ts.n_x()) {
        throw BadDimensions("degree exceeds generator count");
    }
    auto gzs = enumerate_subspaces(ts.n_z(), ts.n_z() - d_z);
    auto gxs = enumerate_subspaces(ts.n_x(), ts.n_x() - d_x);
    HddEntry best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto &g_z : gzs) {
        for (const auto &g_x : gxs) {
            double h = cache(build_J(ts, orthogonal, g_z, g_x));
            if (h < best.value) {
                best = {h, g_z, g_x};
            }
        }
    }
    return best;
}

}  // namespace detail

/// Minimum coset entropy over all subspaces of dimensions n_z - d_z and n_x - d_x.
inline HddEntry H_dd(
    const DiagonalMixture &mix, const ThetaStructure &ts, bool orthogonal, std::size_t d_z, std::size_t d_x) {
    if (mix.n != ts.n()) {
        throw BadDimensions("mixture size does not match theta");
    }
    detail::CosetEntropyCache cache(mix);
    return detail::h_dd_cached(cache, ts, orthogonal, d_z, d_x);
}

/// All grid points except (0, 0).
inline std::map<DegreePair, HddEntry> H_dd_table(
    const DiagonalMixture &mix, const ThetaStructure &ts, bool orthogonal) {
    if (mix.n != ts.n()) {
        throw BadDimensions("mixture size does not match theta");
    }
    detail::CosetEntropyCache cache(mix);
    std::map<DegreePair, HddEntry> table;
    for (std::size_t d_z = 0; d_z <= ts.n_z(); d_z++) {
        for (std::size_t d_x = 0; d_x <= ts.n_x(); d_x++) {
            if (d_z != 0 || d_x != 0) {
                table[{d_z, d_x}] = detail::h_dd_cached(cache, ts, orthogonal, d_z, d_x);
            }
        }
    }
    return table;
}

/// One LP row: d_z m_z + d_x m_x >= rhs.
struct LpConstraint {
    std::size_t d_z = 0;
    std::size_t d_x = 0;
    double rhs = 0;
};

inline std::vector<LpConstraint> lp_constraints(double h, const std::map<DegreePair, double> &table) {
    std::vector<LpConstraint> rows;
    for (const auto &[d, h_dd] : table) {
        rows.push_back({d.first, d.second, h - h_dd});
    }
    return rows;
}

struct LpSolution {
    double m_z = 0;
    double m_x = 0;
    std::vector<DegreePair> active;
};

/// Exact optimum of: minimize m_z + m_x subject to the rows and m_z, m_x >= 0,
/// by enumerating vertices. Ties go to the lexicographically smallest (m_z, m_x).
inline LpSolution lp_solve(double h, const std::map<DegreePair, double> &table) {
    struct Line {
        double a, b, c;
    };
    std::vector<Line> lines = {{1, 0, 0}, {0, 1, 0}};
    for (const auto &row : lp_constraints(h, table)) {
        if (row.d_z == 0 && row.d_x == 0) {
            continue;
        }
        lines.push_back({static_cast<double>(row.d_z), static_cast<double>(row.d_x), row.rhs});
    }
    auto feasible = [&](double x, double y) {
        for (const auto &l : lines) {
            if (l.a * x + l.b * y < l.c - kLpTolerance) {
                return false;
            }
        }
        return true;
    };

    bool found = false;
    double best_x = 0, best_y = 0;
    for (std::size_t i = 0; i < lines.size(); i++) {
        for (std::size_t j = i + 1; j < lines.size(); j++) {
            double det = lines[i].a * lines[j].b - lines[i].b * lines[j].a;
            if (det == 0) {
                continue;
            }
            double x = (lines[i].c * lines[j].b - lines[i].b * lines[j].c) / det;
            double y = (lines[i].a * lines[j].c - lines[i].c * lines[j].a) / det;
            if (!feasible(x, y)) {
                continue;
            }
            double obj = x + y, best = best_x + best_y;
            bool better = !found || obj < best - kLpTolerance ||
                          (obj <= best + kLpTolerance && (x < best_x - kLpTolerance ||
                                                          (x <= best_x + kLpTolerance && y < best_y - kLpTolerance)));
            if (better) {
                found = true;
                best_x = x;
                best_y = y;
            }
        }
    }
    if (!found) {
        throw Infeasible("LP has no feasible vertex");
    }
    LpSolution sol{std::max(0.0, best_x), std::max(0.0, best_y), {}};
    for (const auto &row : lp_constraints(h, table)) {
        double lhs = static_cast<double>(row.d_z) * sol.m_z + static_cast<double>(row.d_x) * sol.m_x;
        if (std::abs(lhs - row.rhs) <= kLpTolerance) {
            sol.active.emplace_back(row.d_z, row.d_x);
        }
    }
    return sol;
}

struct YieldResult {
    double H = 0;
    std::map<DegreePair, HddEntry> table;
    double m_z = 0;
    double m_x = 0;
    double gamma = 0;
    std::vector<DegreePair> active_constraints;
    bool orthogonal = false;

    std::map<DegreePair, double> values() const {
        std::map<DegreePair, double> out;
        for (const auto &[d, e] : table) {
            out[d] = e.value;
        }
        return out;
    }
};

/// Change of phase basis taking the caller's generators to those of the
/// canonical form the protocol works in: (R_z^T b_z, R_x^T b_x), and in the
/// orthogonal case additionally b_x -> theta^T b_x so that S_x = S_z.
inline BitMatrix canonical_phase_map(const CssState &canon) {
    BitMatrix x_map = canon.R_x.transpose();
    if (canon.orthogonal) {
        x_map = canon.theta->transpose() * x_map;
    }
    return block_diagonal({canon.R_z.transpose(), x_map});
}

/// The mixture expressed in the canonical (protocol) phase basis.
inline DiagonalMixture canonical_mixture(const CssState &canon, const DiagonalMixture &mix) {
    return transform_mixture(mix, canonical_phase_map(canon));
}

inline YieldResult yield_from_canonical(const CssState &canon, const DiagonalMixture &canon_mix) {
    auto ts = build_theta_structure(*canon.theta);
    YieldResult res;
    res.orthogonal = canon.orthogonal;
    res.H = entropy(canon_mix);
    res.table = H_dd_table(canon_mix, ts, canon.orthogonal);
    auto sol = lp_solve(res.H, res.values());
    res.m_z = sol.m_z;
    res.m_x = sol.m_x;
    res.active_constraints = sol.active;
    res.gamma = std::clamp(1 - res.m_z - res.m_x, 0.0, 1.0);
    return res;
}

/// Asymptotic yield of the hashing protocol for the given state and noise.
inline YieldResult compute_yield(const CssState &css, const DiagonalMixture &mix) {
    if (mix.n != css.n) {
        throw BadDimensions("mixture has " + std::to_string(mix.n) + " bits for an " + std::to_string(css.n) +
                            "-qubit state");
    }
    validate_mixture(mix, 1e-9);
    CssState canon = css_canonicalize(css);
    for (auto c : theta_components(*canon.theta)) {
        if (c != 0) {
            throw NotFullyEntangled("state is separable");
        }
    }
    return yield_from_canonical(canon, canonical_mixture(canon, mix));
}

/// Yields of the two earlier cat-state protocols; bits 0..2 are the z-phases
/// and bit 3 the x-phase of the 4-qubit cat state. Not clamped.
struct BaselineYields {
    double man = 0;
    double lo = 0;
};

inline BaselineYields baseline_yields(const DiagonalMixture &mix) {
    if (mix.n != 4) {
        throw BadDimensions("baseline yields are defined for the 4-qubit cat state");
    }
    double max_hj = 0, max_hj_given4 = 0;
    for (std::size_t j = 0; j < 3; j++) {
        max_hj = std::max(max_hj, marginal_entropy(mix, {j}));
        max_hj_given4 = std::max(max_hj_given4, conditional_entropy(mix, {j}, {3}));
    }
    double h4 = marginal_entropy(mix, {3});
    double h4_given = conditional_entropy(mix, {3}, {0, 1, 2});
    return {1 - max_hj - h4, std::max(1 - max_hj - h4_given, 1 - max_hj_given4 - h4)};
}

/// Yield of the CNOT-only variant on the 8-qubit example.
inline double cnot_only_yield_8q(const DiagonalMixture &mix) {
    if (mix.n != 8) {
        throw BadDimensions("CNOT-only yield is defined for the 8-qubit example");
    }
    double h = entropy(mix);
    double h58 = marginal_entropy(mix, {4, 5, 6, 7});
    return 1 - h58 / 4 - (h - h58) / 3;
}

}  // namespace csshash
