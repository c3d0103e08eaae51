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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "csshash/mixture.hpp"
#include "csshash/rng.hpp"
#include "csshash/yield.hpp"

namespace csshash {

inline constexpr std::size_t kMaxExhaustiveBits = 24;

/// k copies' phase vectors b~ are stored party-major: bit j*k + i is phase j
/// of copy i. These helpers convert from and to per-copy symbols.
inline BitVector btilde_from_symbols(const std::vector<uint64_t> &symbols, std::size_t n) {
    std::size_t k = symbols.size();
    BitVector out(n * k);
    for (std::size_t i = 0; i < k; i++) {
        for (std::size_t j = 0; j < n; j++) {
            out.set(j * k + i, (symbols[i] >> j) & 1);
        }
    }
    return out;
}

inline uint64_t copy_symbol(const BitVector &btilde, std::size_t n, std::size_t k, std::size_t i) {
    uint64_t a = 0;
    for (std::size_t j = 0; j < n; j++) {
        a |= static_cast<uint64_t>(btilde[j * k + i]) << j;
    }
    return a;
}

inline std::vector<uint64_t> copy_symbols(const BitVector &btilde, std::size_t n, std::size_t k) {
    std::vector<uint64_t> out(k);
    for (std::size_t i = 0; i < k; i++) {
        out[i] = copy_symbol(btilde, n, k, i);
    }
    return out;
}

/// Draws b~ from k independent copies of the mixture.
template <Rng64 Rng>
BitVector sample_btilde(const DiscreteSampler &sampler, std::size_t n, std::size_t k, Rng &rng) {
    std::vector<uint64_t> symbols(k);
    for (auto &a : symbols) {
        a = sampler(rng);
    }
    return btilde_from_symbols(symbols, n);
}

/// Strongly typical sequences: every symbol frequency within epsilon of its
/// probability, and no zero-probability symbol present.
struct TypicalSet {
    std::size_t n = 0;
    std::size_t k = 0;
    double epsilon = 0;
    bool exhaustive = true;
    std::vector<BitVector> members;
    std::vector<double> weights;  ///< sampling mode: fraction of draws per member
    std::size_t draws = 0;        ///< sampling mode: number of sequences drawn
    double sampled_mass = 0;      ///< sampling mode: typical fraction of the draws
};

inline bool counts_are_typical(
    const std::vector<std::size_t> &counts, const DiagonalMixture &mix, std::size_t k, double epsilon) {
    for (std::size_t a = 0; a < counts.size(); a++) {
        if (mix.p[a] == 0) {
            if (counts[a] != 0) {
                return false;
            }
            continue;
        }
        double f = static_cast<double>(counts[a]) / static_cast<double>(k);
        if (!(std::abs(f - mix.p[a]) < epsilon)) {
            return false;
        }
    }
    return true;
}

inline bool is_typical(const BitVector &btilde, const DiagonalMixture &mix, std::size_t k, double epsilon) {
    std::vector<std::size_t> counts(mix.p.size(), 0);
    for (auto a : copy_symbols(btilde, mix.n, k)) {
        counts[a]++;
    }
    return counts_are_typical(counts, mix, k, epsilon);
}

/// Enumerates every typical b~. Throws TooLarge when n*k exceeds 24 bits.
inline TypicalSet build_typical_set(const DiagonalMixture &mix, std::size_t k, double epsilon) {
    if (mix.n * k > kMaxExhaustiveBits) {
        throw TooLarge("typical set over " + std::to_string(mix.n * k) + " bits refused");
    }
    TypicalSet ts{mix.n, k, epsilon, true, {}, {}, 0, 0};
    std::vector<uint64_t> support;
    for (uint64_t a = 0; a < mix.p.size(); a++) {
        if (mix.p[a] > 0) {
            support.push_back(a);
        }
    }
    std::vector<std::size_t> counts(mix.p.size(), 0);
    std::vector<uint64_t> seq(k);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == k) {
            if (counts_are_typical(counts, mix, k, epsilon)) {
                ts.members.push_back(btilde_from_symbols(seq, mix.n));
            }
            return;
        }
        for (auto a : support) {
            if (static_cast<double>(counts[a] + 1) / static_cast<double>(k) >= mix.p[a] + epsilon) {
                continue;
            }
            counts[a]++;
            seq[i] = a;
            rec(i + 1);
            counts[a]--;
        }
    };
    rec(0);
    ts.weights.assign(ts.members.size(), 1.0);
    return ts;
}

/// Draws `draws` sequences from the mixture and keeps the typical ones,
/// weighted by their multiplicity.
template <Rng64 Rng>
TypicalSet sample_typical_set(
    const DiagonalMixture &mix, std::size_t k, double epsilon, std::size_t draws, Rng &rng) {
    TypicalSet ts{mix.n, k, epsilon, false, {}, {}, draws, 0};
    DiscreteSampler sampler(mix.p);
    std::map<BitVector, std::size_t> seen;
    std::size_t typical = 0;
    for (std::size_t t = 0; t < draws; t++) {
        BitVector b = sample_btilde(sampler, mix.n, k, rng);
        if (is_typical(b, mix, k, epsilon)) {
            typical++;
            seen[b]++;
        }
    }
    for (const auto &[b, c] : seen) {
        ts.members.push_back(b);
        ts.weights.push_back(static_cast<double>(c) / static_cast<double>(draws));
    }
    ts.sampled_mass = draws ? static_cast<double>(typical) / static_cast<double>(draws) : 0.0;
    return ts;
}

/// Exact probability mass of an enumerated typical set.
inline double typical_mass(const TypicalSet &ts, const DiagonalMixture &mix) {
    double mass = 0;
    for (const auto &b : ts.members) {
        double p = 1;
        for (auto a : copy_symbols(b, ts.n, ts.k)) {
            p *= mix.p[a];
        }
        mass += p;
    }
    return mass;
}

/// Summed Chebyshev bound on the probability of an atypical sequence:
/// sum_a p(a)(1 - p(a)) / (k epsilon^2).
inline double chebyshev_delta(const DiagonalMixture &mix, std::size_t k, double epsilon) {
    double s = 0;
    for (double p : mix.p) {
        s += p * (1 - p);
    }
    return s / (static_cast<double>(k) * epsilon * epsilon);
}

struct MatchCount {
    uint64_t enumerated = 0;
    uint64_t multinomial = 0;
};

namespace detail {

inline uint64_t binomial(uint64_t n, uint64_t r) {
    if (r > n) {
        return 0;
    }
    unsigned __int128 acc = 1;
    for (uint64_t i = 1; i <= r; i++) {
        acc = acc * (n - r + i) / i;
    }
    return static_cast<uint64_t>(acc);
}

}  // namespace detail

/// Number of typical b~ whose every copy lies in the same coset of J^perp as
/// the corresponding copy of u, counted by enumeration and, independently, by
/// summing products of multinomials over admissible frequency profiles.
inline MatchCount count_matching(const TypicalSet &ts, const DiagonalMixture &mix, const BitMatrix &j,
                                 const BitVector &u) {
    if (!ts.exhaustive) {
        throw BadDimensions("count_matching needs an enumerated typical set");
    }
    if (j.rows() != ts.n || u.size() != ts.n * ts.k || mix.n != ts.n) {
        throw BadDimensions("dimension mismatch in count_matching");
    }
    if (ts.k > 60) {
        throw TooLarge("copy count too large for exact counting");
    }
    auto labels = coset_labels(ts.n, j);
    auto u_symbols = copy_symbols(u, ts.n, ts.k);

    MatchCount out;
    for (const auto &b : ts.members) {
        bool match = true;
        for (std::size_t i = 0; i < ts.k && match; i++) {
            match = labels[copy_symbol(b, ts.n, ts.k, i)] == labels[u_symbols[i]];
        }
        out.enumerated += match;
    }

    std::map<uint64_t, std::size_t> coset_total;
    for (auto a : u_symbols) {
        coset_total[labels[a]]++;
    }
    std::size_t alphabet = mix.p.size();
    std::vector<std::size_t> counts(alphabet, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t a, std::size_t left) {
        if (a == alphabet) {
            if (left != 0 || !counts_are_typical(counts, mix, ts.k, ts.epsilon)) {
                return;
            }
            std::map<uint64_t, std::size_t> totals;
            for (std::size_t s = 0; s < alphabet; s++) {
                if (counts[s]) {
                    totals[labels[s]] += counts[s];
                }
            }
            for (const auto &[label, tot] : totals) {
                auto it = coset_total.find(label);
                if (it == coset_total.end() || it->second != tot) {
                    return;
                }
            }
            for (const auto &[label, tot] : coset_total) {
                if (!totals.count(label)) {
                    return;
                }
            }
            // Within each coset, arrange its symbols over that coset's copies.
            uint64_t ways = 1;
            std::map<uint64_t, std::size_t> remaining = coset_total;
            for (std::size_t s = 0; s < alphabet; s++) {
                if (counts[s]) {
                    auto &r = remaining[labels[s]];
                    ways *= detail::binomial(r, counts[s]);
                    r -= counts[s];
                }
            }
            out.multinomial += ways;
            return;
        }
        for (std::size_t c = 0; c <= left; c++) {
            counts[a] = c;
            rec(a + 1, left - c);
        }
        counts[a] = 0;
    };
    rec(0, ts.k);
    return out;
}

}  // namespace csshash
