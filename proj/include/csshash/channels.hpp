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
#include <string>
#include <utility>
#include <vector>

#include "csshash/mixture.hpp"
#include "csshash/stabilizer.hpp"

namespace csshash {

/// Single-qubit Pauli channel rho -> q_I rho + q_X X rho X + q_Y Y rho Y + q_Z Z rho Z.
struct PauliChannel {
    double q_I = 1;
    double q_X = 0;
    double q_Y = 0;
    double q_Z = 0;
};

inline void validate_channel(const PauliChannel &c) {
    for (double q : {c.q_I, c.q_X, c.q_Y, c.q_Z}) {
        if (!(q >= 0) || !std::isfinite(q)) {
            throw BadDimensions("channel probabilities must be finite and non-negative");
        }
    }
    if (std::abs(c.q_I + c.q_X + c.q_Y + c.q_Z - 1) > kMixtureSumTolerance) {
        throw BadDimensions("channel probabilities must sum to 1");
    }
}

inline PauliChannel identity_channel() {
    return {};
}

inline PauliChannel depolarizing(double fidelity) {
    if (!(fidelity >= 0 && fidelity <= 1)) {
        throw BadDimensions("fidelity must lie in [0, 1]");
    }
    double e = (1 - fidelity) / 3;
    return {fidelity, e, e, e};
}

/// Phase-vector distribution of a pure CSS state (b = 0) after independent
/// Pauli channels on each qubit. Each qubit's error flips a fixed phase
/// pattern, so the result is the XOR-convolution of per-qubit distributions.
inline DiagonalMixture pauli_channel_mixture(const CssState &css, const std::vector<PauliChannel> &channels) {
    std::size_t n = css.n;
    if (channels.size() != n) {
        throw BadDimensions("need one channel per qubit");
    }
    if (n > kMaxMixtureBits) {
        throw TooLarge("mixture over " + std::to_string(n) + " bits refused");
    }
    DiagonalMixture mix = point_mass(n, css.b.to_u64());
    for (std::size_t q = 0; q < n; q++) {
        const auto &c = channels[q];
        validate_channel(c);
        BitVector ex(2 * n), ez(2 * n);
        ex.set(n + q, true);
        ez.set(q, true);
        uint64_t fx = syndrome_flip(css, ex).to_u64();
        uint64_t fz = syndrome_flip(css, ez).to_u64();
        std::vector<double> next(mix.p.size(), 0.0);
        for (uint64_t u = 0; u < mix.p.size(); u++) {
            double w = mix.p[u];
            if (w == 0) {
                continue;
            }
            next[u] += w * c.q_I;
            next[u ^ fx] += w * c.q_X;
            next[u ^ fx ^ fz] += w * c.q_Y;
            next[u ^ fz] += w * c.q_Z;
        }
        mix.p = std::move(next);
    }
    return mix;
}

/// n-qubit cat state: S_z = [I_{n-1}; 1...1], S_x = all-ones column, b = 0.
inline CssState cat_state(std::size_t n) {
    if (n < 2) {
        throw BadDimensions("cat state needs at least 2 qubits");
    }
    BitMatrix s_z(n, n - 1);
    for (std::size_t j = 0; j + 1 < n; j++) {
        s_z.set(j, j, true);
        s_z.set(n - 1, j, true);
    }
    return make_css_state(s_z, BitMatrix::ones(n, 1));
}

inline CssState bell_state() {
    return cat_state(2);
}

/// Cat state whose first qubit stays with the source and whose other qubits
/// pass through depolarizing channels of the given fidelity.
inline DiagonalMixture cat_depolarized_mixture(std::size_t n, double fidelity) {
    std::vector<PauliChannel> channels(n, depolarizing(fidelity));
    channels[0] = identity_channel();
    return pauli_channel_mixture(cat_state(n), channels);
}

/// Bell-diagonal mixture from probabilities of b = (b_z, b_x) in the order
/// 00, 10, 01, 11 (bit 0 is the z-phase).
inline DiagonalMixture bell_diagonal(const std::vector<double> &p) {
    return make_mixture(2, p);
}

inline BitMatrix css8_theta() {
    return BitMatrix::ones(4, 4) + BitMatrix::identity(4);
}

/// The 8-qubit orthogonal example: p(0) = 3/4, p(b) = 1/508 for every nonzero
/// b with b_1 = 0, and p(b) = 0 when b_1 = 1.
inline std::pair<CssState, DiagonalMixture> example_8q() {
    CssState css = make_css_state(
        vstack(BitMatrix::identity(4), css8_theta()), vstack(css8_theta().transpose(), BitMatrix::identity(4)));
    DiagonalMixture mix{8, std::vector<double>(256, 0.0)};
    mix.p[0] = 0.75;
    for (uint64_t u = 1; u < 256; u++) {
        if ((u & 1) == 0) {
            mix.p[u] = 1.0 / 508;
        }
    }
    return {css, mix};
}

}  // namespace csshash
