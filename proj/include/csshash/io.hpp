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
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "csshash/errors.hpp"
#include "csshash/mixture.hpp"
#include "csshash/stabilizer.hpp"

namespace csshash {

inline constexpr double kMixtureFileTolerance = 1e-6;

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

/// Reads significant lines (non-blank, not starting with '#') with their
/// 1-based line numbers.
class LineReader {
   public:
    explicit LineReader(std::istream &in) : in_(in) {}

    bool next(std::string &out) {
        std::string raw;
        while (std::getline(in_, raw)) {
            line_++;
            auto t = trim(raw);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            out.assign(t);
            return true;
        }
        return false;
    }
    std::size_t line() const {
        return line_;
    }

   private:
    std::istream &in_;
    std::size_t line_ = 0;
};

inline BitVector parse_bits(std::string_view s, std::size_t expected, std::size_t line) {
    std::string compact;
    for (char c : s) {
        if (c == '0' || c == '1') {
            compact.push_back(c);
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            throw ParseError(line, "unexpected character '" + std::string(1, c) + "' in bit string");
        }
    }
    if (compact.size() != expected) {
        throw ParseError(line, "expected " + std::to_string(expected) + " bits, found " +
                                   std::to_string(compact.size()));
    }
    return BitVector::from_string(compact);
}

inline std::size_t parse_count(std::string_view s, std::size_t line, std::string_view what) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line, "bad value for " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return value;
}

/// Parses "key=value key=value ..." and checks the keys are exactly `keys`.
inline std::map<std::string, std::size_t> parse_assignments(
    std::string_view s, const std::vector<std::string> &keys, std::size_t line) {
    std::map<std::string, std::size_t> out;
    std::istringstream words{std::string(s)};
    std::string word;
    while (words >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line, "expected key=value, found '" + word + "'");
        }
        std::string key = word.substr(0, eq);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ParseError(line, "unknown key '" + key + "'");
        }
        if (out.count(key)) {
            throw ParseError(line, "duplicate key '" + key + "'");
        }
        out[key] = parse_count(std::string_view(word).substr(eq + 1), line, key);
    }
    for (const auto &k : keys) {
        if (!out.count(k)) {
            throw ParseError(line, "missing key '" + k + "'");
        }
    }
    return out;
}

inline void expect_line(LineReader &r, std::string &buf, std::string_view what) {
    if (!r.next(buf)) {
        throw ParseError(r.line() + 1, "unexpected end of input, expected " + std::string(what));
    }
}

}  // namespace detail

/// Reads the "css-state v1" format. Throws ParseError naming the offending
/// line, or the validation errors of make_css_state.
inline CssState read_css_state(std::istream &in) {
    detail::LineReader r(in);
    std::string buf;
    detail::expect_line(r, buf, "header");
    if (buf != "css-state v1") {
        throw ParseError(r.line(), "expected header 'css-state v1'");
    }
    detail::expect_line(r, buf, "dimensions");
    auto dims = detail::parse_assignments(buf, {"n", "nz", "nx"}, r.line());
    std::size_t n = dims["n"], n_z = dims["nz"], n_x = dims["nx"];
    if (n == 0 || n_z + n_x != n) {
        throw ParseError(r.line(), "need n > 0 and nz + nx = n");
    }
    auto read_block = [&](std::string_view label, std::size_t cols) {
        detail::expect_line(r, buf, label);
        if (buf != label) {
            throw ParseError(r.line(), "expected '" + std::string(label) + "'");
        }
        BitMatrix m(n, cols);
        for (std::size_t q = 0; q < n; q++) {
            detail::expect_line(r, buf, "matrix row");
            m.set_row(q, detail::parse_bits(buf, cols, r.line()));
        }
        return m;
    };
    BitMatrix s_z = read_block("Sz:", n_z);
    BitMatrix s_x = read_block("Sx:", n_x);
    std::optional<BitVector> b;
    if (r.next(buf)) {
        if (buf.rfind("b=", 0) != 0) {
            throw ParseError(r.line(), "expected 'b=<bits>' or end of input");
        }
        b = detail::parse_bits(std::string_view(buf).substr(2), n, r.line());
        if (r.next(buf)) {
            throw ParseError(r.line(), "trailing content");
        }
    }
    return make_css_state(s_z, s_x, b);
}

inline void write_css_state(std::ostream &out, const CssState &s) {
    out << "css-state v1\n";
    out << "n=" << s.n << " nz=" << s.n_z << " nx=" << s.n_x << "\n";
    out << "Sz:\n";
    for (std::size_t q = 0; q < s.n; q++) {
        out << s.S_z.row(q).to_string() << "\n";
    }
    out << "Sx:\n";
    for (std::size_t q = 0; q < s.n; q++) {
        out << s.S_x.row(q).to_string() << "\n";
    }
    out << "b=" << s.b.to_string() << "\n";
}

/// Reads the "mixture v1" format. Omitted entries are 0; a total within 1e-6
/// of 1 is renormalized, anything further off is rejected.
inline DiagonalMixture read_mixture(std::istream &in) {
    detail::LineReader r(in);
    std::string buf;
    detail::expect_line(r, buf, "header");
    if (buf != "mixture v1") {
        throw ParseError(r.line(), "expected header 'mixture v1'");
    }
    detail::expect_line(r, buf, "n=<n>");
    std::size_t n = detail::parse_assignments(buf, {"n"}, r.line())["n"];
    if (n == 0 || n > kMaxMixtureBits) {
        throw ParseError(r.line(), "n must lie in [1, " + std::to_string(kMaxMixtureBits) + "]");
    }
    DiagonalMixture mix{n, std::vector<double>(std::size_t{1} << n, 0.0)};
    std::vector<bool> seen(mix.p.size(), false);
    double total = 0;
    while (r.next(buf)) {
        auto space = buf.find_first_of(" \t");
        if (space == std::string::npos) {
            throw ParseError(r.line(), "expected '<bits> <probability>'");
        }
        BitVector b = detail::parse_bits(std::string_view(buf).substr(0, space), n, r.line());
        auto value_text = detail::trim(std::string_view(buf).substr(space));
        double value = 0;
        auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
        if (ec != std::errc() || ptr != value_text.data() + value_text.size() || !std::isfinite(value) || value < 0) {
            throw ParseError(r.line(), "bad probability '" + std::string(value_text) + "'");
        }
        uint64_t u = b.to_u64();
        if (seen[u]) {
            throw ParseError(r.line(), "duplicate entry for " + b.to_string());
        }
        seen[u] = true;
        mix.p[u] = value;
        total += value;
    }
    if (std::abs(total - 1) > kMixtureFileTolerance) {
        throw ParseError(r.line(), "probabilities sum to " + std::to_string(total) + ", not 1");
    }
    for (auto &x : mix.p) {
        x /= total;
    }
    return mix;
}

inline void write_mixture(std::ostream &out, const DiagonalMixture &mix) {
    out << "mixture v1\n";
    out << "n=" << mix.n << "\n";
    char buf[64];
    for (uint64_t u = 0; u < mix.p.size(); u++) {
        if (mix.p[u] == 0) {
            continue;
        }
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), mix.p[u]);
        out << BitVector::from_u64(u, mix.n).to_string() << " " << std::string_view(buf, ptr - buf) << "\n";
    }
}

template <typename Reader>
auto read_file(const std::string &path, Reader reader) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return reader(in);
}

inline CssState load_css_state(const std::string &path) {
    return read_file(path, [](std::istream &in) { return read_css_state(in); });
}

inline DiagonalMixture load_mixture(const std::string &path) {
    return read_file(path, [](std::istream &in) { return read_mixture(in); });
}

}  // namespace csshash
