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

#include "cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace csshash;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "csshash");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string &s) {
    return s.substr(0, s.find('\n'));
}

std::vector<std::string> lines_of(const std::string &s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
   public:
    TempDir() {
        path_ = std::filesystem::temp_directory_path() /
                ("csshash_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                 ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::filesystem::remove_all(path_);
    }
    std::string file(const std::string &name) const {
        return (path_ / name).string();
    }
    template <typename Writer>
    std::string write(const std::string &name, Writer writer) const {
        std::ofstream f(file(name));
        writer(f);
        return file(name);
    }

   private:
    std::filesystem::path path_;
};

// Minimizes m_z + m_x over a fine grid of the LP built from the entropy table.
double grid_search_gamma(const CssState &css, const DiagonalMixture &mix) {
    CssState canon = css_canonicalize(css);
    auto cmix = canonical_mixture(canon, mix);
    double h = entropy(cmix);
    auto table = H_dd_table(cmix, build_theta_structure(*canon.theta), canon.orthogonal);
    double best = INFINITY;
    const int steps = 2000;
    for (int i = 0; i <= steps; i++) {
        double mz = h * i / steps;
        // Smallest feasible m_x for this m_z.
        double mx = 0;
        for (const auto &[d, e] : table) {
            double need = h - e.value - d.first * mz;
            if (d.second == 0) {
                if (need > 1e-9) {
                    mx = INFINITY;
                }
            } else {
                mx = std::max(mx, need / d.second);
            }
        }
        best = std::min(best, mz + mx);
    }
    return std::clamp(1 - best, 0.0, 1.0);
}

}  // namespace

TEST(cli_canon, examples) {
    auto r = run({"canon", "--example", "cat4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.out), "theta = 1 1 1; orthogonal = no");
    EXPECT_NE(r.out.find("separable = no"), std::string::npos);
    r = run({"canon", "--example", "css8"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(first_line(r.out).find("orthogonal = yes"), std::string::npos);
    r = run({"canon", "--example", "bell"});
    EXPECT_EQ(first_line(r.out), "theta = 1; orthogonal = yes");
}

TEST(cli_canon, state_file_matches_example) {
    TempDir dir;
    auto path = dir.write("cat4.txt", [](std::ostream &o) { write_css_state(o, cat_state(4)); });
    EXPECT_EQ(run({"canon", "--state", path}).out, run({"canon", "--example", "cat4"}).out);
}

TEST(cli_canon, reports_separable_states) {
    TempDir dir;
    CssState two_bells = make_css_state(BitMatrix::from_rows({"10", "10", "01", "01"}),
                                        BitMatrix::from_rows({"10", "10", "01", "01"}));
    auto path = dir.write("sep.txt", [&](std::ostream &o) { write_css_state(o, two_bells); });
    auto r = run({"canon", "--state", path});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("separable = yes"), std::string::npos);
}

TEST(cli_errors, malformed_input_names_the_line) {
    TempDir dir;
    auto path = dir.write("bad.txt", [](std::ostream &o) { o << "css-state v1\nn=2 nz=1 nx=1\nSz:\n1x\n"; });
    auto r = run({"canon", "--state", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 4"), std::string::npos) << r.err;

    auto mix = dir.write("bad.mix", [](std::ostream &o) { o << "mixture v1\nn=2\n00 0.5\n01 0.6\n"; });
    r = run({"entropy", "--mixture", mix});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line"), std::string::npos);

    r = run({"canon", "--state", dir.file("missing.txt")});
    EXPECT_EQ(r.code, 2);
}

TEST(cli_errors, usage_problems_exit_with_one) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"canon", "--example", "cat4", "--bogus"}).code, 1);
    EXPECT_EQ(run({"canon", "--example", "cat5"}).code, 1);
    EXPECT_EQ(run({"canon"}).code, 1);
    EXPECT_EQ(run({"yield", "--example", "css8", "--fidelity", "0.9"}).code, 1);
    EXPECT_EQ(run({"sweep", "--from", "0.9", "--to", "0.8"}).code, 1);
    EXPECT_EQ(run({"simulate", "--example", "cat4", "--mz", "0.7", "--mx", "0.7", "--copies", "4"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(cli_errors, mismatched_mixture_is_a_data_error) {
    TempDir dir;
    auto mix = dir.write("m.mix", [](std::ostream &o) { write_mixture(o, uniform_mixture(3)); });
    EXPECT_EQ(run({"yield", "--example", "cat4", "--mixture", mix}).code, 2);
}

TEST(cli_yield, css8_prints_four_decimals) {
    auto r = run({"yield", "--example", "css8"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto [css, mix] = example_8q();
    EXPECT_NE(r.out.find("gamma = " + cli::fixed(compute_yield(css, mix).gamma) + "\n"), std::string::npos);
    EXPECT_NE(r.out.find("H = 2.5584\n"), std::string::npos) << r.out;
}

TEST(cli_yield, pure_cat_gives_one) {
    auto r = run({"yield", "--example", "cat4", "--fidelity", "1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("gamma = 1.0000\n"), std::string::npos) << r.out;
}

TEST(cli_yield, matches_grid_search_pipeline) {
    TempDir dir;
    auto mix = cat_depolarized_mixture(4, 0.9);
    auto state = dir.write("cat4.txt", [](std::ostream &o) { write_css_state(o, cat_state(4)); });
    auto mixture = dir.write("cat4.mix", [&](std::ostream &o) { write_mixture(o, mix); });
    auto grid = dir.file("grid.csv");
    auto r = run({"yield", "--state", state, "--mixture", mixture, "--grid-out", grid});
    ASSERT_EQ(r.code, 0) << r.err;
    double oracle = grid_search_gamma(cat_state(4), mix);
    auto pos = r.out.find("gamma = ");
    ASSERT_NE(pos, std::string::npos);
    double printed = std::stod(r.out.substr(pos + 8));
    EXPECT_NEAR(printed, oracle, 1e-3);
    auto rows = lines_of(slurp(grid));
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0], "d_z,d_x,H_dd,rhs");
    EXPECT_EQ(rows.size(), 1u + 4 * 2 - 1);
}

TEST(cli_sweep, ordering_endpoints_and_monotonicity) {
    TempDir dir;
    auto path = dir.file("sweep.csv");
    auto r = run({"sweep", "--example", "cat4", "--from", "0.8", "--to", "1.0", "--steps", "50", "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = lines_of(slurp(path));
    ASSERT_EQ(rows.size(), 51u);
    EXPECT_EQ(rows[0], "F,yield_ours,yield_lo,yield_man");
    EXPECT_EQ(rows[50], "1,1,1,1");
    double prev[3] = {-1, -1, -1};
    bool strict = false;
    for (std::size_t i = 1; i < rows.size(); i++) {
        double f, ours, lo, man;
        ASSERT_EQ(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf,%lf", &f, &ours, &lo, &man), 4);
        EXPECT_GE(ours, lo - 1e-12);
        EXPECT_GE(lo, man - 1e-12);
        strict = strict || ours > lo + 1e-9;
        double cur[3] = {ours, lo, man};
        for (int c = 0; c < 3; c++) {
            EXPECT_GE(cur[c], prev[c] - 1e-12) << rows[i];
            prev[c] = cur[c];
        }
    }
    EXPECT_TRUE(strict);
}

TEST(cli_simulate, byte_identical_with_fixed_seed) {
    std::vector<std::string> args{"simulate", "--example", "cat4", "--copies", "8", "--mz", "0.25",
                                  "--mx",     "0.25",      "--trials", "400", "--seed", "5", "--decoys", "10"};
    auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(first_line(a.out), "d_z,d_x,trials,survivals,predicted,z_score");
    args[12] = "6";
    EXPECT_NE(run(args).out, a.out);
    auto step = run({"simulate", "--example", "bell", "--copies", "3", "--mz", "0.33", "--mx", "0.33", "--trials",
                     "100", "--mode", "stepwise", "--pool", "exhaustive"});
    EXPECT_EQ(step.code, 0) << step.err;
}

TEST(cli_check_perm, cat4_two_copies) {
    auto r = run({"check-perm", "--example", "cat4", "--copies", "2", "--samples", "100"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "100/100 verified\n");
}

TEST(cli_entropy, css8_and_marginals) {
    auto r = run({"entropy", "--example", "css8"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(first_line(r.out), "H = 2.5584");
    r = run({"entropy", "--example", "cat4", "--fidelity", "1", "--bits", "0,3", "--given", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("H(0 3) = 0.0000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("H(0 3 | 1) = 0.0000"), std::string::npos);
    EXPECT_EQ(run({"entropy", "--example", "cat4", "--bits", "9"}).code, 1);
}
