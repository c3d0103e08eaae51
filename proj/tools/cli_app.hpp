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

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csshash.hpp"

namespace csshash::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kAssertionFailed = 3 };

class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class AssertionFailed : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

inline std::string fixed(double x, int decimals = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

inline std::string csv_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

struct Inputs {
    std::string state_file;
    std::string mixture_file;
    std::string example;
    std::optional<double> fidelity;
};

struct Problem {
    CssState css;
    std::optional<DiagonalMixture> mix;
};

inline void add_inputs(CLI::App *sub, Inputs &in, bool with_state, bool with_mixture) {
    CLI::Option *example =
        sub->add_option("--example", in.example, "built-in example: cat4, css8 or bell")
            ->check(CLI::IsMember({"cat4", "css8", "bell"}));
    sub->add_option("--fidelity", in.fidelity, "channel fidelity F for the cat4 and bell examples")
        ->check(CLI::Range(0.0, 1.0));
    if (with_state) {
        sub->add_option("--state", in.state_file, "CSS state file")->excludes(example);
    }
    if (with_mixture) {
        sub->add_option("--mixture", in.mixture_file, "phase mixture file");
    }
}

/// Builds the state and noise of a built-in example. The cat state and the
/// Bell pair are depolarized with fidelity F (default 0.9); the 8-qubit
/// example carries its own fixed mixture.
inline Problem example_problem(const std::string &name, std::optional<double> fidelity) {
    if (name == "css8") {
        if (fidelity) {
            throw UsageError("--fidelity does not apply to the css8 example");
        }
        auto [css, mix] = example_8q();
        return {css, mix};
    }
    double f = fidelity.value_or(0.9);
    if (name == "cat4") {
        return {cat_state(4), cat_depolarized_mixture(4, f)};
    }
    double e = (1 - f) / 3;
    return {bell_state(), bell_diagonal({f, e, e, e})};
}

inline Problem load_problem(const Inputs &in, bool need_state, bool need_mixture) {
    Problem p;
    if (!in.example.empty()) {
        p = example_problem(in.example, in.fidelity);
    } else {
        if (in.fidelity) {
            throw UsageError("--fidelity requires --example");
        }
        if (need_state) {
            if (in.state_file.empty()) {
                throw UsageError("either --state or --example is required");
            }
            p.css = load_css_state(in.state_file);
        }
    }
    if (!in.mixture_file.empty()) {
        p.mix = load_mixture(in.mixture_file);
    }
    if (need_mixture && !p.mix) {
        throw UsageError("either --mixture or --example is required");
    }
    if (need_state && p.mix && p.mix->n != p.css.n) {
        throw BadDimensions("mixture has " + std::to_string(p.mix->n) + " bits but the state has " +
                            std::to_string(p.css.n) + " qubits");
    }
    return p;
}

inline std::string theta_text(const BitMatrix &theta) {
    std::string out;
    for (std::size_t r = 0; r < theta.rows(); r++) {
        if (r) {
            out += " /";
        }
        for (std::size_t c = 0; c < theta.cols(); c++) {
            out += (r || c) ? " " : "";
            out += theta.get(r, c) ? '1' : '0';
        }
    }
    return out;
}

inline std::string index_list(const std::vector<std::size_t> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); i++) {
        out += (i ? " " : "") + std::to_string(v[i]);
    }
    return out;
}

inline std::string degree_label(const DegreePair &d) {
    return "[" + std::to_string(d.first) + "," + std::to_string(d.second) + "]";
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Writer>
void emit(const std::string &path, std::ostream &fallback, Writer writer) {
    if (path.empty() || path == "-") {
        writer(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw Error("cannot write '" + path + "'");
    }
    writer(file);
    if (!file) {
        throw Error("failed writing '" + path + "'");
    }
}

inline void cmd_canon(const Inputs &in, std::ostream &out) {
    Problem p = load_problem(in, true, false);
    CssState c = css_canonicalize(p.css);
    out << "theta = " << theta_text(*c.theta) << "; orthogonal = " << (c.orthogonal ? "yes" : "no") << "\n";
    out << "n = " << c.n << "; n_z = " << c.n_z << "; n_x = " << c.n_x << "\n";
    out << "qubit_perm = " << index_list(c.qubit_perm) << "\n";
    if (auto cut = separating_bipartition(p.css)) {
        out << "separable = yes; parts = {" << index_list(cut->first) << "} | {" << index_list(cut->second)
            << "}\n";
    } else {
        out << "separable = no\n";
    }
}

inline void cmd_yield(const Inputs &in, const std::string &grid_out, std::ostream &out) {
    Problem p = load_problem(in, true, true);
    YieldResult y = compute_yield(p.css, *p.mix);
    out << "H = " << fixed(y.H) << "\n";
    out << "orthogonal = " << (y.orthogonal ? "yes" : "no") << "\n";
    out << "H[d_z,d_x]:\n";
    for (const auto &[d, e] : y.table) {
        out << "  " << degree_label(d) << " = " << fixed(e.value) << "\n";
    }
    out << "m_z = " << fixed(y.m_z) << "\n";
    out << "m_x = " << fixed(y.m_x) << "\n";
    out << "gamma = " << fixed(y.gamma) << "\n";
    out << "active =";
    for (const auto &d : y.active_constraints) {
        out << " " << degree_label(d);
    }
    out << "\n";
    if (!grid_out.empty()) {
        emit(grid_out, out, [&](std::ostream &csv) {
            csv << "d_z,d_x,H_dd,rhs\n";
            for (const auto &[d, e] : y.table) {
                csv << d.first << "," << d.second << "," << csv_number(e.value) << "," << csv_number(y.H - e.value)
                    << "\n";
            }
        });
    }
}

struct SweepArgs {
    std::string example = "cat4";
    double from = 0.8;
    double to = 1.0;
    std::size_t steps = 50;
    std::string out_file;
};

struct SweepRow {
    double F = 0;
    double ours = 0;
    double lo = 0;
    double man = 0;
};

/// Yields of the three protocols on the depolarized cat state at `steps`
/// evenly spaced fidelities, endpoints included, clamped at 0.
inline std::vector<SweepRow> sweep_rows(double from, double to, std::size_t steps) {
    std::vector<SweepRow> rows(steps);
    parallel_for(steps, [&](std::size_t i) {
        double f = steps == 1 ? to : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
        if (i + 1 == steps) {
            f = to;
        }
        auto mix = cat_depolarized_mixture(4, f);
        auto base = baseline_yields(mix);
        rows[i] = {f, compute_yield(cat_state(4), mix).gamma, std::max(0.0, base.lo), std::max(0.0, base.man)};
    });
    return rows;
}

inline void write_sweep_csv(std::ostream &csv, const std::vector<SweepRow> &rows) {
    csv << "F,yield_ours,yield_lo,yield_man\n";
    for (const auto &r : rows) {
        csv << csv_number(r.F) << "," << csv_number(r.ours) << "," << csv_number(r.lo) << "," << csv_number(r.man)
            << "\n";
    }
}

inline void cmd_sweep(const SweepArgs &a, std::ostream &out) {
    if (a.example != "cat4") {
        throw UsageError("sweep supports only --example cat4");
    }
    if (!(0 <= a.from && a.from < a.to && a.to <= 1)) {
        throw UsageError("need 0 <= --from < --to <= 1");
    }
    if (a.steps < 2) {
        throw UsageError("--steps must be at least 2");
    }
    auto rows = sweep_rows(a.from, a.to, a.steps);
    emit(a.out_file, out, [&](std::ostream &csv) { write_sweep_csv(csv, rows); });
}

struct SimulateArgs {
    std::size_t copies = 12;
    double m_z = 0;
    double m_x = 0;
    std::size_t trials = 1000;
    uint64_t seed = 1;
    std::string mode = "overall";
    std::string pool = "planted";
    std::size_t decoys = 0;
    std::string out_file;
};

inline void cmd_simulate(const Inputs &in, const SimulateArgs &a, std::ostream &out) {
    Problem p = load_problem(in, true, true);
    SimContext ctx = make_sim_context(p.css, *p.mix);
    SurvivalOptions opt;
    opt.mode = a.mode == "stepwise" ? Mode::stepwise : Mode::overall;
    opt.pool = a.pool == "exhaustive" ? PoolKind::exhaustive : PoolKind::planted;
    opt.decoys = a.decoys;
    if (a.copies == 0) {
        throw UsageError("--copies must be at least 1");
    }
    auto report = survival_experiment(ctx, a.copies, a.m_z, a.m_x, a.trials, a.seed, opt);
    emit(a.out_file, out, [&](std::ostream &csv) { write_survival_csv(csv, report); });
    if (const auto *zero = report.find(0, 0); zero && zero->survivals != zero->trials) {
        throw AssertionFailed("the zero difference was eliminated");
    }
}

struct CheckPermArgs {
    std::size_t copies = 2;
    std::size_t samples = 100;
    uint64_t seed = 1;
};

inline void cmd_check_perm(const Inputs &in, const CheckPermArgs &a, std::ostream &out) {
    Problem p = load_problem(in, true, false);
    if (a.copies == 0) {
        throw UsageError("--copies must be at least 1");
    }
    CssState canon = css_canonicalize(p.css);
    if (is_separable(canon)) {
        throw NotFullyEntangled("the state is not fully entangled");
    }
    auto ts = build_theta_structure(*canon.theta);
    std::vector<uint8_t> ok(a.samples, 0);
    std::vector<std::string> why(a.samples);
    parallel_for(a.samples, [&](std::size_t i) {
        auto rng = make_stream(a.seed, i);
        auto pc = sample_perm_clifford(ts, canon.orthogonal, a.copies, rng);
        try {
            verify_permutation(pc, canon);
            ok[i] = 1;
        } catch (const Error &e) {
            why[i] = e.what();
        }
    });
    std::size_t passed = 0;
    for (std::size_t i = 0; i < a.samples; i++) {
        passed += ok[i];
        if (!ok[i]) {
            out << "sample " << i << ": " << why[i] << "\n";
        }
    }
    out << passed << "/" << a.samples << " verified\n";
    if (passed != a.samples) {
        throw AssertionFailed("some sampled operations are not permutations");
    }
}

struct EntropyArgs {
    std::vector<std::size_t> bits;
    std::vector<std::size_t> given;
};

inline void cmd_entropy(const Inputs &in, const EntropyArgs &a, std::ostream &out) {
    Problem p = load_problem(in, false, true);
    const DiagonalMixture &mix = *p.mix;
    for (auto b : a.bits) {
        if (b >= mix.n) {
            throw UsageError("bit index " + std::to_string(b) + " out of range");
        }
    }
    for (auto b : a.given) {
        if (b >= mix.n) {
            throw UsageError("bit index " + std::to_string(b) + " out of range");
        }
    }
    if (!a.given.empty() && a.bits.empty()) {
        throw UsageError("--given requires --bits");
    }
    out << "H = " << fixed(entropy(mix)) << "\n";
    if (!a.bits.empty()) {
        out << "H(" << index_list(a.bits) << ") = " << fixed(marginal_entropy(mix, a.bits)) << "\n";
    }
    if (!a.given.empty()) {
        out << "H(" << index_list(a.bits) << " | " << index_list(a.given)
            << ") = " << fixed(conditional_entropy(mix, a.bits, a.given)) << "\n";
    }
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Hashing-protocol yields and simulations for multipartite CSS states", "csshash"};
    app.require_subcommand(1, 1);

    Inputs in;
    std::string grid_out;
    SweepArgs sweep;
    SimulateArgs sim;
    CheckPermArgs check;
    EntropyArgs ent;

    auto *canon = app.add_subcommand("canon", "canonical form of a CSS state");
    add_inputs(canon, in, true, false);

    auto *yield = app.add_subcommand("yield", "asymptotic yield from the entropy LP");
    add_inputs(yield, in, true, true);
    yield->add_option("--grid-out", grid_out, "CSV file for the H[d_z,d_x] grid");

    auto *sw = app.add_subcommand("sweep", "yield curves over the channel fidelity");
    sw->add_option("--example", sweep.example, "built-in example (cat4)");
    sw->add_option("--from", sweep.from, "first fidelity");
    sw->add_option("--to", sweep.to, "last fidelity");
    sw->add_option("--steps", sweep.steps, "number of points, endpoints included");
    sw->add_option("--out", sweep.out_file, "CSV output file (default: stdout)");

    auto *simulate = app.add_subcommand("simulate", "survival statistics of planted candidates");
    add_inputs(simulate, in, true, true);
    simulate->add_option("--copies", sim.copies, "number of copies k");
    simulate->add_option("--mz", sim.m_z, "fraction of z-measured copies")->required();
    simulate->add_option("--mx", sim.m_x, "fraction of x-measured copies")->required();
    simulate->add_option("--trials", sim.trials, "number of protocol runs");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--mode", sim.mode, "overall or stepwise")->check(CLI::IsMember({"overall", "stepwise"}));
    simulate->add_option("--pool", sim.pool, "planted or exhaustive")->check(CLI::IsMember({"planted", "exhaustive"}));
    simulate->add_option("--decoys", sim.decoys, "iid decoy differences in the planted pool");
    simulate->add_option("--out", sim.out_file, "CSV output file (default: stdout)");

    auto *cp = app.add_subcommand("check-perm", "verify sampled permuting local Cliffords");
    add_inputs(cp, in, true, false);
    cp->add_option("--copies", check.copies, "number of copies k");
    cp->add_option("--samples", check.samples, "number of samples");
    cp->add_option("--seed", check.seed, "master seed");

    auto *en = app.add_subcommand("entropy", "entropies of a phase mixture");
    add_inputs(en, in, false, true);
    en->add_option("--bits", ent.bits, "bit indices of a marginal")->delimiter(',');
    en->add_option("--given", ent.given, "bit indices to condition on")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*canon) {
            cmd_canon(in, out);
        } else if (*yield) {
            cmd_yield(in, grid_out, out);
        } else if (*sw) {
            cmd_sweep(sweep, out);
        } else if (*simulate) {
            cmd_simulate(in, sim, out);
        } else if (*cp) {
            cmd_check_perm(in, check, out);
        } else if (*en) {
            cmd_entropy(in, ent, out);
        }
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const AssertionFailed &e) {
        err << "assertion failed: " << e.what() << "\n";
        return kAssertionFailed;
    } catch (const BadSchedule &e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

}  // namespace csshash::cli
