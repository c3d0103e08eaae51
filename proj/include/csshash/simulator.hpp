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
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "csshash/perm_clifford.hpp"
#include "csshash/typical_set.hpp"
#include "csshash/yield.hpp"

namespace csshash {

/// Number of worker threads: hardware concurrency, capped by CSSHASH_THREADS.
inline std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("CSSHASH_THREADS")) {
        char *end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) {
            n = std::min(n, static_cast<std::size_t>(cap));
        }
    }
    return n;
}

/// Runs body(i) for i in [0, count) on worker threads. Indices are claimed
/// dynamically; the first exception is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t count, Body body, std::size_t workers = worker_count()) {
    workers = std::min(workers, std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; i++) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; w++) {
        pool.emplace_back([&] {
            while (!failed.load()) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) {
                    return;
                }
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    failed = true;
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// A CSS state and its noise in the canonical representation the protocol
/// acts on (S_x = S_z for orthogonal theta).
struct SimContext {
    CssState canon;
    ThetaStructure ts;
    DiagonalMixture mix;
    bool orthogonal = false;

    std::size_t n() const {
        return canon.n;
    }
    std::size_t n_z() const {
        return canon.n_z;
    }
};

inline SimContext make_sim_context(const CssState &css, const DiagonalMixture &mix) {
    if (mix.n != css.n) {
        throw BadDimensions("mixture and state sizes differ");
    }
    validate_mixture(mix, 1e-9);
    SimContext ctx;
    ctx.canon = css_canonicalize(css);
    if (is_separable(ctx.canon)) {
        throw NotFullyEntangled("the state is not fully entangled");
    }
    ctx.ts = build_theta_structure(*ctx.canon.theta);
    ctx.mix = canonical_mixture(ctx.canon, mix);
    ctx.orthogonal = ctx.canon.orthogonal;
    return ctx;
}

enum class Mode { overall, stepwise };

struct Schedule {
    std::size_t z_copies = 0;
    std::size_t x_copies = 0;

    std::size_t steps() const {
        return z_copies + x_copies;
    }
    bool is_z(std::size_t step) const {
        return step < z_copies;
    }
};

/// ceil(m_z k) z-measured copies followed by ceil(m_x k) x-measured copies.
inline Schedule make_schedule(std::size_t k, double m_z, double m_x) {
    if (!(m_z >= 0) || !(m_x >= 0) || !std::isfinite(m_z) || !std::isfinite(m_x)) {
        throw BadSchedule("measurement fractions must be finite and non-negative");
    }
    auto copies = [k](double m) {
        return static_cast<std::size_t>(std::ceil(m * static_cast<double>(k) - 1e-9));
    };
    Schedule s{copies(m_z), copies(m_x)};
    if (s.steps() > k) {
        throw BadSchedule("schedule measures " + std::to_string(s.steps()) + " of " + std::to_string(k) + " copies");
    }
    return s;
}

/// Survival probability of a candidate of degrees (d_z, d_x) under a schedule.
inline double predicted_survival(std::size_t d_z, std::size_t d_x, const Schedule &s) {
    return std::exp2(-static_cast<double>(d_z * s.z_copies + d_x * s.x_copies));
}

/// The linear functionals on b~ revealed by one protocol run, in step order:
/// rows [step_begin[t], step_begin[t + 1]) are revealed at step t.
struct MeasurementPlan {
    Mode mode = Mode::overall;
    Schedule schedule;
    std::vector<PermClifford> pcs;
    BitMatrix reveal;
    std::vector<std::size_t> step_begin;
};

namespace detail {

inline std::vector<std::size_t> revealed_rows(std::size_t n, std::size_t n_z, std::size_t k, std::size_t copy,
                                              bool z_step) {
    std::vector<std::size_t> rows;
    std::size_t lo = z_step ? 0 : n_z, hi = z_step ? n_z : n;
    for (std::size_t j = lo; j < hi; j++) {
        rows.push_back(j * k + copy);
    }
    return rows;
}

}  // namespace detail

template <Rng64 Rng>
MeasurementPlan sample_plan(const SimContext &ctx, std::size_t k, const Schedule &schedule, Mode mode, Rng &rng) {
    if (schedule.steps() > k) {
        throw BadSchedule("schedule longer than the number of copies");
    }
    std::size_t n = ctx.n(), n_z = ctx.n_z();
    MeasurementPlan plan;
    plan.mode = mode;
    plan.schedule = schedule;
    std::vector<BitVector> rows;
    if (mode == Mode::overall) {
        plan.pcs.push_back(sample_perm_clifford(ctx.ts, ctx.orthogonal, k, rng));
        BitMatrix rt = plan.pcs.front().R.transpose();
        for (std::size_t t = 0; t < schedule.steps(); t++) {
            plan.step_begin.push_back(rows.size());
            for (auto r : detail::revealed_rows(n, n_z, k, t, schedule.is_z(t))) {
                rows.push_back(rt.row(r));
            }
        }
    } else {
        // Re-randomize the unmeasured copies before every measurement and
        // always measure the first of them.
        BitMatrix current = BitMatrix::identity(n * k);
        for (std::size_t t = 0; t < schedule.steps(); t++) {
            std::size_t kt = k - t;
            plan.pcs.push_back(sample_perm_clifford(ctx.ts, ctx.orthogonal, kt, rng));
            BitMatrix w = plan.pcs.back().R.transpose() * current;
            plan.step_begin.push_back(rows.size());
            for (auto r : detail::revealed_rows(n, n_z, kt, 0, schedule.is_z(t))) {
                rows.push_back(w.row(r));
            }
            if (kt > 1) {
                BitMatrix next(n * (kt - 1), n * k);
                for (std::size_t j = 0; j < n; j++) {
                    for (std::size_t i = 1; i < kt; i++) {
                        next.set_row(j * (kt - 1) + i - 1, w.row(j * kt + i));
                    }
                }
                current = std::move(next);
            }
        }
    }
    plan.step_begin.push_back(rows.size());
    plan.reveal = BitMatrix::from_row_vectors(rows, n * k);
    return plan;
}

/// For each step, whether the candidate difference delta reveals nothing there.
inline std::vector<bool> step_outcomes(const MeasurementPlan &plan, const BitVector &delta) {
    BitVector revealed = plan.reveal * delta;
    std::vector<bool> out;
    for (std::size_t t = 0; t + 1 < plan.step_begin.size(); t++) {
        bool zero = true;
        for (std::size_t r = plan.step_begin[t]; r < plan.step_begin[t + 1] && zero; r++) {
            zero = !revealed[r];
        }
        out.push_back(zero);
    }
    return out;
}

inline bool survives(const MeasurementPlan &plan, const BitVector &delta) {
    return (plan.reveal * delta).none();
}

enum class PoolKind { exhaustive, typical, planted };

struct ProtocolOptions {
    Mode mode = Mode::overall;
    PoolKind pool = PoolKind::planted;
    double epsilon = 0.1;              ///< typicality tolerance for typical and planted pools
    std::size_t decoys = 64;           ///< planted pool: iid typical decoys
    std::optional<BitVector> truth;    ///< planted truth instead of a sampled one
    std::size_t max_stored = 1 << 16;  ///< survivors kept in the run record
};

struct ProtocolRun {
    BitVector truth;
    Schedule schedule;
    MeasurementPlan plan;
    BitVector revealed;
    std::size_t pool_size = 0;
    std::size_t survivor_count = 0;
    std::vector<BitVector> survivors;
    bool success = false;
};

namespace detail {

/// Truth, every typical b~ differing from it in exactly one copy, and up to
/// `decoys` iid typical sequences.
template <Rng64 Rng>
std::vector<BitVector> planted_pool(const SimContext &ctx, std::size_t k, const BitVector &truth,
                                    const ProtocolOptions &opt, Rng &rng) {
    std::size_t n = ctx.n();
    std::set<BitVector> pool{truth};
    auto symbols = copy_symbols(truth, n, k);
    for (std::size_t i = 0; i < k; i++) {
        for (uint64_t a = 0; a < ctx.mix.p.size(); a++) {
            if (a == symbols[i]) {
                continue;
            }
            auto alt = symbols;
            alt[i] = a;
            BitVector b = btilde_from_symbols(alt, n);
            if (is_typical(b, ctx.mix, k, opt.epsilon)) {
                pool.insert(std::move(b));
            }
        }
    }
    DiscreteSampler sampler(ctx.mix.p);
    for (std::size_t d = 0; d < opt.decoys; d++) {
        for (int attempt = 0; attempt < 100; attempt++) {
            BitVector b = sample_btilde(sampler, n, k, rng);
            if (is_typical(b, ctx.mix, k, opt.epsilon)) {
                pool.insert(std::move(b));
                break;
            }
        }
    }
    return {pool.begin(), pool.end()};
}

}  // namespace detail

/// One run of the hashing protocol: sample the hidden phases, apply a random
/// permuting local Clifford, measure the scheduled copies and eliminate every
/// pool member inconsistent with the revealed bits.
template <Rng64 Rng>
ProtocolRun run_protocol(const SimContext &ctx, std::size_t k, double m_z, double m_x, const ProtocolOptions &opt,
                         Rng &rng) {
    if (k == 0) {
        throw BadDimensions("copy count must be at least 1");
    }
    std::size_t n = ctx.n(), nk = n * k;
    ProtocolRun run;
    run.schedule = make_schedule(k, m_z, m_x);
    if (opt.truth) {
        if (opt.truth->size() != nk) {
            throw BadDimensions("planted truth has the wrong length");
        }
        run.truth = *opt.truth;
    } else {
        run.truth = sample_btilde(DiscreteSampler(ctx.mix.p), n, k, rng);
    }
    run.plan = sample_plan(ctx, k, run.schedule, opt.mode, rng);
    run.revealed = run.plan.reveal * run.truth;

    auto consider = [&](const BitVector &candidate) {
        run.pool_size++;
        if (survives(run.plan, candidate + run.truth)) {
            run.survivor_count++;
            if (run.survivors.size() < opt.max_stored) {
                run.survivors.push_back(candidate);
            }
        }
    };
    switch (opt.pool) {
        case PoolKind::exhaustive: {
            if (nk > kMaxExhaustiveBits) {
                throw TooLarge("exhaustive pool over " + std::to_string(nk) + " bits refused");
            }
            for (uint64_t u = 0; u < (uint64_t{1} << nk); u++) {
                consider(BitVector::from_u64(u, nk));
            }
            break;
        }
        case PoolKind::typical: {
            auto ts = build_typical_set(ctx.mix, k, opt.epsilon);
            bool has_truth = false;
            for (const auto &b : ts.members) {
                has_truth = has_truth || b == run.truth;
                consider(b);
            }
            if (!has_truth) {
                consider(run.truth);
            }
            break;
        }
        case PoolKind::planted: {
            for (const auto &b : detail::planted_pool(ctx, k, run.truth, opt, rng)) {
                consider(b);
            }
            break;
        }
    }
    bool truth_kept = std::find(run.survivors.begin(), run.survivors.end(), run.truth) != run.survivors.end() ||
                      run.survivor_count > run.survivors.size();
    if (!truth_kept || run.survivor_count == 0) {
        throw Error("internal error: the true phases were eliminated");
    }
    run.success = run.survivor_count == 1;
    return run;
}

/// Finds a difference vector of the requested degrees, preferring one
/// confined to a single copy, then to few copies.
template <Rng64 Rng>
std::optional<BitVector> plant_with_degrees(const SimContext &ctx, std::size_t k, std::size_t d_z, std::size_t d_x,
                                            Rng &rng, std::size_t attempts = 4000) {
    std::size_t n = ctx.n();
    auto matches = [&](const BitVector &delta) {
        return candidate_degrees(ctx.ts, ctx.orthogonal, k, delta) == std::pair{d_z, d_x};
    };
    if (d_z == 0 && d_x == 0) {
        return BitVector(n * k);
    }
    for (uint64_t a = 1; a < (uint64_t{1} << n); a++) {
        std::vector<uint64_t> symbols(k, 0);
        symbols[0] = a;
        BitVector delta = btilde_from_symbols(symbols, n);
        if (matches(delta)) {
            return delta;
        }
    }
    for (std::size_t copies = 2; copies <= k; copies++) {
        for (std::size_t t = 0; t < attempts; t++) {
            std::vector<uint64_t> symbols(k, 0);
            for (std::size_t i = 0; i < copies; i++) {
                symbols[i] = uniform_below(rng, uint64_t{1} << n);
            }
            BitVector delta = btilde_from_symbols(symbols, n);
            if (matches(delta)) {
                return delta;
            }
        }
    }
    return std::nullopt;
}

struct SurvivalBin {
    std::size_t d_z = 0;
    std::size_t d_x = 0;
    std::size_t candidates = 0;
    uint64_t trials = 0;  ///< candidate-trials: candidates times runs
    uint64_t survivals = 0;
    double predicted = 0;

    double rate() const {
        return trials ? static_cast<double>(survivals) / static_cast<double>(trials) : 0.0;
    }
    double sigma() const {
        return trials ? std::sqrt(predicted * (1 - predicted) / static_cast<double>(trials)) : 0.0;
    }
    double z_score() const {
        double s = sigma();
        if (s == 0) {
            return rate() == predicted ? 0.0 : std::copysign(INFINITY, rate() - predicted);
        }
        return (rate() - predicted) / s;
    }
};

struct SurvivalOptions {
    Mode mode = Mode::overall;
    PoolKind pool = PoolKind::planted;
    std::size_t decoys = 0;  ///< planted pool: iid decoy differences, binned by degree
};

struct SurvivalReport {
    std::size_t k = 0;
    Schedule schedule;
    std::vector<SurvivalBin> bins;

    const SurvivalBin *find(std::size_t d_z, std::size_t d_x) const {
        for (const auto &b : bins) {
            if (b.d_z == d_z && b.d_x == d_x) {
                return &b;
            }
        }
        return nullptr;
    }
};

inline constexpr std::size_t kMaxSurvivalExhaustiveBits = 16;

/// Survival statistics of candidate differences binned by their degrees.
/// The planted pool holds one difference per reachable degree pair (plus
/// optional decoys); the exhaustive pool holds every difference.
inline SurvivalReport survival_experiment(const SimContext &ctx, std::size_t k, double m_z, double m_x,
                                          std::size_t trials, uint64_t seed, const SurvivalOptions &opt = {}) {
    std::size_t n = ctx.n(), nk = n * k;
    SurvivalReport report;
    report.k = k;
    report.schedule = make_schedule(k, m_z, m_x);

    std::vector<BitVector> deltas;
    if (opt.pool == PoolKind::exhaustive) {
        if (nk > kMaxSurvivalExhaustiveBits) {
            throw TooLarge("exhaustive survival pool over " + std::to_string(nk) + " bits refused");
        }
        for (uint64_t u = 0; u < (uint64_t{1} << nk); u++) {
            deltas.push_back(BitVector::from_u64(u, nk));
        }
    } else {
        auto rng = make_stream(seed, 0);
        std::size_t max_x = ctx.orthogonal ? ctx.n_z() : n - ctx.n_z();
        for (std::size_t d_z = 0; d_z <= ctx.n_z(); d_z++) {
            for (std::size_t d_x = 0; d_x <= max_x; d_x++) {
                if (auto delta = plant_with_degrees(ctx, k, d_z, d_x, rng, 200)) {
                    deltas.push_back(*delta);
                }
            }
        }
        DiscreteSampler sampler(ctx.mix.p);
        for (std::size_t d = 0; d < opt.decoys; d++) {
            deltas.push_back(sample_btilde(sampler, n, k, rng) + sample_btilde(sampler, n, k, rng));
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> degrees;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> bin_index;
    for (const auto &delta : deltas) {
        degrees.push_back(candidate_degrees(ctx.ts, ctx.orthogonal, k, delta));
        bin_index[degrees.back()] = 0;
    }
    for (auto &[deg, index] : bin_index) {
        index = report.bins.size();
        SurvivalBin bin;
        bin.d_z = deg.first;
        bin.d_x = deg.second;
        bin.predicted = predicted_survival(deg.first, deg.second, report.schedule);
        report.bins.push_back(bin);
    }
    std::vector<std::size_t> which(deltas.size());
    for (std::size_t d = 0; d < deltas.size(); d++) {
        which[d] = bin_index[degrees[d]];
        report.bins[which[d]].candidates++;
    }

    std::vector<std::vector<uint64_t>> per_trial(trials, std::vector<uint64_t>(report.bins.size(), 0));
    parallel_for(trials, [&](std::size_t t) {
        auto rng = make_stream(seed, t + 1);
        auto plan = sample_plan(ctx, k, report.schedule, opt.mode, rng);
        for (std::size_t d = 0; d < deltas.size(); d++) {
            per_trial[t][which[d]] += survives(plan, deltas[d]);
        }
    });
    for (auto &bin : report.bins) {
        bin.trials = static_cast<uint64_t>(bin.candidates) * trials;
    }
    for (const auto &counts : per_trial) {
        for (std::size_t b = 0; b < counts.size(); b++) {
            report.bins[b].survivals += counts[b];
        }
    }
    return report;
}

namespace detail {

inline std::string format_double(double x, int digits = 12) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

}  // namespace detail

inline void write_survival_csv(std::ostream &out, const SurvivalReport &report) {
    out << "d_z,d_x,trials,survivals,predicted,z_score\n";
    for (const auto &b : report.bins) {
        out << b.d_z << "," << b.d_x << "," << b.trials << "," << b.survivals << ","
            << detail::format_double(b.predicted) << "," << detail::format_double(b.z_score()) << "\n";
    }
}

struct StepStat {
    bool z_step = true;
    uint64_t entered = 0;
    uint64_t survived = 0;
    double predicted = 0;

    double rate() const {
        return entered ? static_cast<double>(survived) / static_cast<double>(entered) : 0.0;
    }
    double z_score() const {
        if (entered == 0 || predicted <= 0 || predicted >= 1) {
            return 0;
        }
        return (rate() - predicted) / std::sqrt(predicted * (1 - predicted) / static_cast<double>(entered));
    }
};

struct DriftResult {
    std::vector<StepStat> steps;
    double chi_square = 0;
    std::size_t dof = 0;
    double p_value = 1;
    bool certain_steps_exact = true;  ///< steps predicted to pass always did
};

/// Conditional survival rate of `delta` at each measurement step, given that
/// it survived the earlier steps, compared against 2^{-d_z} (z-steps) and
/// 2^{-d_x} (x-steps) by a chi-square goodness-of-fit test.
inline DriftResult drift_check(const SimContext &ctx, std::size_t k, const Schedule &schedule, Mode mode,
                               std::size_t trials, const BitVector &delta, uint64_t seed) {
    if (delta.size() != ctx.n() * k) {
        throw BadDimensions("candidate difference has the wrong length");
    }
    auto [d_z, d_x] = candidate_degrees(ctx.ts, ctx.orthogonal, k, delta);
    std::size_t steps = schedule.steps();
    std::vector<std::vector<uint8_t>> outcome(trials);
    parallel_for(trials, [&](std::size_t t) {
        auto rng = make_stream(seed, t + 1);
        auto plan = sample_plan(ctx, k, schedule, mode, rng);
        auto o = step_outcomes(plan, delta);
        outcome[t].assign(o.begin(), o.end());
    });
    DriftResult res;
    res.steps.resize(steps);
    for (std::size_t s = 0; s < steps; s++) {
        res.steps[s].z_step = schedule.is_z(s);
        res.steps[s].predicted = std::exp2(-static_cast<double>(schedule.is_z(s) ? d_z : d_x));
    }
    for (const auto &o : outcome) {
        for (std::size_t s = 0; s < steps; s++) {
            res.steps[s].entered++;
            if (!o[s]) {
                break;
            }
            res.steps[s].survived++;
        }
    }
    for (const auto &st : res.steps) {
        if (st.entered == 0) {
            continue;
        }
        if (st.predicted >= 1) {
            res.certain_steps_exact = res.certain_steps_exact && st.survived == st.entered;
            continue;
        }
        double e = static_cast<double>(st.entered);
        double diff = static_cast<double>(st.survived) - e * st.predicted;
        res.chi_square += diff * diff / (e * st.predicted * (1 - st.predicted));
        res.dof++;
    }
    if (res.dof > 0) {
        boost::math::chi_squared dist(static_cast<double>(res.dof));
        res.p_value = boost::math::cdf(boost::math::complement(dist, res.chi_square));
    }
    return res;
}

}  // namespace csshash
