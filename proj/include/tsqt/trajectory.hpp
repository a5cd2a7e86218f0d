// Copyright 2026 The tsqt Authors
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


/**
 * @file trajectory.hpp
 * @brief Monte Carlo trajectory oracle for pre- and post-selected ensembles.
 *
 * Each run follows the state through the protocol in the laboratory frame:
 * Align/Unalign apply their unitaries, Measure samples a Born outcome and
 * collapses onto it (first kind), BlockFilter passes with the null-result
 * probability of the blocked paths, and Postselect accepts with the Born
 * probability of the final state. Runs that fail postselection are simply
 * discarded. Nothing here calls into the closed-form ABL code; compare_to_abl
 * is the only place the two meet.
 *
 * Randomness: run r under seed s draws from its own SplitMix64 stream keyed by
 * (s, r), so results do not depend on how runs are split across threads.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tsqt/abl.hpp"
#include "tsqt/protocol.hpp"
#include "tsqt/qlinalg.hpp"

namespace tsqt {

/// Deterministic per-run random stream (SplitMix64 over a hashed key).
class RunStream {
  public:
    using result_type = std::uint64_t;

    RunStream(std::uint64_t seed, std::uint64_t run_index)
        : state_(mix(seed ^ mix(run_index + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(state_ += 0x9e3779b97f4a7c15ULL); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

struct RecordedOutcome {
    double t;
    std::string observable;
    std::size_t outcome;
    friend bool operator==(const RecordedOutcome &, const RecordedOutcome &) = default;
};

struct TrajectoryRecord {
    /// Measure outcomes in timeline order.
    std::vector<RecordedOutcome> outcomes;
    bool null_filters_passed = true;
    bool postselected = false;

    bool kept() const noexcept { return null_filters_passed && postselected; }
    friend bool operator==(const TrajectoryRecord &, const TrajectoryRecord &) = default;
};

namespace detail {

/// A protocol flattened into laboratory-frame steps.
struct CompiledStep {
    enum class Kind { Unitary, Measure, Filter, Postselect };
    Kind kind;
    double t;
    std::string label;
    Operator unitary;                    // Unitary
    std::vector<std::vector<Amplitude>> kets;  // Measure: routed eigenkets; Postselect: {routed b}
    std::vector<std::size_t> blocked;    // Filter: blocked paths
    std::vector<Amplitude> kept_ket;     // Filter: routed kept eigenket
};

struct CompiledProtocol {
    std::vector<Amplitude> initial;
    std::vector<CompiledStep> steps;
    std::size_t measure_stages = 0;
};

inline std::vector<Amplitude> routed(const AlignmentFrame &f, const Ket &k) { return apply_raw(f.unitary, k.amplitudes()); }

inline CompiledProtocol compile(const Protocol &p) {
    CompiledProtocol cp;
    const auto &events = p.events();
    cp.initial = routed(p.frame_after(0), p.pre());
    for (std::size_t i = 1; i < events.size(); ++i) {
        const auto &e = events[i];
        const AlignmentFrame &before = p.frame_after(i - 1);
        CompiledStep step{CompiledStep::Kind::Unitary, e.t, e.observable, Operator::identity(p.dim()), {}, {}, {}};
        switch (e.kind) {
            case EventKind::Prepare:
                break;
            case EventKind::Align:
            case EventKind::Unalign:
                step.unitary = multiply(p.frame_after(i).unitary, adjoint(before.unitary));
                cp.steps.push_back(std::move(step));
                break;
            case EventKind::Measure: {
                step.kind = CompiledStep::Kind::Measure;
                for (const auto &k : p.observable(e.observable).eigenkets()) step.kets.push_back(routed(before, k));
                cp.steps.push_back(std::move(step));
                ++cp.measure_stages;
                break;
            }
            case EventKind::BlockFilter: {
                const auto &c = p.observable(e.observable);
                const std::size_t kept_path = *path_assignment(before, c)[e.keep];
                step.kind = CompiledStep::Kind::Filter;
                for (std::size_t k = 0; k < p.dim(); ++k)
                    if (k != kept_path) step.blocked.push_back(k);
                step.kept_ket = routed(before, c.eigenket(e.keep));
                cp.steps.push_back(std::move(step));
                break;
            }
            case EventKind::Postselect:
                step.kind = CompiledStep::Kind::Postselect;
                step.label = e.state;
                step.kets.push_back(routed(before, p.post()));
                cp.steps.push_back(std::move(step));
                break;
        }
    }
    return cp;
}

inline Amplitude overlap(const std::vector<Amplitude> &bra, const std::vector<Amplitude> &ket) {
    Amplitude s = 0.0;
    for (std::size_t k = 0; k < bra.size(); ++k) s += std::conj(bra[k]) * ket[k];
    return s;
}

struct RunResult {
    bool null_filters_passed = true;
    bool postselected = false;
    std::size_t stages_reached = 0;
};

/// One run. Writes Measure outcome indices into `outcomes`, which the caller
/// sizes to measure_stages.
inline RunResult simulate(const CompiledProtocol &cp, RunStream &rng, std::vector<std::size_t> &outcomes) {
    std::vector<Amplitude> state = cp.initial;
    std::size_t stage = 0;
    for (const auto &step : cp.steps) {
        switch (step.kind) {
            case CompiledStep::Kind::Unitary:
                state = apply_raw(step.unitary, state);
                break;
            case CompiledStep::Kind::Measure: {
                const double u = rng.uniform();
                double cumulative = 0.0;
                std::size_t chosen = step.kets.size();
                std::size_t last_possible = 0;
                for (std::size_t i = 0; i < step.kets.size(); ++i) {
                    const double p = std::norm(overlap(step.kets[i], state));
                    if (p > 0.0) last_possible = i;
                    cumulative += p;
                    if (u < cumulative) {
                        chosen = i;
                        break;
                    }
                }
                // Rounding can leave the cumulative sum a hair below 1.
                if (chosen == step.kets.size()) chosen = last_possible;
                outcomes[stage++] = chosen;
                state = step.kets[chosen];
                break;
            }
            case CompiledStep::Kind::Filter: {
                const double pass = null_result_probability(state, step.blocked);
                if (!(rng.uniform() < pass)) return {false, false, stage};
                state = step.kept_ket;
                break;
            }
            case CompiledStep::Kind::Postselect: {
                const double accept = std::norm(overlap(step.kets.front(), state));
                return {true, rng.uniform() < accept, stage};
            }
        }
    }
    return {true, false, stage};
}

}  // namespace detail

/// One sampled run of `p` using stream (seed, run_index).
inline TrajectoryRecord run_once(const Protocol &p, std::uint64_t seed, std::uint64_t run_index = 0) {
    const auto cp = detail::compile(p);
    RunStream rng(seed, run_index);
    std::vector<std::size_t> outcomes(cp.measure_stages);
    const auto run = detail::simulate(cp, rng, outcomes);

    TrajectoryRecord rec;
    rec.null_filters_passed = run.null_filters_passed;
    rec.postselected = run.postselected;
    std::size_t stage = 0;
    for (const auto &step : cp.steps) {
        if (step.kind != detail::CompiledStep::Kind::Measure) continue;
        if (stage == run.stages_reached) break;
        rec.outcomes.push_back({step.t, step.label, outcomes[stage]});
        ++stage;
    }
    return rec;
}

/// Histogram of kept runs over Measure outcome tuples.
struct SampleCounts {
    std::size_t stages = 0;
    std::size_t outcomes_per_stage = 0;
    std::size_t total = 0;
    std::size_t kept = 0;
    /// Mixed-radix tuple index -> number of kept runs (size d^stages).
    std::vector<std::size_t> histogram;
};

/// Runs `n` trajectories, fanning out over `threads` workers. The counts are
/// identical for every thread count.
inline SampleCounts sample(const Protocol &p, std::size_t n, std::uint64_t seed, unsigned threads = 1) {
    const auto cp = detail::compile(p);
    std::size_t cells = 1;
    for (std::size_t s = 0; s < cp.measure_stages; ++s) cells *= p.dim();

    const auto worker = [&](std::size_t begin, std::size_t end, SampleCounts &out) {
        out.histogram.assign(cells, 0);
        std::vector<std::size_t> outcomes(cp.measure_stages);
        for (std::size_t r = begin; r < end; ++r) {
            RunStream rng(seed, r);
            const auto run = detail::simulate(cp, rng, outcomes);
            if (!(run.null_filters_passed && run.postselected)) continue;
            std::size_t flat = 0;
            for (auto o : outcomes) flat = flat * p.dim() + o;
            ++out.histogram[flat];
            ++out.kept;
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    std::vector<SampleCounts> parts(threads);
    if (threads == 1) {
        worker(0, n, parts[0]);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(worker, n * w / threads, n * (w + 1) / threads, std::ref(parts[w]));
        }
    }

    SampleCounts total{cp.measure_stages, p.dim(), n, 0, std::vector<std::size_t>(cells, 0)};
    for (const auto &part : parts) {
        total.kept += part.kept;
        for (std::size_t k = 0; k < cells; ++k) total.histogram[k] += part.histogram[k];
    }
    return total;
}

struct Estimate {
    double frequency = 0.0;
    double standard_error = 0.0;
    std::size_t samples_kept = 0;
    std::size_t samples_total = 0;
};

/// Frequency of `outcome` at Measure stage `stage` (0-based, timeline order)
/// among kept runs.
inline Estimate estimate(const Protocol &p, std::size_t stage, std::size_t outcome, std::size_t n, std::uint64_t seed,
                         unsigned threads = 1) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "estimate needs at least one sample");
    const auto counts = sample(p, n, seed, threads);
    if (stage >= counts.stages) throw Error(ErrorKind::IndexOutOfRange, "protocol has no measure stage " + std::to_string(stage));
    if (outcome >= p.dim()) throw Error(ErrorKind::IndexOutOfRange, "outcome " + std::to_string(outcome));
    if (counts.kept == 0) throw Error(ErrorKind::NoSamplesKept, "no run passed postselection");

    std::size_t stride = 1;
    for (std::size_t s = stage + 1; s < counts.stages; ++s) stride *= p.dim();
    std::size_t hits = 0;
    for (std::size_t flat = 0; flat < counts.histogram.size(); ++flat) {
        if ((flat / stride) % p.dim() == outcome) hits += counts.histogram[flat];
    }
    Estimate est;
    est.samples_total = n;
    est.samples_kept = counts.kept;
    est.frequency = static_cast<double>(hits) / static_cast<double>(counts.kept);
    est.standard_error = std::sqrt(est.frequency * (1.0 - est.frequency) / static_cast<double>(counts.kept));
    return est;
}

/// Closed-form expectation for a protocol's Measure stages: the conditional
/// tuple distribution and the probability that a run is kept.
struct ClosedForm {
    std::vector<double> table;
    double kept_rate = 0.0;
};

/// Closed form from the ABL sequence over every Measure and BlockFilter event;
/// each filter conditions its stage on the kept outcome.
inline ClosedForm closed_form(const Protocol &p) {
    std::vector<Observable> cs;
    std::vector<std::optional<std::size_t>> fixed;  // per stage: kept outcome for filters
    std::size_t measure_stages = 0;
    for (const auto &e : p.events()) {
        if (e.kind == EventKind::Measure) {
            cs.push_back(p.observable(e.observable));
            fixed.emplace_back();
            ++measure_stages;
        } else if (e.kind == EventKind::BlockFilter) {
            cs.push_back(p.observable(e.observable));
            fixed.emplace_back(e.keep);
        }
    }
    const std::size_t d = p.dim();
    ClosedForm cf;
    if (cs.empty()) {
        cf.table = {1.0};
        cf.kept_rate = ensemble_rates(p.ensemble()).rw_rate;
        return cf;
    }
    std::size_t cells = 1;
    for (std::size_t s = 0; s < measure_stages; ++s) cells *= d;
    cf.table.assign(cells, 0.0);

    const auto dist = abl_sequence(p.ensemble(), cs);
    const auto table = dist.table();
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        const auto tuple = dist.tuple_at(flat);
        bool survives = true;
        std::size_t cell = 0;
        for (std::size_t s = 0; s < tuple.size(); ++s) {
            if (fixed[s]) {
                survives = survives && tuple[s] == *fixed[s];
            } else {
                cell = cell * d + tuple[s];
            }
        }
        if (!survives) continue;
        const double w = table[flat] * dist.postselection_weight();
        cf.table[cell] += w;
        cf.kept_rate += w;
    }
    if (cf.kept_rate < tol::kEmptyEnsemble) {
        throw Error(ErrorKind::EmptyEnsemble, "no run survives the filters and postselection");
    }
    for (double &v : cf.table) v /= cf.kept_rate;
    return cf;
}

struct ComparisonRow {
    std::vector<std::size_t> outcomes;  // empty for the acceptance-rate row
    double closed_form = 0.0;
    Estimate estimate;
    double z = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    ComparisonRow acceptance;
    double z_limit = 5.0;

    bool pass() const {
        return acceptance.pass && std::all_of(rows.begin(), rows.end(), [](const ComparisonRow &r) { return r.pass; });
    }
    double max_abs_z() const {
        double m = std::abs(acceptance.z);
        for (const auto &r : rows) m = std::max(m, std::abs(r.z));
        return m;
    }
};

namespace detail {
/// z-score of an observed frequency against p under the binomial null
/// hypothesis. Zero-variance cells pass only on exact agreement.
inline double binomial_z(double observed, double p, std::size_t trials) {
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
    if (sigma == 0.0) return observed == p ? 0.0 : std::numeric_limits<double>::infinity();
    return (observed - p) / sigma;
}
}  // namespace detail

/// Scores sampled counts against an expected table and kept rate.
inline ComparisonReport compare(const SampleCounts &counts, const ClosedForm &expected, double z_limit = 5.0) {
    if (expected.table.size() != counts.histogram.size()) {
        throw Error(ErrorKind::DimensionMismatch, "expected table does not match the sampled stages");
    }
    if (counts.kept == 0) throw Error(ErrorKind::NoSamplesKept, "no run passed postselection");
    ComparisonReport report;
    report.z_limit = z_limit;
    const double kept = static_cast<double>(counts.kept);
    for (std::size_t flat = 0; flat < counts.histogram.size(); ++flat) {
        ComparisonRow row;
        std::size_t rest = flat;
        row.outcomes.assign(counts.stages, 0);
        for (std::size_t s = counts.stages; s-- > 0;) {
            row.outcomes[s] = rest % counts.outcomes_per_stage;
            rest /= counts.outcomes_per_stage;
        }
        row.closed_form = expected.table[flat];
        const double f = static_cast<double>(counts.histogram[flat]) / kept;
        row.estimate = {f, std::sqrt(f * (1.0 - f) / kept), counts.kept, counts.total};
        row.z = detail::binomial_z(f, row.closed_form, counts.kept);
        row.pass = std::abs(row.z) <= z_limit;
        report.rows.push_back(std::move(row));
    }
    const double rate = static_cast<double>(counts.kept) / static_cast<double>(counts.total);
    report.acceptance.closed_form = expected.kept_rate;
    report.acceptance.estimate = {rate, std::sqrt(rate * (1.0 - rate) / static_cast<double>(counts.total)), counts.kept,
                                  counts.total};
    report.acceptance.z = detail::binomial_z(rate, expected.kept_rate, counts.total);
    report.acceptance.pass = std::abs(report.acceptance.z) <= z_limit;
    return report;
}

/// Closed form vs. Monte Carlo for every Measure outcome tuple of `p`, plus
/// the postselection acceptance rate.
inline ComparisonReport compare_to_abl(const Protocol &p, std::size_t n = 100000, std::uint64_t seed = 0,
                                       unsigned threads = 1) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "compare_to_abl needs at least one sample");
    const ClosedForm expected = closed_form(p);
    return compare(sample(p, n, seed, threads), expected);
}

}  // namespace tsqt
