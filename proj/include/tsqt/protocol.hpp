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
 * @file protocol.hpp
 * @brief Timelines of physical interactions and the measurement-ready gate.
 *
 * A Protocol is an ordered list of events between a preparation at t_a and a
 * postselection at t_b. Align(C) is the interaction that routes the
 * eigenstates of C onto distinct paths (computational basis rays); Unalign(C)
 * is its inverse and restores whatever alignment was in force before.
 *
 * An observable C is measurement-ready at t when an alignment is engaged at t
 * and the alignment unitary V(t) sends every eigenket of C to a distinct path
 * ray. Only then can each outcome be certified by null results on the other
 * paths. Before any interaction the system has no path structure at all, so
 * nothing is ready, even an observable whose eigenbasis happens to coincide
 * with the computational basis. A Prepare event may name an observable to say
 * that the preparation apparatus itself leaves the system routed by that
 * observable's eigenbasis.
 *
 * Times are ordinal. Readiness holds on open intervals: at the exact instant of
 * an Align/Unalign an outcome counts as ready only if it is ready on both
 * sides of the instant.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsqt/abl.hpp"
#include "tsqt/observables.hpp"
#include "tsqt/qlinalg.hpp"

namespace tsqt {

namespace tol {
/// |amplitude| threshold for "this vector is a path ray up to phase".
inline constexpr double kPathRay = 1e-9;
/// Null-result probability below which a block filter can never pass.
inline constexpr double kNullImpossible = 1e-24;
}  // namespace tol

enum class EventKind { Prepare, Align, Unalign, Measure, BlockFilter, Postselect };

constexpr std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Prepare: return "prepare";
        case EventKind::Align: return "align";
        case EventKind::Unalign: return "unalign";
        case EventKind::Measure: return "measure";
        case EventKind::BlockFilter: return "block_filter";
        case EventKind::Postselect: return "postselect";
    }
    return "?";
}

struct TimelineEvent {
    double t = 0.0;
    EventKind kind = EventKind::Measure;
    std::string state;       // Prepare, Postselect
    std::string observable;  // Align, Unalign, Measure, BlockFilter; optional on Prepare
    std::size_t keep = 0;    // BlockFilter, 0-based

    static TimelineEvent prepare(double t, std::string state, std::string routed_by = {}) {
        return {t, EventKind::Prepare, std::move(state), std::move(routed_by), 0};
    }
    static TimelineEvent align(double t, std::string obs) { return {t, EventKind::Align, {}, std::move(obs), 0}; }
    static TimelineEvent unalign(double t, std::string obs) { return {t, EventKind::Unalign, {}, std::move(obs), 0}; }
    static TimelineEvent measure(double t, std::string obs) { return {t, EventKind::Measure, {}, std::move(obs), 0}; }
    static TimelineEvent block_filter(double t, std::string obs, std::size_t keep) {
        return {t, EventKind::BlockFilter, {}, std::move(obs), keep};
    }
    static TimelineEvent postselect(double t, std::string state) {
        return {t, EventKind::Postselect, std::move(state), {}, 0};
    }

    bool changes_alignment() const noexcept {
        return kind == EventKind::Align || kind == EventKind::Unalign ||
               (kind == EventKind::Prepare && !observable.empty());
    }

    friend bool operator==(const TimelineEvent &, const TimelineEvent &) = default;
};

/// Alignment in force over some stretch of the timeline.
struct AlignmentFrame {
    Operator unitary;
    /// False before the first interaction and after every interaction has
    /// been undone: no path structure exists then.
    bool engaged = false;
};

class Protocol {
  public:
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<TimelineEvent> &events() const noexcept { return events_; }
    const std::map<std::string, Ket> &states() const noexcept { return states_; }
    const std::map<std::string, Observable> &observables() const noexcept { return observables_; }

    double t_a() const noexcept { return events_.front().t; }
    double t_b() const noexcept { return events_.back().t; }
    const Ket &pre() const { return states_.at(events_.front().state); }
    const Ket &post() const { return states_.at(events_.back().state); }
    EnsembleSpec ensemble() const { return EnsembleSpec(pre(), post()); }

    const Observable &observable(const std::string &name) const {
        auto it = observables_.find(name);
        if (it == observables_.end()) throw Error(ErrorKind::UnknownName, "unknown observable '" + name + "'");
        return it->second;
    }
    const Ket &state(const std::string &name) const {
        auto it = states_.find(name);
        if (it == states_.end()) throw Error(ErrorKind::UnknownName, "unknown state '" + name + "'");
        return it->second;
    }

    /// Alignment in force right after event `index`.
    const AlignmentFrame &frame_after(std::size_t index) const { return frames_.at(index + 1); }

    /// Alignment from all events strictly before t.
    const AlignmentFrame &frame_before(double t) const { return frames_[count_events([t](double s) { return s < t; })]; }

    /// Alignment from all events at or before t.
    const AlignmentFrame &frame_through(double t) const { return frames_[count_events([t](double s) { return s <= t; })]; }

  private:
    friend Protocol build_protocol(std::size_t, std::map<std::string, Ket>, std::map<std::string, Observable>,
                                   std::vector<TimelineEvent>);

    template <class Pred>
    std::size_t count_events(Pred pred) const {
        std::size_t n = 0;
        while (n < events_.size() && pred(events_[n].t)) ++n;
        return n;
    }

    std::size_t dim_ = 0;
    std::map<std::string, Ket> states_;
    std::map<std::string, Observable> observables_;
    std::vector<TimelineEvent> events_;
    // frames_[k] = alignment after the first k events; frames_[0] is unengaged.
    std::vector<AlignmentFrame> frames_;
};

/// Path index each eigenket of `c` lands on under `frame`, or nullopt when it
/// does not land on a single path ray.
inline std::vector<std::optional<std::size_t>> path_assignment(const AlignmentFrame &frame, const Observable &c) {
    std::vector<std::optional<std::size_t>> paths(c.dim());
    if (!frame.engaged) return paths;
    detail::require_same_dim(frame.unitary.dim(), c.dim(), "readiness");
    std::vector<bool> taken(c.dim(), false);
    for (std::size_t i = 0; i < c.dim(); ++i) {
        const auto routed = apply_raw(frame.unitary, c.eigenket(i).amplitudes());
        for (std::size_t k = 0; k < routed.size(); ++k) {
            if (std::abs(routed[k]) >= 1.0 - tol::kPathRay && !taken[k]) {
                paths[i] = k;
                taken[k] = true;
                break;
            }
        }
    }
    return paths;
}

/// Builds and validates a protocol.
///
/// The first event must be the only Prepare, the last the only Postselect,
/// timestamps strictly increase, and every Unalign must undo the most recent
/// Align still in force. Block filters must act on an observable that is
/// routed onto a path for the kept outcome at the filter's time.
inline Protocol build_protocol(std::size_t dim, std::map<std::string, Ket> states,
                               std::map<std::string, Observable> observables, std::vector<TimelineEvent> events) {
    if (dim == 0) throw Error(ErrorKind::InvalidArgument, "protocol dimension must be positive");
    for (const auto &[name, ket] : states) {
        if (ket.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "state '" + name + "' has the wrong dimension");
    }
    for (const auto &[name, obs] : observables) {
        if (obs.dim() != dim) {
            throw Error(ErrorKind::DimensionMismatch, "observable '" + name + "' has the wrong dimension");
        }
    }

    const auto count = [&](EventKind k) {
        return std::count_if(events.begin(), events.end(), [k](const TimelineEvent &e) { return e.kind == k; });
    };
    if (count(EventKind::Prepare) == 0) throw Error(ErrorKind::MissingPrepare, "timeline has no prepare event");
    if (count(EventKind::Postselect) == 0) throw Error(ErrorKind::MissingPostselect, "timeline has no postselect event");
    if (count(EventKind::Prepare) > 1 || events.front().kind != EventKind::Prepare) {
        throw Error(ErrorKind::UnorderedTimeline, "the single prepare event must come first");
    }
    if (count(EventKind::Postselect) > 1 || events.back().kind != EventKind::Postselect) {
        throw Error(ErrorKind::UnorderedTimeline, "the single postselect event must come last");
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (!std::isfinite(events[i].t)) throw Error(ErrorKind::UnorderedTimeline, "non-finite timestamp");
        if (i > 0 && !(events[i - 1].t < events[i].t)) {
            throw Error(ErrorKind::UnorderedTimeline,
                        "timestamps must strictly increase (event " + std::to_string(i + 1) + ")");
        }
    }

    Protocol p;
    p.dim_ = dim;
    p.states_ = std::move(states);
    p.observables_ = std::move(observables);
    p.events_ = std::move(events);

    std::vector<std::pair<std::string, Operator>> stack;
    const auto current = [&]() -> AlignmentFrame {
        if (stack.empty()) return {Operator::identity(dim), false};
        return {stack.back().second, true};
    };
    p.frames_.push_back(current());

    for (const auto &e : p.events_) {
        switch (e.kind) {
            case EventKind::Prepare:
            case EventKind::Postselect:
                p.state(e.state);
                if (e.kind == EventKind::Prepare && !e.observable.empty()) {
                    stack.emplace_back(e.observable, alignment_unitary(p.observable(e.observable)));
                }
                break;
            case EventKind::Align:
                stack.emplace_back(e.observable, alignment_unitary(p.observable(e.observable)));
                break;
            case EventKind::Unalign:
                p.observable(e.observable);
                if (stack.empty() || stack.back().first != e.observable) {
                    throw Error(ErrorKind::BadNesting, "unalign '" + e.observable + "' at t=" + std::to_string(e.t) +
                                                           " does not undo the most recent align");
                }
                stack.pop_back();
                break;
            case EventKind::Measure:
                p.observable(e.observable);
                break;
            case EventKind::BlockFilter: {
                const auto &c = p.observable(e.observable);
                if (e.keep >= c.dim()) throw Error(ErrorKind::IndexOutOfRange, "block filter keeps outcome out of range");
                if (!path_assignment(current(), c)[e.keep]) {
                    throw Error(ErrorKind::NotMeasurementReady,
                                "block filter on '" + e.observable + "' at t=" + std::to_string(e.t) +
                                    ": the kept outcome is not routed onto a path");
                }
                break;
            }
        }
        p.frames_.push_back(current());
    }
    return p;
}

/// V(t) for t_a < t < t_b: the alignment unitary of the most recent Align (or
/// routing Prepare) still in force, the identity when none is.
inline Operator alignment_at(const Protocol &p, double t) {
    if (!(p.t_a() < t && t < p.t_b())) {
        throw Error(ErrorKind::OutOfRange, "t=" + std::to_string(t) + " is outside (t_a, t_b)");
    }
    return p.frame_before(t).unitary;
}

struct Readiness {
    enum class Level { Ready, PartiallyReady, NotReady };

    Level level = Level::NotReady;
    /// Ready outcomes (0-based). Full set for Ready, empty for NotReady.
    std::vector<std::size_t> outcomes;

    bool ready() const noexcept { return level == Level::Ready; }
    bool covers(std::size_t outcome) const {
        return std::find(outcomes.begin(), outcomes.end(), outcome) != outcomes.end();
    }
    friend bool operator==(const Readiness &, const Readiness &) = default;
};

constexpr std::string_view to_string(Readiness::Level l) {
    switch (l) {
        case Readiness::Level::Ready: return "ready";
        case Readiness::Level::PartiallyReady: return "partially_ready";
        case Readiness::Level::NotReady: return "not_ready";
    }
    return "?";
}

/// Measurement readiness of `c` at t.
inline Readiness readiness(const Protocol &p, const Observable &c, double t) {
    if (!(p.t_a() < t && t < p.t_b())) {
        throw Error(ErrorKind::OutOfRange, "t=" + std::to_string(t) + " is outside (t_a, t_b)");
    }
    detail::require_same_dim(p.dim(), c.dim(), "readiness");
    const auto before = path_assignment(p.frame_before(t), c);
    const auto through = path_assignment(p.frame_through(t), c);
    Readiness r;
    for (std::size_t i = 0; i < c.dim(); ++i) {
        if (before[i] && through[i]) r.outcomes.push_back(i);
    }
    if (r.outcomes.size() == c.dim()) {
        r.level = Readiness::Level::Ready;
    } else if (!r.outcomes.empty()) {
        r.level = Readiness::Level::PartiallyReady;
    }
    return r;
}

enum class GateMode {
    /// Counterfactual probabilities only while every measured observable is
    /// measurement-ready; undefined otherwise.
    Gated,
    /// Legacy assignment: the ABL value holds over the whole (t_a, t_b).
    Ungated,
};

struct MeasuredStage {
    std::string observable;
    double t = 0.0;
    friend bool operator==(const MeasuredStage &, const MeasuredStage &) = default;
};

struct CounterfactualQuery {
    std::vector<MeasuredStage> measured;
    std::size_t target_stage = 0;
    std::size_t target_outcome = 0;
    GateMode mode = GateMode::Gated;
};

class QueryResult {
  public:
    static QueryResult defined(double p) { return QueryResult(true, p, {}); }
    static QueryResult undefined(std::string reason) { return QueryResult(false, 0.0, std::move(reason)); }

    bool is_defined() const noexcept { return defined_; }
    double probability() const {
        if (!defined_) throw Error(ErrorKind::InvalidQuery, "query result is undefined: " + reason_);
        return probability_;
    }
    const std::string &reason() const noexcept { return reason_; }

  private:
    QueryResult(bool defined, double p, std::string reason)
        : defined_(defined), probability_(p), reason_(std::move(reason)) {}

    bool defined_;
    double probability_;
    std::string reason_;
};

namespace detail {
inline std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}
}  // namespace detail

/// Evaluates a counterfactual query against a protocol. The numeric value is
/// the ABL marginal of the measured sequence in both modes; Gated mode only
/// decides whether it is defined.
inline QueryResult counterfactual_query(const Protocol &p, const CounterfactualQuery &q) {
    if (q.measured.empty()) throw Error(ErrorKind::InvalidQuery, "query measures nothing");
    if (q.target_stage >= q.measured.size()) throw Error(ErrorKind::InvalidQuery, "target stage out of range");
    if (q.target_outcome >= p.dim()) throw Error(ErrorKind::InvalidQuery, "target outcome out of range");
    for (std::size_t k = 0; k < q.measured.size(); ++k) {
        const double t = q.measured[k].t;
        if (!(p.t_a() < t && t < p.t_b())) {
            throw Error(ErrorKind::InvalidQuery, "measurement time " + detail::format_time(t) + " is outside (t_a, t_b)");
        }
        if (k > 0 && !(q.measured[k - 1].t < t)) {
            throw Error(ErrorKind::InvalidQuery, "measurement times must strictly increase");
        }
    }

    std::vector<Observable> cs;
    for (const auto &m : q.measured) cs.push_back(p.observable(m.observable));

    if (q.mode == GateMode::Gated) {
        for (std::size_t k = 0; k < cs.size(); ++k) {
            if (!readiness(p, cs[k], q.measured[k].t).ready()) {
                return QueryResult::undefined(q.measured[k].observable + " not measurement-ready at t=" +
                                              detail::format_time(q.measured[k].t));
            }
        }
    }
    try {
        return QueryResult::defined(marginal(abl_sequence(p.ensemble(), cs), q.target_stage, q.target_outcome));
    } catch (const Error &err) {
        if (err.kind() == ErrorKind::EmptyEnsemble) return QueryResult::undefined("empty ensemble");
        throw;
    }
}

/// Definition-of-reality check bound to a time: the outcome is certain under
/// the ABL sequence and the stage's observable is measurement-ready at t.
inline bool element_of_reality_at(const Protocol &p, std::span<const Observable> cs, std::size_t stage,
                                  std::size_t outcome, double t, double tolerance = 1e-9) {
    if (stage >= cs.size()) throw Error(ErrorKind::IndexOutOfRange, "stage " + std::to_string(stage));
    return readiness(p, cs[stage], t).ready() && element_of_reality(p.ensemble(), cs, stage, outcome, tolerance);
}

/// 1 - sum of |amplitude|^2 over the blocked paths. The kept path's amplitude
/// is never read.
inline double null_result_probability(std::span<const Amplitude> path_amplitudes,
                                      std::span<const std::size_t> blocked_paths) {
    double blocked = 0.0;
    for (auto k : blocked_paths) blocked += std::norm(path_amplitudes[k]);
    return 1.0 - blocked;
}

struct BlockFilterResult {
    double null_probability;
    Ket post_state;
};

/// Blocks every path except the one carrying outcome `keep` and conditions on
/// no detector firing. `state` is given in the unaligned reference frame; the
/// post-state is the kept eigenket mapped back through the alignment.
inline BlockFilterResult block_filter(const Ket &state, const Protocol &p, const Observable &c, std::size_t keep,
                                      double t) {
    detail::require_same_dim(state.dim(), c.dim(), "block_filter");
    if (keep >= c.dim()) throw Error(ErrorKind::IndexOutOfRange, "kept outcome " + std::to_string(keep));
    const Readiness r = readiness(p, c, t);
    if (!r.covers(keep)) {
        throw Error(ErrorKind::NotMeasurementReady,
                    c.label() + " outcome " + std::to_string(keep + 1) + " is not routed at t=" + detail::format_time(t));
    }
    // The kept eigenket occupies one path; its orthogonal complement is
    // exactly the span of the remaining paths, and those are what get blocked.
    const std::size_t kept_path = *path_assignment(p.frame_before(t), c)[keep];
    std::vector<std::size_t> blocked;
    for (std::size_t k = 0; k < c.dim(); ++k) {
        if (k != kept_path) blocked.push_back(k);
    }
    const auto routed = apply_raw(p.frame_before(t).unitary, state.amplitudes());
    const double null_p = null_result_probability(routed, blocked);
    if (null_p < tol::kNullImpossible) {
        throw Error(ErrorKind::NullImpossible, "the state lies entirely on blocked paths");
    }
    return {null_p, c.eigenket(keep)};
}

/// Runs every Align/Unalign interaction on `state` and returns
/// |<final|initial>|^2. Only defined for protocols without Measure or
/// BlockFilter events.
inline double reversibility_check(const Protocol &p, const Ket &state) {
    detail::require_same_dim(p.dim(), state.dim(), "reversibility_check");
    for (const auto &e : p.events()) {
        if (e.kind == EventKind::Measure || e.kind == EventKind::BlockFilter) {
            throw Error(ErrorKind::ContainsIrreversibleEvent,
                        std::string(to_string(e.kind)) + " at t=" + detail::format_time(e.t));
        }
    }
    std::vector<Amplitude> current(state.amplitudes().begin(), state.amplitudes().end());
    for (std::size_t i = 0; i < p.events().size(); ++i) {
        if (!p.events()[i].changes_alignment()) continue;
        const AlignmentFrame &before = (i == 0) ? p.frame_before(p.t_a()) : p.frame_after(i - 1);
        const AlignmentFrame &after = p.frame_after(i);
        current = apply_raw(multiply(after.unitary, adjoint(before.unitary)), current);
    }
    return std::norm(inner(Ket::from_unit(std::move(current), 1e-8), state));
}

}  // namespace tsqt
