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
 * @file abl.hpp
 * @brief Closed-form pre- and post-selected (ABL) outcome probabilities.
 *
 * For preselection |a>, postselection |b> and a single intermediate
 * measurement of C,
 *
 *     Pr[c_i] = |<a|c_i><c_i|b>|^2 / sum_j |<a|c_j><c_j|b>|^2 .
 *
 * For an ordered sequence C^1 .. C^N of first-kind measurements with no free
 * evolution in between, the weight of the outcome tuple (i1, .., iN) is
 *
 *     |<b|c^N_iN><c^N_iN|c^{N-1}_i(N-1)> ... <c^1_i1|a>|^2
 *
 * normalized over all d^N tuples. The single-stage case reduces exactly to the
 * first formula. The multi-stage product form is the standard
 * generalization; check it against the original ABL treatment if you need more
 * than the qualitative claims reproduced in the test-suite.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsqt/observables.hpp"
#include "tsqt/qlinalg.hpp"

namespace tsqt {

namespace tol {
/// Squared-modulus denominator below which the selected ensemble is empty.
inline constexpr double kEmptyEnsemble = 1e-24;
}  // namespace tol

/// Maximum number of intermediate measurement stages in a sequence.
inline constexpr std::size_t kMaxStages = 6;

/// Preselected |a> at t_a, postselected |b> at t_b.
struct EnsembleSpec {
    Ket pre;
    Ket post;

    EnsembleSpec(Ket pre_state, Ket post_state) : pre(std::move(pre_state)), post(std::move(post_state)) {
        detail::require_same_dim(pre.dim(), post.dim(), "EnsembleSpec");
    }
};

/// Joint distribution over outcome tuples, one index per measurement stage.
///
/// Stored densely: entry for tuple (i1, .., iN) lives at the mixed-radix index
/// i1 * d^(N-1) + ... + iN.
class OutcomeDistribution {
  public:
    OutcomeDistribution(std::vector<std::string> labels, std::size_t outcomes, std::vector<double> table,
                        double postselection_weight)
        : labels_(std::move(labels)), outcomes_(outcomes), table_(std::move(table)),
          postselection_weight_(postselection_weight) {}

    std::size_t stages() const noexcept { return labels_.size(); }
    std::size_t outcomes_per_stage() const noexcept { return outcomes_; }
    const std::vector<std::string> &observable_labels() const noexcept { return labels_; }
    std::span<const double> table() const noexcept { return table_; }
    std::size_t size() const noexcept { return table_.size(); }

    /// The normalization sum: the probability that a run with these
    /// intermediate measurements passes postselection.
    double postselection_weight() const noexcept { return postselection_weight_; }

    std::vector<std::size_t> tuple_at(std::size_t flat) const {
        std::vector<std::size_t> t(stages());
        for (std::size_t s = stages(); s-- > 0;) {
            t[s] = flat % outcomes_;
            flat /= outcomes_;
        }
        return t;
    }

    std::size_t flat_index(std::span<const std::size_t> tuple) const {
        if (tuple.size() != stages()) throw Error(ErrorKind::IndexOutOfRange, "outcome tuple has wrong length");
        std::size_t flat = 0;
        for (auto i : tuple) {
            if (i >= outcomes_) throw Error(ErrorKind::IndexOutOfRange, "outcome index " + std::to_string(i));
            flat = flat * outcomes_ + i;
        }
        return flat;
    }

    double probability(std::span<const std::size_t> tuple) const { return table_[flat_index(tuple)]; }
    double probability(std::initializer_list<std::size_t> tuple) const {
        return probability(std::span<const std::size_t>(tuple.begin(), tuple.size()));
    }

  private:
    std::vector<std::string> labels_;
    std::size_t outcomes_;
    std::vector<double> table_;
    double postselection_weight_;
};

namespace detail {

inline void require_ensemble_dim(const EnsembleSpec &e, const Observable &c) {
    require_same_dim(e.pre.dim(), c.dim(), "ABL");
}

inline OutcomeDistribution normalized(std::vector<std::string> labels, std::size_t outcomes,
                                      std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total < tol::kEmptyEnsemble) {
        throw Error(ErrorKind::EmptyEnsemble, "no run survives pre- and postselection with this measurement");
    }
    for (double &w : weights) w /= total;
    return OutcomeDistribution(std::move(labels), outcomes, std::move(weights), total);
}

}  // namespace detail

/// Single intermediate measurement: Pr[c_i | a, C, b].
inline OutcomeDistribution abl_single(const EnsembleSpec &e, const Observable &c) {
    detail::require_ensemble_dim(e, c);
    std::vector<double> weights(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) {
        weights[i] = std::norm(inner(e.pre, c.eigenket(i)) * inner(c.eigenket(i), e.post));
    }
    return detail::normalized({c.label()}, c.dim(), std::move(weights));
}

/// Ordered sequence of first-kind intermediate measurements.
inline OutcomeDistribution abl_sequence(const EnsembleSpec &e, std::span<const Observable> cs) {
    if (cs.empty()) throw Error(ErrorKind::InvalidArgument, "abl_sequence needs at least one observable");
    if (cs.size() > kMaxStages) {
        throw Error(ErrorKind::InvalidArgument, "at most " + std::to_string(kMaxStages) + " measurement stages");
    }
    for (const auto &c : cs) detail::require_ensemble_dim(e, c);

    const std::size_t d = e.pre.dim();
    const std::size_t n = cs.size();

    // entry[i] = <c^1_i|a>, exit[i] = <b|c^N_i>, hop[s](j, i) = <c^{s+1}_j|c^s_i>
    std::vector<Amplitude> entry(d), exit(d);
    for (std::size_t i = 0; i < d; ++i) {
        entry[i] = inner(cs.front().eigenket(i), e.pre);
        exit[i] = inner(e.post, cs.back().eigenket(i));
    }
    std::vector<std::vector<Amplitude>> hop(n - 1, std::vector<Amplitude>(d * d));
    for (std::size_t s = 0; s + 1 < n; ++s)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t i = 0; i < d; ++i) hop[s][j * d + i] = inner(cs[s + 1].eigenket(j), cs[s].eigenket(i));

    std::size_t total = 1;
    for (std::size_t s = 0; s < n; ++s) total *= d;
    std::vector<double> weights(total);

    // Depth-first over tuples, carrying the partial amplitude product.
    std::vector<Amplitude> partial(n);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t s = n; s-- > 0;) {
            idx[s] = rest % d;
            rest /= d;
        }
        // Recompute only the suffix that changed since the previous tuple.
        std::size_t first_changed = 0;
        if (flat != 0) {
            first_changed = n - 1;
            while (first_changed > 0 && idx[first_changed] == 0) --first_changed;
        }
        for (std::size_t s = first_changed; s < n; ++s) {
            partial[s] = (s == 0) ? entry[idx[0]] : hop[s - 1][idx[s] * d + idx[s - 1]] * partial[s - 1];
        }
        weights[flat] = std::norm(partial[n - 1] * exit[idx[n - 1]]);
    }

    std::vector<std::string> labels;
    for (const auto &c : cs) labels.push_back(c.label());
    return detail::normalized(std::move(labels), d, std::move(weights));
}

inline OutcomeDistribution abl_sequence(const EnsembleSpec &e, std::initializer_list<Observable> cs) {
    return abl_sequence(e, std::span<const Observable>(cs.begin(), cs.size()));
}

/// Probability that stage `stage` shows `outcome` (both 0-based).
inline double marginal(const OutcomeDistribution &d, std::size_t stage, std::size_t outcome) {
    if (stage >= d.stages()) throw Error(ErrorKind::IndexOutOfRange, "stage " + std::to_string(stage));
    if (outcome >= d.outcomes_per_stage()) throw Error(ErrorKind::IndexOutOfRange, "outcome " + std::to_string(outcome));
    double p = 0.0;
    std::size_t stride = 1;
    for (std::size_t s = stage + 1; s < d.stages(); ++s) stride *= d.outcomes_per_stage();
    const auto table = d.table();
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        if ((flat / stride) % d.outcomes_per_stage() == outcome) p += table[flat];
    }
    return p;
}

/// Probability-unity clause of an element of reality: the marginal of the
/// given stage/outcome is 1 within `tolerance`. Measurement readiness is a
/// protocol property and is checked there.
inline bool element_of_reality(const EnsembleSpec &e, std::span<const Observable> cs, std::size_t stage,
                               std::size_t outcome, double tolerance = 1e-9) {
    return marginal(abl_sequence(e, cs), stage, outcome) >= 1.0 - tolerance;
}

struct EnsembleRates {
    /// Fraction of preselected runs that pass postselection with no
    /// intermediate measurement: |<b|a>|^2.
    double rw_rate;
    /// Same fraction when C is measured in between: the ABL denominator.
    double cfw_rate;
};

inline EnsembleRates ensemble_rates(const EnsembleSpec &e, const std::optional<Observable> &c = std::nullopt) {
    const double rw = std::norm(inner(e.post, e.pre));
    if (!c) return {rw, rw};
    detail::require_ensemble_dim(e, *c);
    double cfw = 0.0;
    for (std::size_t j = 0; j < c->dim(); ++j) {
        cfw += std::norm(inner(e.pre, c->eigenket(j)) * inner(c->eigenket(j), e.post));
    }
    return {rw, cfw};
}

}  // namespace tsqt
