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


// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed here and never loosened.

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "test_util.hpp"
#include "tsqt/tsqt.hpp"

using namespace tsqt;
using namespace tsqt::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(const char *format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

template <class Fn>
std::optional<ErrorKind> error_kind(Fn &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    return std::nullopt;
}

double max_err(std::span<const double> got, const std::vector<double> &want) {
    if (got.size() != want.size()) return 1e300;
    double m = 0;
    for (std::size_t k = 0; k < got.size(); ++k) m = std::max(m, std::abs(got[k] - want[k]));
    return m;
}

Protocol bare_three_box() {
    return build_protocol(3, {{"a", three_box_a()}, {"b", three_box_b()}}, {{"X", observable_x()}},
                          {TimelineEvent::prepare(0, "a"), TimelineEvent::postselect(3, "b")});
}

/// Qubit: preselect +z (routed by sigma_z), reroute by sigma_x at t_c2 = 2,
/// postselect +x at t_b = 4.
Protocol qubit_protocol() {
    return build_protocol(2, {{"up_z", Ket::basis(2, 0)}, {"up_x", normalize({1.0, 1.0})}},
                          {{"sz", sigma_z()}, {"sx", sigma_x()}},
                          {TimelineEvent::prepare(0, "up_z", "sz"), TimelineEvent::align(2, "sx"),
                           TimelineEvent::postselect(4, "up_x")});
}

/// Align C@1, Unalign C@2 around an otherwise empty timeline.
Protocol window(const Observable &c, const Ket &pre, const Ket &post) {
    return build_protocol(c.dim(), {{"pre", pre}, {"post", post}}, {{"C", c}},
                          {TimelineEvent::prepare(0, "pre"), TimelineEvent::align(1, "C"), TimelineEvent::unalign(2, "C"),
                           TimelineEvent::postselect(3, "post")});
}

Outcome three_box_x() {
    const auto start = Clock::now();
    const auto dist = abl_single(three_box_ensemble(), observable_x());
    const double elapsed = seconds_since(start);
    const double err = max_err(dist.table(), {0.0, 1.0, 0.0});
    return {err <= 1e-12 && elapsed < 1e-3, fmt("max err %.3g, %.1f us", err, elapsed * 1e6)};
}

Outcome three_box_q() {
    const auto dist = abl_single(three_box_ensemble(), observable_q());
    const auto x = abl_single(three_box_ensemble(), observable_x());
    const double err = max_err(dist.table(), {1.0 / 6, 2.0 / 3, 1.0 / 6});
    const bool contrast = x.table()[0] == 0.0 && x.table()[2] == 0.0 && dist.table()[0] > 0.0;
    return {err <= 1e-12 && contrast, fmt("max err %.3g, Pr[x1]=Pr[x3]=0 and Pr[q1]>0: %s", err, contrast ? "yes" : "no")};
}

Outcome three_box_xqx() {
    const std::vector<Observable> cs = {observable_x(), observable_q(), observable_x()};
    const auto dist = abl_sequence(three_box_ensemble(), cs);
    // Brute force over all 27 tuples with explicit projector products.
    const auto oracle = projector_chain_oracle(three_box_a(), three_box_b(), cs);
    std::vector<double> want(27, 0.0);
    want[0 * 9 + 0 * 3 + 2] = 1.0 / 6;
    want[0 * 9 + 2 * 3 + 2] = 1.0 / 6;
    want[1 * 9 + 1 * 3 + 1] = 2.0 / 3;
    const double err = std::max(max_err(dist.table(), want), max_err(oracle, want));
    const double m3 = marginal(dist, 2, 2);
    const double m2 = marginal(dist, 2, 1);
    const double merr = std::max(std::abs(m3 - 1.0 / 3), std::abs(m2 - 2.0 / 3));
    return {err <= 1e-12 && merr <= 1e-12, fmt("tuple err %.3g, final Pr[x3]=%.12g Pr[x2]=%.12g", err, m3, m2)};
}

Outcome counterfactual_gate() {
    const Protocol p = nested_xq_protocol();
    const auto x = counterfactual_query(p, {{{"X", 1.5}}, 0, 1, GateMode::Gated});
    const auto xq = counterfactual_query(p, {{{"X", 1.5}, {"Q", 2.5}}, 0, 1, GateMode::Gated});
    const auto outside = counterfactual_query(p, {{{"X", 4.5}}, 0, 1, GateMode::Gated});
    const bool eor = element_of_reality(p.ensemble(), std::vector<Observable>{observable_x(), observable_q()}, 0, 1);
    const bool ok = x.is_defined() && std::abs(x.probability() - 1.0) <= 1e-12 && xq.is_defined() &&
                    std::abs(xq.probability() - 2.0 / 3) <= 1e-12 && !eor && !outside.is_defined();
    return {ok, fmt("[X] -> %s, [X,Q] -> %s, eor=%s, t=4.5 -> %s", x.is_defined() ? "defined" : "undefined",
                    xq.is_defined() ? fmt("%.12g", xq.probability()).c_str() : "undefined", eor ? "true" : "false",
                    outside.is_defined() ? "defined" : "undefined")};
}

Outcome ungated_legacy() {
    const Protocol p = bare_three_box();
    const auto ungated = counterfactual_query(p, {{{"X", 1.5}}, 0, 1, GateMode::Ungated});
    const auto gated = counterfactual_query(p, {{{"X", 1.5}}, 0, 1, GateMode::Gated});
    const bool ok = ungated.is_defined() && std::abs(ungated.probability() - 1.0) <= 1e-12 && !gated.is_defined();
    return {ok, fmt("ungated %s, gated %s", ungated.is_defined() ? "Defined(1)" : "undefined",
                    gated.is_defined() ? "defined" : "Undefined")};
}

Outcome readiness_exclusivity() {
    const Protocol p = qubit_protocol();
    const std::vector<Observable> a = {sigma_z()}, b = {sigma_x()};
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> when(0.0, 4.0);
    int both = 0, wrong_eor = 0, checked = 0;
    while (checked < 100) {
        const double t = when(rng);
        if (t <= 0.0 || t == 2.0) continue;
        ++checked;
        if (readiness(p, sigma_z(), t).ready() && readiness(p, sigma_x(), t).ready()) ++both;
        const bool a_real = element_of_reality_at(p, a, 0, 0, t);
        const bool b_real = element_of_reality_at(p, b, 0, 0, t);
        if (a_real != (t < 2.0) || b_real != (t > 2.0)) ++wrong_eor;
    }
    return {both == 0 && wrong_eor == 0, fmt("%d timestamps, both ready: %d, misplaced elements of reality: %d", checked,
                                             both, wrong_eor)};
}

Outcome reversibility() {
    std::mt19937_64 rng(7);
    const Observable c = random_observable("C", 3, rng);
    const Protocol fig1 = window(c, three_box_a(), three_box_b());
    const Protocol fig2 = nested_xq_protocol();
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Ket psi = random_ket(3, rng);
        worst = std::max(worst, std::abs(reversibility_check(fig1, psi) - 1.0));
        worst = std::max(worst, std::abs(reversibility_check(fig2, psi) - 1.0));
    }
    return {worst <= 1e-10, fmt("200 states x 2 protocols, max |F - 1| = %.3g", worst)};
}

Outcome block_filter_contract() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    double worst_p = 0.0, worst_ray = 0.0;
    int phase_mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const std::size_t keep = static_cast<std::size_t>(trial / 4) % d;
        const Observable c = random_observable("C", d, rng);
        const Ket psi = random_ket(d, rng);
        const Protocol p = window(c, psi, random_ket(d, rng));
        const auto r = block_filter(psi, p, c, keep, 1.5);
        worst_p = std::max(worst_p, std::abs(r.null_probability - std::norm(inner(c.eigenket(keep), psi))));
        worst_ray = std::max(worst_ray, 1.0 - fidelity(r.post_state, c.eigenket(keep)));

        // Rotating the phase on the kept path leaves the blocked paths, and
        // with them the null-result probability, untouched bit for bit.
        const Operator v = alignment_at(p, 1.5);
        std::vector<Amplitude> paths = apply_raw(v, psi.amplitudes());
        const std::size_t kept_path = *path_assignment(p.frame_before(1.5), c)[keep];
        std::vector<std::size_t> blocked;
        for (std::size_t k = 0; k < d; ++k)
            if (k != kept_path) blocked.push_back(k);
        const double before = null_result_probability(paths, blocked);
        paths[kept_path] *= std::polar(1.0, angle(rng));
        if (null_result_probability(paths, blocked) != before) ++phase_mismatch;

        // End to end on the unrouted basis, where the rotation touches one
        // amplitude only.
        const Observable z = computational_observable("Z", d);
        const Protocol pz = window(z, psi, random_ket(d, rng));
        std::vector<Amplitude> w(psi.amplitudes().begin(), psi.amplitudes().end());
        w[keep] *= std::polar(1.0, angle(rng));
        if (block_filter(psi, pz, z, keep, 1.5).null_probability !=
            block_filter(Ket::from_unit(w), pz, z, keep, 1.5).null_probability) {
            ++phase_mismatch;
        }
    }
    return {worst_p <= 1e-12 && worst_ray <= 1e-12 && phase_mismatch == 0,
            fmt("200 states, d in 2..5: max |P - |<c|psi>|^2| = %.3g, max ray err %.3g, phase mismatches %d", worst_p,
                worst_ray, phase_mismatch)};
}

Outcome monte_carlo_oracle() {
    const auto start = Clock::now();
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    int failures = 0, runs = 0;
    double worst_z = 0.0;
    for (const auto &[name, description] : list_builtin()) {
        const auto rep = compare_to_abl(load_builtin(name).protocol, 100000, 0, threads);
        ++runs;
        if (!rep.pass()) ++failures;
        worst_z = std::max(worst_z, rep.max_abs_z());
    }
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d = 2 + trial % 2;
        const std::size_t stages = 1 + (trial / 2) % 3;
        const Protocol p = random_window_protocol(d, stages, rng);
        const auto rep = compare_to_abl(p, 100000, 1000 + trial, threads);
        ++runs;
        if (!rep.pass()) ++failures;
        worst_z = std::max(worst_z, rep.max_abs_z());
    }
    const double elapsed = seconds_since(start);
    return {failures == 0 && elapsed < 30.0,
            fmt("%d protocols at n=100000, %d failed, max |z| = %.3f, %.2f s", runs, failures, worst_z, elapsed)};
}

Outcome ensemble_rates_gap() {
    const auto box = ensemble_rates(three_box_ensemble(), observable_q());
    const auto qubit = ensemble_rates(EnsembleSpec(Ket::basis(2, 0), Ket::basis(2, 1)), sigma_x());
    const bool ok = std::abs(box.rw_rate - 0.25) <= 1e-12 && std::abs(box.cfw_rate - 0.375) <= 1e-12 &&
                    std::abs(qubit.rw_rate) <= 1e-12 && std::abs(qubit.cfw_rate - 0.5) <= 1e-12;
    return {ok, fmt("3-box (%.12g, %.12g), orthogonal qubit (%.12g, %.12g)", box.rw_rate, box.cfw_rate, qubit.rw_rate,
                    qubit.cfw_rate)};
}

Outcome error_paths() {
    const auto empty = error_kind([] { abl_single(EnsembleSpec(Ket::basis(2, 0), Ket::basis(2, 1)), sigma_z()); });
    const auto degenerate = error_kind([] {
        make_observable("D", {1.0, 1.0}, {Ket::basis(2, 0), Ket::basis(2, 1)});
    });
    const auto nesting = error_kind([] {
        build_protocol(3, {{"a", three_box_a()}, {"b", three_box_b()}}, {{"Q", observable_q()}},
                       {TimelineEvent::prepare(0, "a"), TimelineEvent::unalign(1, "Q"), TimelineEvent::postselect(2, "b")});
    });
    const auto name = [](const std::optional<ErrorKind> &k) { return k ? std::string(to_string(*k)) : std::string("none"); };
    const bool ok = empty == ErrorKind::EmptyEnsemble && degenerate == ErrorKind::DegenerateSpectrum &&
                    nesting == ErrorKind::BadNesting;
    return {ok, name(empty) + ", " + name(degenerate) + ", " + name(nesting)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"3-box X: ABL [0, 1, 0] within 1e-12, under 1 ms", three_box_x},
        {"3-box Q: ABL [1/6, 2/3, 1/6] within 1e-12", three_box_q},
        {"3-box X,Q,X: tuples 1/6, 1/6, 2/3 and final marginals", three_box_xqx},
        {"counterfactual gate on the nested X/Q protocol", counterfactual_gate},
        {"ungated Defined(1) vs gated Undefined without alignment", ungated_legacy},
        {"qubit readiness exclusivity over 100 timestamps", readiness_exclusivity},
        {"reversibility of the alignment windows", reversibility},
        {"block-filter contract", block_filter_contract},
        {"Monte Carlo agrees with ABL within 5 sigma", monte_carlo_oracle},
        {"RW vs CFW ensemble rates", ensemble_rates_gap},
        {"error kinds", error_paths},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
