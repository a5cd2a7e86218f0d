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
 * @file report.hpp
 * @brief Runs every query of a scenario and renders the results.
 *
 * The report is built once as a JSON document; the table rendering reads the
 * same document, so both formats always carry the same numbers. Probabilities
 * are rounded to 12 significant digits before they enter the document.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "tsqt/abl.hpp"
#include "tsqt/protocol.hpp"
#include "tsqt/scenario.hpp"
#include "tsqt/trajectory.hpp"

namespace tsqt {

struct ReportOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    GateMode mode = GateMode::Gated;
    unsigned threads = 1;
};

struct Report {
    Json document;
    std::size_t expectations = 0;
    std::size_t failures = 0;

    bool pass() const noexcept { return failures == 0; }
};

namespace detail {

/// Rounds to 12 significant digits.
inline double sig12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline Json number_json(double v) {
    if (std::isfinite(v)) return sig12(v);
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

inline Json one_based(const std::vector<std::size_t> &idx) {
    Json out = Json::array();
    for (auto i : idx) out.push_back(i + 1);
    return out;
}

inline bool near(const Json &expected, double actual, double tol) {
    return expected.is_number() && std::abs(expected.get<double>() - actual) <= tol;
}

inline std::vector<Observable> observables_of(const Scenario &s, const Json &names) {
    std::vector<Observable> out;
    for (const auto &n : names) out.push_back(s.protocol.observable(n.get<std::string>()));
    return out;
}

inline GateMode query_mode(const Json &q, GateMode fallback) {
    if (!q.contains("mode")) return fallback;
    return q["mode"] == "ungated" ? GateMode::Ungated : GateMode::Gated;
}

/// Evaluates one query. Fills entry["result"] and returns the verdict on the
/// declared expectation (true when there is none).
inline bool run_query(const Scenario &s, const Json &q, const ReportOptions &opt, double tol, Json &entry) {
    const std::string type = q["type"].get<std::string>();
    const bool has_expect = q.contains("expect");
    const Json expect = has_expect ? q["expect"] : Json();
    Json result;
    bool ok = true;

    if (type == "abl") {
        const auto dist = abl_single(s.protocol.ensemble(), s.protocol.observable(q["observable"].get<std::string>()));
        result["distribution"] = Json::array();
        for (double p : dist.table()) result["distribution"].push_back(number_json(p));
        if (has_expect) {
            ok = expect.is_array() && expect.size() == dist.size();
            for (std::size_t k = 0; ok && k < dist.size(); ++k) ok = near(expect[k], dist.table()[k], tol);
        }
    } else if (type == "sequence") {
        const auto cs = observables_of(s, q["observables"]);
        const auto dist = abl_sequence(s.protocol.ensemble(), cs);
        result["table"] = Json::array();
        for (std::size_t flat = 0; flat < dist.size(); ++flat) {
            result["table"].push_back({{"outcomes", one_based(dist.tuple_at(flat))},
                                       {"probability", number_json(dist.table()[flat])}});
        }
        if (q.contains("stage")) {
            const double m = marginal(dist, q["stage"].get<std::size_t>() - 1, q["outcome"].get<std::size_t>() - 1);
            result["marginal"] = number_json(m);
            if (has_expect) ok = near(expect, m, tol);
        } else if (has_expect) {
            ok = expect.is_array();
            for (std::size_t k = 0; ok && k < expect.size(); ++k) {
                const Json &row = expect[k];
                ok = row.is_object() && row.contains("outcomes") && row["outcomes"].is_array() &&
                     row["outcomes"].size() == dist.stages();
                if (!ok) break;
                std::vector<std::size_t> tuple;
                for (const auto &i : row["outcomes"]) {
                    if (!i.is_number_integer() || i.get<long long>() < 1 ||
                        i.get<std::size_t>() > dist.outcomes_per_stage()) {
                        ok = false;
                        break;
                    }
                    tuple.push_back(i.get<std::size_t>() - 1);
                }
                ok = ok && row.contains("probability") && near(row["probability"], dist.probability(tuple), tol);
            }
        }
    } else if (type == "counterfactual") {
        CounterfactualQuery cq;
        for (const auto &m : q["measured"]) cq.measured.push_back({m["observable"].get<std::string>(), m["t"].get<double>()});
        cq.target_stage = q["stage"].get<std::size_t>() - 1;
        cq.target_outcome = q["outcome"].get<std::size_t>() - 1;
        cq.mode = query_mode(q, opt.mode);
        const QueryResult r = counterfactual_query(s.protocol, cq);
        result["mode"] = cq.mode == GateMode::Gated ? "gated" : "ungated";
        result["defined"] = r.is_defined();
        if (r.is_defined()) {
            result["probability"] = number_json(r.probability());
        } else {
            result["reason"] = r.reason();
        }
        if (has_expect) ok = r.is_defined() ? near(expect, r.probability(), tol) : expect == "undefined";
    } else if (type == "element_of_reality") {
        const auto cs = observables_of(s, q["observables"]);
        const std::size_t stage = q["stage"].get<std::size_t>() - 1;
        const std::size_t outcome = q["outcome"].get<std::size_t>() - 1;
        const double p = marginal(abl_sequence(s.protocol.ensemble(), cs), stage, outcome);
        bool value = p >= 1.0 - tol;
        result["probability"] = number_json(p);
        if (q.contains("t")) {
            const bool gated = query_mode(q, opt.mode) == GateMode::Gated;
            const bool ready = readiness(s.protocol, cs[stage], q["t"].get<double>()).ready();
            result["mode"] = gated ? "gated" : "ungated";
            result["ready"] = ready;
            if (gated) value = value && ready;
        }
        result["value"] = value;
        if (has_expect) ok = expect.is_boolean() && expect.get<bool>() == value;
    } else if (type == "ensemble_rates") {
        std::optional<Observable> c;
        if (q.contains("observable")) c = s.protocol.observable(q["observable"].get<std::string>());
        const auto rates = ensemble_rates(s.protocol.ensemble(), c);
        result["rw_rate"] = number_json(rates.rw_rate);
        result["cfw_rate"] = number_json(rates.cfw_rate);
        if (has_expect) {
            ok = expect.is_object();
            if (ok && expect.contains("rw_rate")) ok = near(expect["rw_rate"], rates.rw_rate, tol);
            if (ok && expect.contains("cfw_rate")) ok = near(expect["cfw_rate"], rates.cfw_rate, tol);
        }
    } else if (type == "readiness") {
        const auto r = readiness(s.protocol, s.protocol.observable(q["observable"].get<std::string>()), q["t"].get<double>());
        result["level"] = std::string(to_string(r.level));
        result["outcomes"] = one_based(r.outcomes);
        if (has_expect) {
            if (expect.is_string()) {
                ok = expect == to_string(r.level);
            } else {
                ok = expect.is_object() && expect.value("level", "") == to_string(r.level) &&
                     (!expect.contains("outcomes") || expect["outcomes"] == result["outcomes"]);
            }
        }
    } else if (type == "montecarlo") {
        const auto rep = compare_to_abl(s.protocol, opt.samples, opt.seed, opt.threads);
        result["samples"] = rep.acceptance.estimate.samples_total;
        result["kept"] = rep.acceptance.estimate.samples_kept;
        result["z_limit"] = number_json(rep.z_limit);
        result["acceptance"] = {{"closed_form", number_json(rep.acceptance.closed_form)},
                                {"frequency", number_json(rep.acceptance.estimate.frequency)},
                                {"standard_error", number_json(rep.acceptance.estimate.standard_error)},
                                {"z", number_json(rep.acceptance.z)},
                                {"pass", rep.acceptance.pass}};
        result["rows"] = Json::array();
        for (const auto &row : rep.rows) {
            result["rows"].push_back({{"outcomes", one_based(row.outcomes)},
                                      {"closed_form", number_json(row.closed_form)},
                                      {"frequency", number_json(row.estimate.frequency)},
                                      {"standard_error", number_json(row.estimate.standard_error)},
                                      {"z", number_json(row.z)},
                                      {"pass", row.pass}});
        }
        result["max_abs_z"] = number_json(rep.max_abs_z());
        result["pass"] = rep.pass();
        if (has_expect) ok = (expect == "pass") == rep.pass();
    }
    entry["result"] = std::move(result);
    return ok;
}

}  // namespace detail

/// Executes every query of `s`. A query that throws is recorded with its
/// error and does not stop the others.
inline Report run_report(const Scenario &s, const ReportOptions &opt = {}) {
    Report report;
    Json &doc = report.document;
    doc["scenario"] = s.name;
    doc["mode"] = opt.mode == GateMode::Gated ? "gated" : "ungated";
    doc["samples"] = opt.samples;
    doc["seed"] = opt.seed;
    doc["tolerance"] = opt.tolerance;
    doc["queries"] = Json::array();

    for (std::size_t k = 0; k < s.queries.size(); ++k) {
        const Json &q = s.queries[k];
        Json entry;
        entry["index"] = k + 1;
        entry["query"] = q;
        const double tol = q.value("tol", opt.tolerance);
        const bool has_expect = q.contains("expect");
        bool ok = true;
        try {
            ok = detail::run_query(s, q, opt, tol, entry);
            if (has_expect && q["expect"].is_object() && q["expect"].contains("error")) ok = false;
        } catch (const Error &e) {
            entry["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
            ok = has_expect && q["expect"].is_object() && q["expect"].value("error", "") == to_string(e.kind());
        }
        if (has_expect) {
            ++report.expectations;
            if (!ok) ++report.failures;
            entry["verdict"] = ok ? "pass" : "fail";
        } else {
            entry["verdict"] = "none";
        }
        doc["queries"].push_back(std::move(entry));
    }
    doc["summary"] = {{"expectations", report.expectations},
                      {"failures", report.failures},
                      {"pass", report.pass()}};
    return report;
}

inline std::string render_json(const Report &r) { return r.document.dump(2) + "\n"; }

namespace detail {

inline std::string fmt_number(const Json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v.get<double>());
    return buf;
}

inline std::string fmt_tuple(const Json &t) {
    std::string out = "(";
    for (std::size_t k = 0; k < t.size(); ++k) out += (k ? "," : "") + std::to_string(t[k].get<long long>());
    return out + ")";
}

inline std::string describe(const Json &q) {
    const std::string type = q["type"].get<std::string>();
    std::string out = type;
    const auto names = [](const Json &list) {
        std::string s = "[";
        for (std::size_t k = 0; k < list.size(); ++k) s += (k ? "," : "") + list[k].get<std::string>();
        return s + "]";
    };
    if (q.contains("observable")) out += " " + q["observable"].get<std::string>();
    if (q.contains("observables")) out += " " + names(q["observables"]);
    if (q.contains("measured")) {
        out += " [";
        for (std::size_t k = 0; k < q["measured"].size(); ++k) {
            const Json &m = q["measured"][k];
            out += (k ? "," : "") + m["observable"].get<std::string>() + "@" + fmt_number(m["t"]);
        }
        out += "]";
    }
    if (q.contains("stage")) out += " stage " + fmt_number(q["stage"]) + " outcome " + fmt_number(q["outcome"]);
    if (q.contains("t")) out += " t=" + fmt_number(q["t"]);
    if (q.contains("mode")) out += " (" + q["mode"].get<std::string>() + ")";
    return out;
}

}  // namespace detail

/// Human-readable rendering of the same document render_json prints.
inline std::string render_table(const Report &r) {
    using detail::fmt_number;
    const Json &doc = r.document;
    std::ostringstream out;
    out << "scenario " << doc["scenario"].get<std::string>() << "  (mode " << doc["mode"].get<std::string>()
        << ", samples " << doc["samples"].get<std::size_t>() << ", seed " << doc["seed"].get<std::uint64_t>()
        << ", tol " << fmt_number(doc["tolerance"]) << ")\n";

    for (const auto &entry : doc["queries"]) {
        out << "\n[" << entry["index"].get<std::size_t>() << "] " << detail::describe(entry["query"]) << "\n";
        if (entry.contains("error")) {
            out << "    error: " << entry["error"]["message"].get<std::string>() << "\n";
        } else {
            const Json &res = entry["result"];
            if (res.contains("distribution")) {
                out << "    outcome  probability\n";
                for (std::size_t k = 0; k < res["distribution"].size(); ++k) {
                    out << "    " << (k + 1) << "        " << fmt_number(res["distribution"][k]) << "\n";
                }
            }
            if (res.contains("table")) {
                out << "    outcomes  probability\n";
                for (const auto &row : res["table"]) {
                    if (row["probability"].get<double>() == 0.0) continue;
                    out << "    " << detail::fmt_tuple(row["outcomes"]) << "  " << fmt_number(row["probability"]) << "\n";
                }
                out << "    (zero-probability tuples omitted)\n";
            }
            if (res.contains("marginal")) out << "    marginal: " << fmt_number(res["marginal"]) << "\n";
            if (res.contains("defined")) {
                out << "    " << res["mode"].get<std::string>() << ": ";
                if (res["defined"].get<bool>()) {
                    out << "defined, probability " << fmt_number(res["probability"]) << "\n";
                } else {
                    out << "undefined (" << res["reason"].get<std::string>() << ")\n";
                }
            }
            if (res.contains("value")) {
                out << "    probability " << fmt_number(res["probability"]);
                if (res.contains("ready")) out << ", measurement-ready " << (res["ready"].get<bool>() ? "yes" : "no");
                out << " -> element of reality: " << (res["value"].get<bool>() ? "yes" : "no") << "\n";
            }
            if (res.contains("rw_rate")) {
                out << "    rw_rate " << fmt_number(res["rw_rate"]) << ", cfw_rate " << fmt_number(res["cfw_rate"]) << "\n";
            }
            if (res.contains("level")) {
                out << "    " << res["level"].get<std::string>();
                if (!res["outcomes"].empty()) out << " " << detail::fmt_tuple(res["outcomes"]);
                out << "\n";
            }
            if (res.contains("rows")) {
                out << "    kept " << res["kept"].get<std::size_t>() << " of " << res["samples"].get<std::size_t>()
                    << "; acceptance closed " << fmt_number(res["acceptance"]["closed_form"]) << " observed "
                    << fmt_number(res["acceptance"]["frequency"]) << " z " << fmt_number(res["acceptance"]["z"]) << "\n";
                out << "    outcomes  closed_form  frequency  z\n";
                for (const auto &row : res["rows"]) {
                    if (row["closed_form"].get<double>() == 0.0 && row["frequency"].get<double>() == 0.0) continue;
                    out << "    " << detail::fmt_tuple(row["outcomes"]) << "  " << fmt_number(row["closed_form"]) << "  "
                        << fmt_number(row["frequency"]) << "  " << fmt_number(row["z"]) << "\n";
                }
                out << "    max |z| " << fmt_number(res["max_abs_z"]) << " (limit " << fmt_number(res["z_limit"])
                    << "): " << (res["pass"].get<bool>() ? "pass" : "FAIL") << "\n";
            }
        }
        const std::string verdict = entry["verdict"].get<std::string>();
        if (verdict != "none") {
            out << "    expect " << entry["query"]["expect"].dump() << " -> " << (verdict == "pass" ? "PASS" : "FAIL")
                << "\n";
        }
    }
    out << "\n" << r.failures << " of " << r.expectations << " expectations failed\n";
    return out.str();
}

}  // namespace tsqt
