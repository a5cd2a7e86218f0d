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
 * @file scenario.hpp
 * @brief Scenario files: JSON in, validated Protocol plus queries out.
 *
 * Format (UTF-8 JSON; indices are 1-based, matching x1..x3 style labels):
 *
 *     {
 *       "name": "three_box_x",
 *       "dimension": 3,
 *       "states": {"a": [[re, im], ...], ...},
 *       "observables": {"X": {"eigenvalues": [...], "eigenvectors": [[[re, im], ...], ...]}},
 *       "timeline": [{"t": 0, "event": "prepare", "state": "a"}, ...],
 *       "queries": [{"type": "abl", "observable": "X", "expect": [0, 1, 0]}, ...]
 *     }
 *
 * States and eigenvectors are normalized on load, so [[1,0],[1,0],[0,0]] is
 * a valid way to write (|x1> + |x2>)/sqrt(2).
 */

#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tsqt/observables.hpp"
#include "tsqt/protocol.hpp"
#include "tsqt/qlinalg.hpp"

namespace tsqt {

using Json = nlohmann::ordered_json;

inline constexpr std::array<std::string_view, 7> kQueryTypes = {
    "abl", "sequence", "counterfactual", "element_of_reality", "ensemble_rates", "readiness", "montecarlo"};

struct Scenario {
    std::string name;
    std::size_t dim = 0;
    std::vector<std::pair<std::string, Ket>> states;
    std::vector<std::pair<std::string, Observable>> observables;
    std::vector<TimelineEvent> timeline;
    /// Queries exactly as written in the file (1-based indices), validated.
    std::vector<Json> queries;
    Protocol protocol;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string &path, const std::string &what) {
    throw Error(ErrorKind::ParseError, path + ": " + what);
}

inline const Json &field(const Json &obj, const char *key, const std::string &path) {
    if (!obj.is_object()) parse_fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) parse_fail(path, std::string("missing field '") + key + "'");
    return *it;
}

inline std::string string_field(const Json &obj, const char *key, const std::string &path) {
    const Json &v = field(obj, key, path);
    if (!v.is_string()) parse_fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline double number_value(const Json &v, const std::string &path) {
    if (!v.is_number()) parse_fail(path, "expected a number");
    return v.get<double>();
}

/// 1-based index in the file -> 0-based.
inline std::size_t index_value(const Json &v, const std::string &path) {
    if (!v.is_number_integer() || v.get<long long>() < 1) parse_fail(path, "expected a positive integer index");
    return static_cast<std::size_t>(v.get<long long>() - 1);
}

inline Amplitude amplitude_value(const Json &v, const std::string &path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        parse_fail(path, "expected an amplitude [re, im]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

inline Ket ket_value(const Json &v, std::size_t dim, const std::string &path) {
    if (!v.is_array()) parse_fail(path, "expected a list of amplitudes");
    if (v.size() != dim) {
        parse_fail(path, "expected " + std::to_string(dim) + " amplitudes, got " + std::to_string(v.size()));
    }
    std::vector<Amplitude> raw;
    for (std::size_t k = 0; k < v.size(); ++k) raw.push_back(amplitude_value(v[k], path + "[" + std::to_string(k) + "]"));
    try {
        return normalize(raw);
    } catch (const Error &e) {
        throw Error(e.kind(), path + ": " + e.what());
    }
}

inline Json ket_json(const Ket &k) {
    Json out = Json::array();
    for (const auto &z : k.amplitudes()) out.push_back(Json::array({z.real(), z.imag()}));
    return out;
}

inline EventKind event_kind(const std::string &s, const std::string &path) {
    for (auto k : {EventKind::Prepare, EventKind::Align, EventKind::Unalign, EventKind::Measure, EventKind::BlockFilter,
                   EventKind::Postselect}) {
        if (s == to_string(k)) return k;
    }
    parse_fail(path, "unknown event '" + s + "'");
}

template <class Pairs>
bool has_name(const Pairs &pairs, const std::string &name) {
    return std::any_of(pairs.begin(), pairs.end(), [&](const auto &p) { return p.first == name; });
}

inline void require_observable(const Scenario &s, const Json &q, const char *key, const std::string &path) {
    const std::string name = string_field(q, key, path);
    if (!has_name(s.observables, name)) parse_fail(path + "." + key, "unknown observable '" + name + "'");
}

inline void require_observable_list(const Scenario &s, const Json &q, const char *key, const std::string &path) {
    const Json &list = field(q, key, path);
    if (!list.is_array() || list.empty()) parse_fail(path + "." + key, "expected a nonempty list of observables");
    for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string p = path + "." + key + "[" + std::to_string(k) + "]";
        if (!list[k].is_string()) parse_fail(p, "expected an observable name");
        if (!has_name(s.observables, list[k].get<std::string>())) parse_fail(p, "unknown observable");
    }
}

inline void validate_query(const Scenario &s, const Json &q, const std::string &path) {
    const std::string type = string_field(q, "type", path);
    if (std::find(kQueryTypes.begin(), kQueryTypes.end(), type) == kQueryTypes.end()) {
        parse_fail(path + ".type", "unknown query type '" + type + "'");
    }
    if (q.contains("tol") && !(q["tol"].is_number() && q["tol"].get<double>() > 0)) {
        parse_fail(path + ".tol", "expected a positive number");
    }
    if (q.contains("mode")) {
        const Json &m = q["mode"];
        if (!m.is_string() || (m != "gated" && m != "ungated")) parse_fail(path + ".mode", "expected gated|ungated");
    }
    const auto check_stage_outcome = [&](std::size_t stages) {
        const std::size_t stage = index_value(field(q, "stage", path), path + ".stage");
        const std::size_t outcome = index_value(field(q, "outcome", path), path + ".outcome");
        if (stage >= stages) parse_fail(path + ".stage", "stage out of range");
        if (outcome >= s.dim) parse_fail(path + ".outcome", "outcome out of range");
    };
    if (type == "abl") {
        require_observable(s, q, "observable", path);
    } else if (type == "sequence") {
        require_observable_list(s, q, "observables", path);
        if (q.contains("stage") || q.contains("outcome")) check_stage_outcome(q["observables"].size());
    } else if (type == "element_of_reality") {
        require_observable_list(s, q, "observables", path);
        check_stage_outcome(q["observables"].size());
        if (q.contains("t")) number_value(q["t"], path + ".t");
    } else if (type == "counterfactual") {
        const Json &measured = field(q, "measured", path);
        if (!measured.is_array() || measured.empty()) parse_fail(path + ".measured", "expected a nonempty list");
        for (std::size_t k = 0; k < measured.size(); ++k) {
            const std::string p = path + ".measured[" + std::to_string(k) + "]";
            require_observable(s, measured[k], "observable", p);
            number_value(field(measured[k], "t", p), p + ".t");
        }
        check_stage_outcome(measured.size());
    } else if (type == "ensemble_rates") {
        if (q.contains("observable")) require_observable(s, q, "observable", path);
    } else if (type == "readiness") {
        require_observable(s, q, "observable", path);
        number_value(field(q, "t", path), path + ".t");
    }
}

}  // namespace detail

/// Parses and validates scenario JSON text. Parse problems raise ParseError
/// with the field path; model validation errors keep their own kind and gain
/// the field path in the message.
inline Scenario load_scenario_text(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
    }
    using detail::field;
    using detail::parse_fail;

    Scenario s;
    s.name = detail::string_field(doc, "name", "$");
    const Json &dim = field(doc, "dimension", "$");
    if (!dim.is_number_integer() || dim.get<long long>() < 1) parse_fail("dimension", "expected a positive integer");
    s.dim = static_cast<std::size_t>(dim.get<long long>());

    const Json &states = field(doc, "states", "$");
    if (!states.is_object()) parse_fail("states", "expected an object");
    for (const auto &[name, value] : states.items()) {
        s.states.emplace_back(name, detail::ket_value(value, s.dim, "states." + name));
    }

    const Json &observables = field(doc, "observables", "$");
    if (!observables.is_object()) parse_fail("observables", "expected an object");
    for (const auto &[name, value] : observables.items()) {
        const std::string path = "observables." + name;
        const Json &values = field(value, "eigenvalues", path);
        const Json &vectors = field(value, "eigenvectors", path);
        if (!values.is_array() || values.size() != s.dim) {
            parse_fail(path + ".eigenvalues", "expected " + std::to_string(s.dim) + " eigenvalues");
        }
        if (!vectors.is_array() || vectors.size() != s.dim) {
            parse_fail(path + ".eigenvectors", "expected " + std::to_string(s.dim) + " eigenvectors");
        }
        std::vector<double> eigenvalues;
        std::vector<Ket> eigenkets;
        for (std::size_t k = 0; k < s.dim; ++k) {
            const std::string idx = "[" + std::to_string(k) + "]";
            eigenvalues.push_back(detail::number_value(values[k], path + ".eigenvalues" + idx));
            eigenkets.push_back(detail::ket_value(vectors[k], s.dim, path + ".eigenvectors" + idx));
        }
        try {
            s.observables.emplace_back(name, make_observable(name, std::move(eigenvalues), std::move(eigenkets)));
        } catch (const Error &e) {
            throw Error(e.kind(), path + ": " + e.what());
        }
    }

    const Json &timeline = field(doc, "timeline", "$");
    if (!timeline.is_array()) parse_fail("timeline", "expected a list of events");
    for (std::size_t k = 0; k < timeline.size(); ++k) {
        const std::string path = "timeline[" + std::to_string(k) + "]";
        const Json &ev = timeline[k];
        TimelineEvent e;
        e.t = detail::number_value(field(ev, "t", path), path + ".t");
        e.kind = detail::event_kind(detail::string_field(ev, "event", path), path + ".event");
        switch (e.kind) {
            case EventKind::Prepare:
                e.state = detail::string_field(ev, "state", path);
                if (ev.contains("observable")) e.observable = detail::string_field(ev, "observable", path);
                break;
            case EventKind::Postselect:
                e.state = detail::string_field(ev, "state", path);
                break;
            case EventKind::BlockFilter:
                e.observable = detail::string_field(ev, "observable", path);
                e.keep = detail::index_value(field(ev, "keep", path), path + ".keep");
                break;
            default:
                e.observable = detail::string_field(ev, "observable", path);
                break;
        }
        s.timeline.push_back(std::move(e));
    }

    try {
        s.protocol = build_protocol(s.dim, {s.states.begin(), s.states.end()},
                                    {s.observables.begin(), s.observables.end()}, s.timeline);
    } catch (const Error &e) {
        throw Error(e.kind(), std::string("timeline: ") + e.what());
    }

    if (doc.contains("queries")) {
        const Json &queries = doc["queries"];
        if (!queries.is_array()) parse_fail("queries", "expected a list");
        for (std::size_t k = 0; k < queries.size(); ++k) {
            detail::validate_query(s, queries[k], "queries[" + std::to_string(k) + "]");
            s.queries.push_back(queries[k]);
        }
    }
    return s;
}

inline Scenario load_scenario_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str());
}

inline Json scenario_json(const Scenario &s) {
    Json doc;
    doc["name"] = s.name;
    doc["dimension"] = s.dim;
    doc["states"] = Json::object();
    for (const auto &[name, ket] : s.states) doc["states"][name] = detail::ket_json(ket);
    doc["observables"] = Json::object();
    for (const auto &[name, obs] : s.observables) {
        Json o;
        o["eigenvalues"] = obs.eigenvalues();
        o["eigenvectors"] = Json::array();
        for (const auto &k : obs.eigenkets()) o["eigenvectors"].push_back(detail::ket_json(k));
        doc["observables"][name] = std::move(o);
    }
    doc["timeline"] = Json::array();
    for (const auto &e : s.timeline) {
        Json ev;
        ev["t"] = e.t;
        ev["event"] = std::string(to_string(e.kind));
        if (!e.state.empty()) ev["state"] = e.state;
        if (!e.observable.empty()) ev["observable"] = e.observable;
        if (e.kind == EventKind::BlockFilter) ev["keep"] = e.keep + 1;
        doc["timeline"].push_back(std::move(ev));
    }
    doc["queries"] = s.queries;
    return doc;
}

inline std::string save_scenario(const Scenario &s) { return scenario_json(s).dump(2) + "\n"; }

/// Same names, events and queries; amplitudes equal within `tolerance`
/// (normalization on load may move the last bits).
inline bool equivalent(const Scenario &a, const Scenario &b, double tolerance = 1e-12) {
    const auto close = [&](const Ket &u, const Ket &v) {
        if (u.dim() != v.dim()) return false;
        for (std::size_t k = 0; k < u.dim(); ++k)
            if (std::abs(u[k] - v[k]) > tolerance) return false;
        return true;
    };
    if (a.name != b.name || a.dim != b.dim || a.timeline != b.timeline || a.queries != b.queries) return false;
    if (a.states.size() != b.states.size() || a.observables.size() != b.observables.size()) return false;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        if (a.states[k].first != b.states[k].first || !close(a.states[k].second, b.states[k].second)) return false;
    }
    for (std::size_t k = 0; k < a.observables.size(); ++k) {
        const auto &[na, oa] = a.observables[k];
        const auto &[nb, ob] = b.observables[k];
        if (na != nb || oa.eigenvalues() != ob.eigenvalues() || oa.dim() != ob.dim()) return false;
        for (std::size_t i = 0; i < oa.dim(); ++i)
            if (!close(oa.eigenket(i), ob.eigenket(i))) return false;
    }
    return true;
}

}  // namespace tsqt
