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


// Built-in gedanken experiments, stored as scenario JSON so they exercise the
// same loader as user files. `tsqt dump <name>` prints any of them.

#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "tsqt/scenario.hpp"

namespace tsqt {

struct BuiltinScenario {
    std::string_view name;
    std::string_view description;
    std::string_view json;
    /// Fields shared with other built-ins, merged in on load (may be empty).
    std::string_view shared = {};
};

namespace builtin_text {

// Three boxes x1..x3. a = (x1 + x2)/sqrt2, b = (x2 + x3)/sqrt2. A and B carry a
// and b as their first eigenkets; Q has q1 = (x1 + x3)/sqrt2, q2 = x2,
// q3 = (x1 - x3)/sqrt2.
inline constexpr std::string_view three_box_header = R"({
  "dimension": 3,
  "states": {
    "a": [[1,0],[1,0],[0,0]],
    "b": [[0,0],[1,0],[1,0]]
  },
  "observables": {
    "X": {"eigenvalues": [1,2,3],
          "eigenvectors": [[[1,0],[0,0],[0,0]], [[0,0],[1,0],[0,0]], [[0,0],[0,0],[1,0]]]},
    "Q": {"eigenvalues": [1,2,3],
          "eigenvectors": [[[1,0],[0,0],[1,0]], [[0,0],[1,0],[0,0]], [[1,0],[0,0],[-1,0]]]},
    "A": {"eigenvalues": [1,2,3],
          "eigenvectors": [[[1,0],[1,0],[0,0]], [[1,0],[-1,0],[0,0]], [[0,0],[0,0],[1,0]]]},
    "B": {"eigenvalues": [1,2,3],
          "eigenvectors": [[[0,0],[1,0],[1,0]], [[0,0],[1,0],[-1,0]], [[1,0],[0,0],[0,0]]]}
  }
})";

inline constexpr std::string_view three_box_x = R"({
  "name": "three_box_x",
  "timeline": [
    {"t": 0, "event": "prepare", "state": "a", "observable": "A"},
    {"t": 1, "event": "align", "observable": "X"},
    {"t": 2, "event": "measure", "observable": "X"},
    {"t": 3, "event": "align", "observable": "B"},
    {"t": 4, "event": "postselect", "state": "b"}
  ],
  "queries": [
    {"type": "abl", "observable": "X", "expect": [0, 1, 0]},
    {"type": "element_of_reality", "observables": ["X"], "stage": 1, "outcome": 2, "expect": true},
    {"type": "element_of_reality", "observables": ["A"], "stage": 1, "outcome": 1, "t": 0.5, "expect": true},
    {"type": "element_of_reality", "observables": ["X"], "stage": 1, "outcome": 2, "t": 1.5, "expect": true},
    {"type": "element_of_reality", "observables": ["B"], "stage": 1, "outcome": 1, "t": 3.5, "expect": true},
    {"type": "element_of_reality", "observables": ["A"], "stage": 1, "outcome": 1, "t": 1.5, "expect": false},
    {"type": "element_of_reality", "observables": ["X"], "stage": 1, "outcome": 2, "t": 3.5, "expect": false},
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 1.5}], "stage": 1, "outcome": 2, "expect": 1},
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 3.5}], "stage": 1, "outcome": 2,
     "expect": "undefined"},
    {"type": "readiness", "observable": "X", "t": 1.5, "expect": "ready"},
    {"type": "readiness", "observable": "B", "t": 1.5, "expect": {"level": "partially_ready", "outcomes": [3]}},
    {"type": "montecarlo", "expect": "pass"}
  ]
})";

inline constexpr std::string_view three_box_q = R"({
  "name": "three_box_q",
  "timeline": [
    {"t": 0, "event": "prepare", "state": "a"},
    {"t": 1, "event": "align", "observable": "Q"},
    {"t": 2, "event": "measure", "observable": "Q"},
    {"t": 3, "event": "unalign", "observable": "Q"},
    {"t": 4, "event": "postselect", "state": "b"}
  ],
  "queries": [
    {"type": "abl", "observable": "X", "expect": [0, 1, 0]},
    {"type": "abl", "observable": "Q", "expect": [0.16666666666666666, 0.6666666666666666, 0.16666666666666666]},
    {"type": "counterfactual", "measured": [{"observable": "Q", "t": 1.5}], "stage": 1, "outcome": 1,
     "expect": 0.16666666666666666},
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 1.5}], "stage": 1, "outcome": 1,
     "expect": "undefined"},
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 1.5}], "stage": 1, "outcome": 1,
     "mode": "ungated", "expect": 0},
    {"type": "readiness", "observable": "X", "t": 1.5, "expect": {"level": "partially_ready", "outcomes": [2]}},
    {"type": "ensemble_rates", "observable": "Q", "expect": {"rw_rate": 0.25, "cfw_rate": 0.375}},
    {"type": "montecarlo", "expect": "pass"}
  ]
})";

inline constexpr std::string_view three_box_xq = R"({
  "name": "three_box_xq",
  "timeline": [
    {"t": 0, "event": "prepare", "state": "a"},
    {"t": 1, "event": "align", "observable": "X"},
    {"t": 1.5, "event": "measure", "observable": "X"},
    {"t": 2, "event": "align", "observable": "Q"},
    {"t": 2.5, "event": "measure", "observable": "Q"},
    {"t": 3, "event": "unalign", "observable": "Q"},
    {"t": 4, "event": "unalign", "observable": "X"},
    {"t": 5, "event": "postselect", "state": "b"}
  ],
  "queries": [
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 1.5}], "stage": 1, "outcome": 2, "expect": 1},
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 1.5}, {"observable": "Q", "t": 2.5}],
     "stage": 1, "outcome": 2, "expect": 0.6666666666666666},
    {"type": "counterfactual", "measured": [{"observable": "X", "t": 4.5}], "stage": 1, "outcome": 2,
     "expect": "undefined"},
    {"type": "element_of_reality", "observables": ["X"], "stage": 1, "outcome": 2, "t": 1.5, "expect": true},
    {"type": "element_of_reality", "observables": ["X", "Q"], "stage": 1, "outcome": 2, "expect": false},
    {"type": "sequence", "observables": ["X", "Q"],
     "expect": [{"outcomes": [1, 1], "probability": 0.16666666666666666},
                {"outcomes": [1, 3], "probability": 0.16666666666666666},
                {"outcomes": [2, 2], "probability": 0.6666666666666666},
                {"outcomes": [1, 2], "probability": 0},
                {"outcomes": [3, 3], "probability": 0}]},
    {"type": "readiness", "observable": "X", "t": 1.5, "expect": "ready"},
    {"type": "readiness", "observable": "X", "t": 2.5, "expect": {"level": "partially_ready", "outcomes": [2]}},
    {"type": "readiness", "observable": "Q", "t": 2.5, "expect": "ready"},
    {"type": "readiness", "observable": "X", "t": 4.5, "expect": "not_ready"},
    {"type": "montecarlo", "expect": "pass"}
  ]
})";

inline constexpr std::string_view three_box_xqx = R"({
  "name": "three_box_xqx",
  "timeline": [
    {"t": 0, "event": "prepare", "state": "a"},
    {"t": 1, "event": "align", "observable": "X"},
    {"t": 1.5, "event": "measure", "observable": "X"},
    {"t": 2, "event": "align", "observable": "Q"},
    {"t": 2.5, "event": "measure", "observable": "Q"},
    {"t": 3, "event": "unalign", "observable": "Q"},
    {"t": 3.5, "event": "measure", "observable": "X"},
    {"t": 4, "event": "unalign", "observable": "X"},
    {"t": 5, "event": "postselect", "state": "b"}
  ],
  "queries": [
    {"type": "sequence", "observables": ["X", "Q", "X"],
     "expect": [{"outcomes": [1, 1, 3], "probability": 0.16666666666666666},
                {"outcomes": [1, 3, 3], "probability": 0.16666666666666666},
                {"outcomes": [2, 2, 2], "probability": 0.6666666666666666},
                {"outcomes": [1, 1, 1], "probability": 0}]},
    {"type": "sequence", "observables": ["X", "Q", "X"], "stage": 1, "outcome": 1, "expect": 0.3333333333333333},
    {"type": "sequence", "observables": ["X", "Q", "X"], "stage": 3, "outcome": 3, "expect": 0.3333333333333333},
    {"type": "sequence", "observables": ["X", "Q", "X"], "stage": 3, "outcome": 2, "expect": 0.6666666666666666},
    {"type": "counterfactual",
     "measured": [{"observable": "X", "t": 1.5}, {"observable": "Q", "t": 2.5}, {"observable": "X", "t": 3.5}],
     "stage": 1, "outcome": 2, "expect": 0.6666666666666666},
    {"type": "element_of_reality", "observables": ["X", "Q", "X"], "stage": 1, "outcome": 2, "expect": false},
    {"type": "montecarlo", "expect": "pass"}
  ]
})";

// Spin-1/2: preselect +z, postselect +x. The preparation leaves the particle
// routed by sigma_z; the interaction at t = 2 reroutes it by sigma_x.
inline constexpr std::string_view spin_dispersion = R"({
  "name": "spin_dispersion",
  "dimension": 2,
  "states": {
    "up_z": [[1,0],[0,0]],
    "up_x": [[1,0],[1,0]]
  },
  "observables": {
    "A": {"eigenvalues": [1,-1], "eigenvectors": [[[1,0],[0,0]], [[0,0],[1,0]]]},
    "B": {"eigenvalues": [1,-1], "eigenvectors": [[[1,0],[1,0]], [[1,0],[-1,0]]]}
  },
  "timeline": [
    {"t": 0, "event": "prepare", "state": "up_z", "observable": "A"},
    {"t": 1, "event": "measure", "observable": "A"},
    {"t": 2, "event": "align", "observable": "B"},
    {"t": 3, "event": "measure", "observable": "B"},
    {"t": 4, "event": "postselect", "state": "up_x"}
  ],
  "queries": [
    {"type": "element_of_reality", "observables": ["A"], "stage": 1, "outcome": 1, "t": 1, "expect": true},
    {"type": "element_of_reality", "observables": ["A"], "stage": 1, "outcome": 1, "t": 3, "expect": false},
    {"type": "element_of_reality", "observables": ["B"], "stage": 1, "outcome": 1, "t": 3, "expect": true},
    {"type": "element_of_reality", "observables": ["B"], "stage": 1, "outcome": 1, "t": 1, "expect": false},
    {"type": "readiness", "observable": "A", "t": 1, "expect": "ready"},
    {"type": "readiness", "observable": "B", "t": 1, "expect": "not_ready"},
    {"type": "readiness", "observable": "A", "t": 3, "expect": "not_ready"},
    {"type": "readiness", "observable": "B", "t": 3, "expect": "ready"},
    {"type": "counterfactual", "measured": [{"observable": "A", "t": 1}], "stage": 1, "outcome": 1, "expect": 1},
    {"type": "counterfactual", "measured": [{"observable": "B", "t": 1}], "stage": 1, "outcome": 1,
     "expect": "undefined"},
    {"type": "sequence", "observables": ["A", "B"], "expect": [{"outcomes": [1, 1], "probability": 1}]},
    {"type": "montecarlo", "expect": "pass"}
  ]
})";

// Orthogonal pre- and postselection: nothing survives without an intermediate
// measurement, half the runs survive a sigma_x measurement.
inline constexpr std::string_view empty_ensemble = R"({
  "name": "empty_ensemble",
  "dimension": 2,
  "states": {
    "zero": [[1,0],[0,0]],
    "one": [[0,0],[1,0]]
  },
  "observables": {
    "Z": {"eigenvalues": [1,-1], "eigenvectors": [[[1,0],[0,0]], [[0,0],[1,0]]]},
    "Xs": {"eigenvalues": [1,-1], "eigenvectors": [[[1,0],[1,0]], [[1,0],[-1,0]]]}
  },
  "timeline": [
    {"t": 0, "event": "prepare", "state": "zero"},
    {"t": 1, "event": "align", "observable": "Xs"},
    {"t": 2, "event": "measure", "observable": "Xs"},
    {"t": 3, "event": "unalign", "observable": "Xs"},
    {"t": 4, "event": "postselect", "state": "one"}
  ],
  "queries": [
    {"type": "abl", "observable": "Z", "expect": {"error": "EmptyEnsemble"}},
    {"type": "abl", "observable": "Xs", "expect": [0.5, 0.5]},
    {"type": "ensemble_rates", "observable": "Xs", "expect": {"rw_rate": 0, "cfw_rate": 0.5}},
    {"type": "ensemble_rates", "expect": {"rw_rate": 0, "cfw_rate": 0}},
    {"type": "counterfactual", "measured": [{"observable": "Z", "t": 2}], "stage": 1, "outcome": 1,
     "expect": "undefined"},
    {"type": "montecarlo", "expect": "pass"}
  ]
})";

}  // namespace builtin_text

inline constexpr std::array<BuiltinScenario, 6> kBuiltins = {{
    {"three_box_x", "3-box, X routed between A and B: x2 is certain while X is measurement-ready",
     builtin_text::three_box_x, builtin_text::three_box_header},
    {"three_box_q", "3-box, Q measured: x1 and x3 vanish while q1 does not; X is not ready inside the Q window",
     builtin_text::three_box_q, builtin_text::three_box_header},
    {"three_box_xq", "3-box, Q routed inside the X window: x2 drops to 2/3 once Q is measured too",
     builtin_text::three_box_xq, builtin_text::three_box_header},
    {"three_box_xqx", "3-box, X then Q then X: a -> x1 -> q1 (or q3) -> x3 -> b has nonzero probability",
     builtin_text::three_box_xqx, builtin_text::three_box_header},
    {"spin_dispersion", "spin-1/2, z preselected and x postselected: the two are never ready at once",
     builtin_text::spin_dispersion},
    {"empty_ensemble", "orthogonal pre/postselection: empty without measurement, half-full with sigma_x",
     builtin_text::empty_ensemble},
}};

inline std::vector<std::pair<std::string, std::string>> list_builtin() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto &b : kBuiltins) out.emplace_back(b.name, b.description);
    return out;
}

inline bool is_builtin(std::string_view name) {
    return std::any_of(kBuiltins.begin(), kBuiltins.end(), [&](const BuiltinScenario &b) { return b.name == name; });
}

inline Scenario load_builtin(std::string_view name) {
    for (const auto &b : kBuiltins) {
        if (b.name != name) continue;
        if (b.shared.empty()) return load_scenario_text(b.json);
        Json doc = Json::parse(b.json);
        Json merged = {{"name", doc["name"]}};
        merged.update(Json::parse(b.shared));
        merged.update(doc);
        return load_scenario_text(merged.dump());
    }
    throw Error(ErrorKind::UnknownName, "no built-in scenario '" + std::string(name) + "'");
}

}  // namespace tsqt
