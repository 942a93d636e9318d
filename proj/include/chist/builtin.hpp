// Copyright 2026 The chist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Built-in demo scenarios as scenario documents. They go through the same
 * loader as files, so `demo X --export` and `run` agree.
 */
#pragma once

#include <string>
#include <vector>

#include "scenario.hpp"

namespace chist::demos {

struct DemoInfo {
    const char *name;
    const char *summary;
};

inline const std::vector<DemoInfo> &list() {
    static const std::vector<DemoInfo> demos{
        {"stern_gerlach", "spin measured by two detectors; unitary, detector, beam and spin families"},
        {"crossed_beam", "double slit with crossing beams; which slit given which detector fired"},
        {"interference", "slits recombined without a record; an inconsistent family"},
        {"spin", "spin-1/2 observables Sz and Sx; spectra and the single framework rule"},
    };
    return demos;
}

inline Json stern_gerlach(Complex alpha = 0.6, Complex beta = 0.8) {
    auto prefix = [] {
        return Json::array({{{"time", 1}, {"projectors", {"psi1"}}}});
    };
    Json fu = prefix();
    fu.push_back({{"time", 2}, {"projectors", {"psi2"}}});
    fu.push_back({{"time", 3}, {"projectors", {"psi3"}}});
    Json f1 = prefix();
    f1.push_back({{"time", 2}, {"projectors", {"psi2"}}});
    f1.push_back({{"time", 3}, {"pdi", "detectors"}});
    Json f2 = prefix();
    f2.push_back({{"time", 2}, {"projectors", {"w2a", "w2b"}}, {"remainder", "I-w2a-w2b"}});
    f2.push_back({{"time", 3}, {"pdi", "detectors"}});
    Json f3 = Json::array({{{"time", 1}, {"pdi", "spin_z"}},
                           {{"time", 2}, {"projectors", {"I"}}},
                           {{"time", 3}, {"pdi", "detectors"}}});
    return {
        {"version", kScenarioVersion},
        {"name", "stern_gerlach"},
        {"model",
         {{"builder", "stern_gerlach"},
          {"alpha", {alpha.real(), alpha.imag()}},
          {"beta", {beta.real(), beta.imag()}}}},
        {"pdis",
         {{"detectors", {{"projectors", {"Da*_Db", "Da_Db*", "Da*_Db*", "Da_Db"}}}},
          {"spin_z", {{"projectors", {"z+", "z-"}}}}}},
        {"families",
         {{{"name", "Fu"}, {"events", fu}},
          {{"name", "F1"}, {"events", f1}},
          {{"name", "F2"}, {"events", f2}},
          {{"name", "F3"}, {"events", f3}}}},
        {"queries",
         {{{"kind", "probs"}, {"family", "F1"}},
          {{"kind", "probs"}, {"family", "F2"}},
          {{"kind", "probs"}, {"family", "Fu"}},
          {{"kind", "consistency"}, {"family", "F3"}},
          {{"kind", "conditional"}, {"family", "F2"}, {"target", "w2a@t2"}, {"given", "Da*@t3"}},
          {{"kind", "conditional"}, {"family", "F3"}, {"target", "z+@t1"}, {"given", "Da*@t3"}},
          {{"kind", "families_compatible"}, {"family1", "F2"}, {"family2", "F3"}},
          {{"kind", "families_compatible"}, {"family1", "Fu"}, {"family2", "F1"}}}},
    };
}

inline Json crossed_beam() {
    return {
        {"version", kScenarioVersion},
        {"name", "crossed_beam"},
        {"model", {{"builder", "crossed_beam"}}},
        {"pdis", {{"detectors", {{"projectors", {"Ca*_Cb", "Ca_Cb*", "Ca*_Cb*", "Ca_Cb"}}}}}},
        {"families",
         {{{"name", "slits"},
           {"events",
            {{{"time", 1}, {"projectors", {"A", "B"}}, {"remainder", "I-A-B"}},
             {{"time", 3}, {"pdi", "detectors"}}}}}}},
        {"queries",
         {{{"kind", "probs"}, {"family", "slits"}},
          {{"kind", "conditional"}, {"family", "slits"}, {"target", "B@t1"}, {"given", "Ca*@t3"}},
          {{"kind", "conditional"}, {"family", "slits"}, {"target", "A@t1"}, {"given", "Cb*@t3"}}}},
    };
}

inline Json interference() {
    return {
        {"version", kScenarioVersion},
        {"name", "interference"},
        {"model", {{"builder", "interference"}}},
        {"families",
         {{{"name", "slits_ports"},
           {"events",
            {{{"time", 1}, {"projectors", {"A", "B"}}, {"remainder", "I-A-B"}},
             {{"time", 2}, {"projectors", {"X_up", "X_down"}}, {"remainder", "I-X"}}}}},
          {{"name", "slits"}, {"events", {{{"time", 1}, {"projectors", {"A", "B"}}, {"remainder", "I-A-B"}}}}},
          {{"name", "ports"},
           {"events", {{{"time", 2}, {"projectors", {"X_up", "X_down"}}, {"remainder", "I-X"}}}}}}},
        {"queries",
         {{{"kind", "consistency"}, {"family", "slits_ports"}},
          {{"kind", "probs"}, {"family", "slits_ports"}},
          {{"kind", "probs"}, {"family", "ports"}},
          {{"kind", "families_compatible"}, {"family1", "slits"}, {"family2", "ports"}}}},
    };
}

inline Json spin() {
    return {
        {"version", kScenarioVersion},
        {"name", "spin"},
        {"space", {{{"name", "spin"}, {"basis", {"z+", "z-"}}}}},
        {"steps", {{{1, 0}, {0, 1}}}},
        {"initial_state", {{"product", {{"spin", {{"z+", 0.6}, {"z-", 0.8}}}}}}},
        {"observables",
         {{"Sz", {{"matrix", {{0.5, 0}, {0, -0.5}}}, {"labels", {"z+", "z-"}}}},
          {"Sx", {{"matrix", {{0, 0.5}, {0.5, 0}}}, {"labels", {"x+", "x-"}}}}}},
        {"pdis", {{"Sz", {{"observable", "Sz"}}}, {"Sx", {{"observable", "Sx"}}}}},
        {"families", {{{"name", "z"}, {"events", {{{"time", 1}, {"pdi", "Sz"}}}}}}},
        {"queries",
         {{{"kind", "spectrum"}, {"observable", "Sz"}},
          {{"kind", "spectrum"}, {"observable", "Sx"}},
          {{"kind", "compatible"}, {"pdi1", "Sz"}, {"pdi2", "Sx"}},
          {{"kind", "refine"}, {"pdi1", "Sz"}, {"pdi2", "Sx"}},
          {{"kind", "refine"}, {"pdi1", "Sz"}, {"pdi2", "Sz"}},
          {{"kind", "probs"}, {"family", "z"}}}},
    };
}

/// Document for a demo by name, or a Validation error listing the names.
inline Json by_name(const std::string &name, Complex alpha = 0.6, Complex beta = 0.8) {
    if (name == "stern_gerlach") {
        return stern_gerlach(alpha, beta);
    }
    if (name == "crossed_beam") {
        return crossed_beam();
    }
    if (name == "interference") {
        return interference();
    }
    if (name == "spin") {
        return spin();
    }
    std::string known;
    for (const auto &d : list()) {
        known += known.empty() ? d.name : std::string(", ") + d.name;
    }
    throw Error(ErrorKind::Validation, "unknown demo '" + name + "' (known: " + known + ")");
}

} // namespace chist::demos
