#pragma once

// JSON views of reports, bounds and generated-code metadata.

#include <nlohmann/json.hpp>

#include "mpr/bounds.hpp"
#include "mpr/construct.hpp"
#include "mpr/verify.hpp"

namespace mpr {

using json = nlohmann::ordered_json;

inline json to_json(const StationSet& s) { return json(s.members()); }

inline json to_json(const Witness& w) {
    if (const auto* sw = std::get_if<SelectorWitness>(&w)) {
        return json{{"type", "selector"},
                    {"subset", to_json(sw->subset)},
                    {"good_rows", sw->good_rows},
                    {"covered", to_json(sw->covered)}};
    }
    if (const auto* kw = std::get_if<KGWitness>(&w)) {
        json blocks = json::array();
        for (const auto& b : kw->blocks) blocks.push_back(to_json(b));
        return json{{"type", "kg"}, {"subset", to_json(kw->subset)}, {"slot_indices", kw->slot_indices}, {"blocks", blocks}};
    }
    return nullptr;
}

inline json to_json(const VerificationReport& r) {
    return json{{"pass", r.pass},
                {"counterexample", r.counterexample ? to_json(*r.counterexample) : json(nullptr)},
                {"witness", to_json(r.witness)},
                {"subsets_checked", r.subsets_checked}};
}

inline json to_json(const BoundValue& b) {
    return json{{"name", b.name},
                {"raw", std::isfinite(b.raw) ? json(b.raw) : json(nullptr)},
                {"integral", b.integral ? json(*b.integral) : json(nullptr)},
                {"preconditions_met", b.preconditions_met},
                {"notes", b.notes}};
}

inline json plan_json(const std::vector<ComponentRecord>& plan) {
    json a = json::array();
    for (const auto& c : plan) a.push_back(json{{"k", c.params.k}, {"m", c.params.m}, {"d_eff", c.params.d}, {"t", c.t}});
    return a;
}

/// Sidecar: {k,d,n,eps,seed,mode,plan:[{k,m,d_eff,t},...],generator}
inline json sidecar_json(const KGCode& code) {
    return json{{"k", code.params.k},       {"d", code.params.d},       {"n", code.params.n},
                {"eps", code.eps},          {"seed", code.seed},        {"mode", to_string(code.mode)},
                {"plan", plan_json(code.plan)}, {"generator", code.generator}};
}

}  // namespace mpr
