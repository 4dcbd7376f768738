#pragma once

#include <json.hpp>

#include "dice/chain.hpp"
#include "dice/enterprise.hpp"
#include "dice/ladder.hpp"
#include "dice/poly.hpp"

namespace dice {

inline nlohmann::ordered_json to_json(const Polynomial& q) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [mono, c] : q.terms()) {  // map order = ascending lex
        nlohmann::ordered_json t;
        t["exp"] = mono.e;
        t["coef"] = c;
        arr.push_back(std::move(t));
    }
    return arr;
}

inline Polynomial polynomial_from_json(const nlohmann::json& j, int nvars) {
    Polynomial q(nvars);
    for (const auto& t : j) {
        std::vector<int32_t> e = t.at("exp").get<std::vector<int32_t>>();
        q.add_term(Monomial(std::move(e)), t.at("coef").get<double>());
    }
    return q;
}

inline nlohmann::ordered_json to_json(const LadderPlan& plan) {
    nlohmann::ordered_json j;
    j["m"] = plan.ladder.m;
    j["v"] = plan.outcomes.v;
    j["d"] = plan.ladder.degree();
    nlohmann::ordered_json states = nlohmann::ordered_json::array();
    for (int i = 0; i < plan.ladder.size(); ++i) {
        nlohmann::ordered_json s;
        s["R"] = plan.ladder.states[i].R;
        s["exp"] = plan.ladder.states[i].n.e;
        std::vector<double> w(plan.outcomes.v + 1);
        for (int o = 0; o <= plan.outcomes.v; ++o) w[o] = plan.outcomes.at(i, o);
        s["weights"] = w;
        states.push_back(std::move(s));
    }
    j["states"] = std::move(states);
    j["flags"]["fine"] = plan.fine;
    j["flags"]["connected"] = plan.connected;
    if (plan.strictly_log_concave)
        j["flags"]["strictly_log_concave"] = *plan.strictly_log_concave;
    j["provenance"] = plan.provenance;
    return j;
}

inline nlohmann::ordered_json to_json(const TransitionKernel& K) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json triplets = nlohmann::ordered_json::array();
    nlohmann::ordered_json neighbors = nlohmann::ordered_json::array();
    for (int i = 0; i < K.k1; ++i) {
        for (int b = 0; b <= K.m; ++b) {
            if (K.row[i][b].empty()) continue;
            nlohmann::ordered_json nb;
            nb["state"] = i;
            nb["face"] = b;
            std::vector<int32_t> js;
            for (const auto& e : K.row[i][b]) {
                js.push_back(e.j);
                triplets.push_back({i, e.j, e.v});
            }
            nb["states"] = js;
            neighbors.push_back(std::move(nb));
        }
    }
    j["V"] = std::move(triplets);
    j["neighbors"] = std::move(neighbors);
    return j;
}

inline nlohmann::ordered_json to_json(const BoundsReport& rep) {
    nlohmann::ordered_json j;
    j["k_states"] = rep.k_states;
    j["degree"] = rep.degree;
    j["min_v"] = rep.min_v;
    if (rep.rho) j["rho"] = *rep.rho;
    else j["rho"] = nullptr;
    if (!rep.rho_note.empty()) j["rho_note"] = rep.rho_note;
    if (rep.tail_coeff) j["tail_coeff"] = *rep.tail_coeff;
    if (rep.mean_bound_geom) j["mean_bound_geom"] = *rep.mean_bound_geom;
    if (rep.prop_bound) j["roll_bound"] = *rep.prop_bound;
    else if (!rep.prop_note.empty()) j["roll_bound_note"] = rep.prop_note;
    if (rep.uniform_bound) j["uniform_bound"] = *rep.uniform_bound;
    if (rep.exact_en_p0) j["exact_en_p0"] = *rep.exact_en_p0;
    if (rep.exact_en_p1) j["exact_en_p1"] = *rep.exact_en_p1;
    return j;
}

}  // namespace dice
