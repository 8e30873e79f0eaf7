#pragma once

// Scenario files:
//
//   {
//     "name": "...", "n_states": S, "n_actions": A,
//     "learners": [ { "gamma": g, "transitions": [A][S][S] }, ... ],
//     "r_star": [S], "initial_states": [...], "notes": "..."
//   }
//
// Unknown fields are accepted and reported as warnings.

#include "classteach/scenarios.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace classteach {

inline nlohmann::json scenario_to_json(const ScenarioBundle& bundle) {
    const ClassSpec& c = bundle.class_spec;
    nlohmann::json learners = nlohmann::json::array();
    for (const auto& m : c.learners) {
        nlohmann::json kernel = nlohmann::json::array();
        for (Action a = 0; a < m.n_actions(); ++a) {
            nlohmann::json rows = nlohmann::json::array();
            for (State s = 0; s < m.n_states(); ++s) {
                std::vector<double> row(static_cast<std::size_t>(m.n_states()));
                for (State t = 0; t < m.n_states(); ++t) row[static_cast<std::size_t>(t)] = m.transition(a)(s, t);
                rows.push_back(row);
            }
            kernel.push_back(std::move(rows));
        }
        learners.push_back({{"gamma", m.gamma()}, {"transitions", std::move(kernel)}});
    }
    std::vector<double> r(c.r_star.data(), c.r_star.data() + c.r_star.size());
    return {{"name", bundle.name},
            {"n_states", c.n_states()},
            {"n_actions", c.n_actions()},
            {"learners", std::move(learners)},
            {"r_star", r},
            {"initial_states", c.initial_states},
            {"notes", bundle.notes}};
}

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const std::string& key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError("missing field '" + where + key + "'");
    return *it;
}

inline double number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError("field '" + where + "' must be a number");
    return j.get<double>();
}

inline int integer(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError("field '" + where + "' must be an integer");
    return j.get<int>();
}

inline const nlohmann::json& array(const nlohmann::json& j, std::size_t expected, const std::string& where) {
    if (!j.is_array()) throw ParseError("field '" + where + "' must be an array");
    if (expected != 0 && j.size() != expected)
        throw ParseError("field '" + where + "' must have " + std::to_string(expected) + " entries, found " +
                         std::to_string(j.size()));
    return j;
}

inline void warn_unknown(const nlohmann::json& obj, const std::set<std::string>& known, const std::string& where,
                         std::vector<std::string>* warnings) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()) && warnings) warnings->push_back("ignoring unknown field '" + where + it.key() + "'");
}

} // namespace detail

/// Parses and validates a scenario. Structural problems raise ParseError,
/// non-stochastic rows raise ValidationError citing (learner, state, action).
inline ScenarioBundle scenario_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr) {
    using namespace detail;
    if (!j.is_object()) throw ParseError("scenario must be a JSON object");
    warn_unknown(j, {"name", "n_states", "n_actions", "learners", "r_star", "initial_states", "notes"}, "", warnings);

    const auto& name = field(j, "name", "");
    if (!name.is_string()) throw ParseError("field 'name' must be a string");
    const int n = integer(field(j, "n_states", ""), "n_states");
    const int k = integer(field(j, "n_actions", ""), "n_actions");
    if (n < 1) throw ParseError("field 'n_states' must be positive");
    if (k < 1) throw ParseError("field 'n_actions' must be positive");

    std::vector<RewardlessMDP> learners;
    const auto& learners_json = array(field(j, "learners", ""), 0, "learners");
    if (learners_json.empty()) throw ParseError("field 'learners' must not be empty");
    for (std::size_t l = 0; l < learners_json.size(); ++l) {
        const std::string where = "learners[" + std::to_string(l) + "]";
        const auto& lj = learners_json[l];
        if (!lj.is_object()) throw ParseError("field '" + where + "' must be an object");
        warn_unknown(lj, {"gamma", "transitions"}, where + ".", warnings);
        const double gamma = number(field(lj, "gamma", where + "."), where + ".gamma");
        if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError(where + ".gamma must lie in [0, 1)");

        const auto& tj = array(field(lj, "transitions", where + "."), static_cast<std::size_t>(k), where + ".transitions");
        std::vector<Matrix> kernel;
        for (Action a = 0; a < k; ++a) {
            const std::string aw = where + ".transitions[" + std::to_string(a) + "]";
            const auto& rows = array(tj[static_cast<std::size_t>(a)], static_cast<std::size_t>(n), aw);
            Matrix p(n, n);
            for (State s = 0; s < n; ++s) {
                const std::string sw = aw + "[" + std::to_string(s) + "]";
                const auto& row = array(rows[static_cast<std::size_t>(s)], static_cast<std::size_t>(n), sw);
                double sum = 0.0;
                for (State t = 0; t < n; ++t) {
                    const double x = number(row[static_cast<std::size_t>(t)], sw + "[" + std::to_string(t) + "]");
                    if (!(x >= 0.0 && x <= 1.0))
                        throw ValidationError("learner " + std::to_string(l) + ", state " + std::to_string(s) +
                                              ", action " + std::to_string(a) + ": probability outside [0, 1]");
                    p(s, t) = x;
                    sum += x;
                }
                if (std::abs(sum - 1.0) > kStochasticTol)
                    throw ValidationError("learner " + std::to_string(l) + ", state " + std::to_string(s) +
                                          ", action " + std::to_string(a) + ": row sums to " + std::to_string(sum));
            }
            kernel.push_back(std::move(p));
        }
        learners.emplace_back(std::move(kernel), gamma);
    }

    const auto& rj = array(field(j, "r_star", ""), static_cast<std::size_t>(n), "r_star");
    Reward r(n);
    for (State s = 0; s < n; ++s) r(s) = number(rj[static_cast<std::size_t>(s)], "r_star[" + std::to_string(s) + "]");

    std::vector<State> initial;
    const auto& ij = array(field(j, "initial_states", ""), 0, "initial_states");
    for (std::size_t i = 0; i < ij.size(); ++i) {
        const State s = integer(ij[i], "initial_states[" + std::to_string(i) + "]");
        if (s < 0 || s >= n) throw ValidationError("initial_states[" + std::to_string(i) + "] out of range");
        initial.push_back(s);
    }
    if (initial.empty()) throw ValidationError("initial_states must not be empty");

    std::string notes;
    if (const auto it = j.find("notes"); it != j.end()) {
        if (!it->is_string()) throw ParseError("field 'notes' must be a string");
        notes = it->get<std::string>();
    }
    return {name.get<std::string>(), {std::move(learners), std::move(r), std::move(initial)}, std::move(notes)};
}

inline void save_scenario(const ScenarioBundle& bundle, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << scenario_to_json(bundle).dump(2) << '\n';
}

inline ScenarioBundle load_scenario(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j, warnings);
}

} // namespace classteach
