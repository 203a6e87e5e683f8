#pragma once

// Command driver behind the `emcs` tool. Each command produces a canonical
// JSON report (sorted keys, canonically ordered lists) and an exit code:
// 0 success, 1 no equilibrium, 2 input error, 3 budget exceeded,
// 4 oracle mismatch.

#include "equilibrium.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "minimal_change.hpp"
#include "parser.hpp"
#include "system.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emcs {

enum class Command { solve, evolve, select, check, oracle };
enum class Criterion { strong, weak, global_cost };

inline std::optional<Command> parse_command(std::string_view s) {
    if (s == "solve") return Command::solve;
    if (s == "evolve") return Command::evolve;
    if (s == "select") return Command::select;
    if (s == "check") return Command::check;
    if (s == "oracle") return Command::oracle;
    return std::nullopt;
}

inline std::optional<Criterion> parse_criterion(std::string_view s) {
    if (s == "strong") return Criterion::strong;
    if (s == "weak") return Criterion::weak;
    if (s == "global-cost") return Criterion::global_cost;
    return std::nullopt;
}

inline std::string_view to_string(Criterion c) {
    switch (c) {
    case Criterion::strong: return "strong";
    case Criterion::weak: return "weak";
    case Criterion::global_cost: return "global-cost";
    }
    return "";
}

struct RunFlags {
    std::optional<std::size_t> size;
    Criterion criterion = Criterion::strong;
    SolverOptions options;
    // Parsed trace document for `check`.
    nlohmann::json trace;
};

struct RunResult {
    nlohmann::json report;
    int exit_code = 0;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int no_equilibrium = 1;
inline constexpr int input_error = 2;
inline constexpr int budget_exceeded = 3;
inline constexpr int oracle_mismatch = 4;
} // namespace exit_code

namespace report {

using nlohmann::json;

inline json atoms(const AtomSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

inline json state(const EMCS& m, const BeliefState& s) {
    json out = json::object();
    for (std::size_t i = 0; i < m.contexts.size(); ++i) out[m.contexts[i].name] = atoms(s[i]);
    return out;
}

inline json observation(const EMCS& m, const InstantObservation& o) {
    json out = json::object();
    for (std::size_t i = 0; i < m.observers.size(); ++i) out[m.observers[i].name] = atoms(o[i]);
    return out;
}

inline json configuration(const EMCS& m, const KBConfiguration& k) {
    json out = json::object();
    for (std::size_t i = 0; i < m.contexts.size(); ++i) {
        json elems = json::array();
        for (const auto& r : k[i]) elems.push_back(to_string(r));
        out[m.contexts[i].name] = elems;
    }
    return out;
}

inline json operations(const EMCS& m, const std::vector<OperationSet>& ops) {
    json out = json::object();
    for (std::size_t i = 0; i < m.contexts.size(); ++i) {
        json list = json::array();
        for (const auto& f : ops[i]) list.push_back(to_string(f));
        out[m.contexts[i].name] = list;
    }
    return out;
}

inline json trace(const EMCS& m, const ChangeModel& model, const ObservationSequence& obs, const EquilibriumTrace& t) {
    json out;
    out["states"] = json::array();
    out["kb_configs"] = json::array();
    out["applied_next_ops"] = json::array();
    out["step_costs"] = json::array();
    out["distances"] = json::array();
    for (std::size_t j = 0; j < t.size(); ++j) {
        out["states"].push_back(state(m, t.states[j]));
        out["kb_configs"].push_back(configuration(m, t.kb_configs[j]));
        out["step_costs"].push_back(step_cost(model.costs, m, t.states[j], obs[j]));
        if (j + 1 < t.size()) {
            out["applied_next_ops"].push_back(operations(m, t.applied_next_ops[j]));
            out["distances"].push_back(to_string(belief_distance(model.distance, t.states[j], t.states[j + 1])));
        }
    }
    out["global_cost"] = global_cost(model.costs, m, t, obs);
    return out;
}

} // namespace report

namespace detail {

inline std::size_t run_size(const RunFlags& flags, const ObservationSequence& obs) {
    const std::size_t size = flags.size.value_or(obs.size());
    require_size(size, obs);
    return size;
}

inline BeliefState state_from_json(const EMCS& m, const nlohmann::json& j) {
    if (!j.is_object()) throw Error("trace: a belief state must be an object keyed by context name");
    BeliefState s;
    s.sets.resize(m.contexts.size());
    for (const auto& [name, atoms] : j.items()) {
        auto it = std::find_if(m.contexts.begin(), m.contexts.end(), [&](const auto& c) { return c.name == name; });
        if (it == m.contexts.end()) throw Error("trace: unknown context '" + name + "'");
        const auto i = static_cast<std::size_t>(it - m.contexts.begin());
        for (const auto& a : atoms) {
            const auto atom = a.get<std::string>();
            if (!it->logic.signature.contains(atom))
                throw Error("trace: atom '" + atom + "' not in signature of context " + name);
            s[i].insert(atom);
        }
    }
    return s;
}

inline KBConfiguration configuration_from_json(const EMCS& m, const nlohmann::json& j) {
    if (!j.is_object()) throw Error("trace: a kb configuration must be an object keyed by context name");
    KBConfiguration k;
    k.kbs.resize(m.contexts.size());
    for (const auto& [name, elems] : j.items()) {
        auto it = std::find_if(m.contexts.begin(), m.contexts.end(), [&](const auto& c) { return c.name == name; });
        if (it == m.contexts.end()) throw Error("trace: unknown context '" + name + "'");
        const auto i = static_cast<std::size_t>(it - m.contexts.begin());
        for (const auto& e : elems) k[i].insert(parse_rule(e.get<std::string>(), *it));
    }
    return k;
}

} // namespace detail

inline RunResult run(Command cmd, const SystemDescription& sys, const ObservationSequence& obs,
                     const RunFlags& flags) {
    using nlohmann::json;
    const EMCS& m = sys.system;
    const ChangeModel model = sys.change_model();
    EquilibriumTable table(m, flags.options);
    RunResult result;
    json& out = result.report;

    switch (cmd) {
    case Command::solve: {
        out["command"] = "solve";
        const InstantObservation first = obs.empty() ? empty_observation(m) : obs.front();
        out["observation"] = report::observation(m, first);
        out["equilibria"] = json::array();
        for (const auto& w : table.get(initial_configuration(m), first)) {
            json e;
            e["state"] = report::state(m, w.state);
            e["witness_kbs"] = report::configuration(m, w.witness_kbs);
            e["next_ops"] = report::operations(m, next_operations(m, w.state, first));
            e["step_cost"] = step_cost(model.costs, m, w.state, first);
            out["equilibria"].push_back(e);
        }
        out["count"] = out["equilibria"].size();
        if (out["equilibria"].empty()) result.exit_code = exit_code::no_equilibrium;
        break;
    }
    case Command::evolve: {
        const std::size_t size = detail::run_size(flags, obs);
        out["command"] = "evolve";
        out["size"] = size;
        const auto traces = enumerate_evolving_equilibria(table, obs, size);
        std::optional<Cost> best;
        for (const auto& t : traces) {
            const Cost c = global_cost(model.costs, m, t, obs);
            best = best ? std::min(*best, c) : c;
        }
        out["traces"] = json::array();
        json strong = json::array(), weak = json::array(), cheapest = json::array();
        for (std::size_t x = 0; x < traces.size(); ++x) {
            json t = report::trace(m, model, obs, traces[x]);
            const bool is_strong = check_strong(table, model, obs, traces[x]);
            const bool is_weak = check_weak(table, model, obs, traces[x]);
            const bool is_cheapest = t["global_cost"].get<Cost>() == *best;
            t["criteria"] = {{"strong", is_strong}, {"weak", is_weak}, {"global-cost", is_cheapest}};
            if (is_strong) strong.push_back(x);
            if (is_weak) weak.push_back(x);
            if (is_cheapest) cheapest.push_back(x);
            out["traces"].push_back(std::move(t));
        }
        out["selection"] = {{"strong", strong}, {"weak", weak}, {"global-cost", cheapest}};
        out["statistics"] = {{"evolving_equilibria", traces.size()}};
        if (traces.empty()) result.exit_code = exit_code::no_equilibrium;
        break;
    }
    case Command::select: {
        const std::size_t size = detail::run_size(flags, obs);
        out["command"] = "select";
        out["size"] = size;
        out["criterion"] = std::string(to_string(flags.criterion));
        std::vector<EquilibriumTrace> chosen;
        switch (flags.criterion) {
        case Criterion::strong: chosen = select_strong(table, model, obs, size); break;
        case Criterion::weak: chosen = select_weak(table, model, obs, size); break;
        case Criterion::global_cost: chosen = min_cost_global(table, model.costs, obs, size); break;
        }
        out["traces"] = json::array();
        for (const auto& t : chosen) out["traces"].push_back(report::trace(m, model, obs, t));
        out["statistics"] = {{"evolving_equilibria", enumerate_evolving_equilibria(table, obs, size).size()},
                             {"selected", chosen.size()}};
        if (chosen.empty()) result.exit_code = exit_code::no_equilibrium;
        break;
    }
    case Command::check: {
        out["command"] = "check";
        const json& doc = flags.trace;
        if (!doc.is_object() || !doc.contains("states") || !doc["states"].is_array())
            throw Error("trace: expected an object with a \"states\" array");
        EvolvingBeliefState states;
        for (const auto& s : doc["states"]) states.push_back(detail::state_from_json(m, s));
        detail::require_size(states.size(), obs);
        auto witnesses = evolving_witnesses(m, obs, states);
        if (doc.contains("kb_configs")) {
            std::vector<KBConfiguration> given;
            for (const auto& k : doc["kb_configs"]) given.push_back(detail::configuration_from_json(m, k));
            const bool listed = std::find(witnesses.begin(), witnesses.end(), given) != witnesses.end();
            out["kb_configs_witness"] = listed;
            witnesses = listed ? std::vector<std::vector<KBConfiguration>>{given}
                               : std::vector<std::vector<KBConfiguration>>{};
        }
        out["is_evolving_equilibrium"] = !witnesses.empty();
        out["witnesses"] = json::array();
        bool prefix_ok = true;
        for (const auto& ks : witnesses) {
            const auto t = make_trace(m, obs, states, ks);
            json w = report::trace(m, model, obs, t);
            w["criteria"] = {{"strong", check_strong(table, model, obs, t)}, {"weak", check_weak(table, model, obs, t)}};
            prefix_ok = prefix_ok && check_prefix_property(m, obs, t);
            out["witnesses"].push_back(std::move(w));
        }
        out["prefix_property"] = prefix_ok;
        if (witnesses.empty()) result.exit_code = exit_code::no_equilibrium;
        break;
    }
    case Command::oracle: {
        out["command"] = "oracle";
        out["steps"] = json::array();
        bool all_match = true;
        const ObservationSequence steps = obs.empty() ? ObservationSequence{empty_observation(m)} : obs;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const auto solver = states_of(table.get(initial_configuration(m), steps[j]));
            const auto oracle = oracle_equilibria(m, steps[j], flags.options);
            json step;
            step["step"] = j + 1;
            step["solver"] = json::array();
            step["oracle"] = json::array();
            for (const auto& s : solver) step["solver"].push_back(report::state(m, s));
            for (const auto& s : oracle) step["oracle"].push_back(report::state(m, s));
            step["status"] = solver == oracle ? "MATCH" : "MISMATCH";
            all_match = all_match && solver == oracle;
            out["steps"].push_back(std::move(step));
        }
        out["status"] = all_match ? "MATCH" : "MISMATCH";
        if (!all_match) result.exit_code = exit_code::oracle_mismatch;
        break;
    }
    }
    return result;
}

// Human-readable rendering of a canonical report.
inline std::string render_text(const nlohmann::json& r) {
    std::string out;
    auto line = [&](const std::string& s) { out += s + "\n"; };
    auto inline_obj = [](const nlohmann::json& o) {
        std::string s;
        for (const auto& [k, v] : o.items()) {
            if (!s.empty()) s += "  ";
            std::string items;
            for (const auto& a : v) items += (items.empty() ? "" : ",") + a.get<std::string>();
            s += k + "={" + items + "}";
        }
        return s;
    };
    auto trace_lines = [&](const nlohmann::json& t, const std::string& label) {
        std::string flags;
        if (t.contains("criteria"))
            for (const auto& [k, v] : t["criteria"].items())
                if (v.get<bool>()) flags += " " + k;
        line(label + (flags.empty() ? "" : " [" + flags.substr(1) + "]") +
             " global cost " + std::to_string(t["global_cost"].get<Cost>()));
        for (std::size_t j = 0; j < t["states"].size(); ++j) {
            line("  step " + std::to_string(j + 1) + ": " + inline_obj(t["states"][j]));
            line("    kb: " + inline_obj(t["kb_configs"][j]));
            if (j < t["applied_next_ops"].size()) {
                line("    next: " + inline_obj(t["applied_next_ops"][j]) + "  distance to next " +
                     t["distances"][j].get<std::string>());
            }
        }
    };

    const auto cmd = r["command"].get<std::string>();
    if (cmd == "solve") {
        line("solve: " + std::to_string(r["count"].get<std::size_t>()) + " equilibria");
        std::size_t x = 0;
        for (const auto& e : r["equilibria"])
            line("  " + std::to_string(++x) + ": " + inline_obj(e["state"]) + "  cost " +
                 std::to_string(e["step_cost"].get<Cost>()));
    } else if (cmd == "evolve" || cmd == "select") {
        std::string head = cmd + " size " + std::to_string(r["size"].get<std::size_t>());
        if (cmd == "select") head += " criterion " + r["criterion"].get<std::string>();
        line(head + ": " + std::to_string(r["traces"].size()) + " traces");
        std::size_t x = 0;
        for (const auto& t : r["traces"]) trace_lines(t, "trace " + std::to_string(++x));
    } else if (cmd == "check") {
        line(std::string("check: ") + (r["is_evolving_equilibrium"].get<bool>() ? "evolving equilibrium"
                                                                               : "not an evolving equilibrium"));
        std::size_t x = 0;
        for (const auto& t : r["witnesses"]) trace_lines(t, "witness " + std::to_string(++x));
    } else if (cmd == "oracle") {
        line("oracle: " + r["status"].get<std::string>());
        for (const auto& s : r["steps"])
            line("  step " + std::to_string(s["step"].get<std::size_t>()) + ": " + s["status"].get<std::string>() +
                 " (" + std::to_string(s["solver"].size()) + " equilibria)");
    }
    return out;
}

} // namespace emcs
