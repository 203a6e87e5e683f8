#pragma once

// Minimal change over evolving equilibria: operation costs, distances
// between belief states, and the strong, weak and global-cost criteria.

#include "equilibrium.hpp"
#include "evolution.hpp"
#include "system.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emcs {

enum class Aggregator { max, avg };

inline std::string_view to_string(Aggregator a) { return a == Aggregator::max ? "max" : "avg"; }

struct CostModel {
    std::vector<std::map<std::string, Cost>> per_context;

    static CostModel of(const EMCS& m) {
        CostModel c;
        for (const auto& ctx : m.contexts) c.per_context.push_back(ctx.costs);
        return c;
    }

    Cost cost(std::size_t i, const std::string& op) const {
        const auto& table = per_context.at(i);
        auto it = table.find(op);
        if (it == table.end()) throw MalformedSystem("no cost for operation '" + op + "'");
        return it->second;
    }

    bool operator==(const CostModel&) const = default;
};

struct DistanceModel {
    std::vector<BeliefSetDistance> per_context;
    Aggregator aggregator = Aggregator::max;

    static DistanceModel of(const EMCS& m, Aggregator aggregator) {
        DistanceModel d;
        for (const auto& ctx : m.contexts) d.per_context.push_back(ctx.distance);
        d.aggregator = aggregator;
        return d;
    }

    bool operator==(const DistanceModel&) const = default;
};

struct ChangeModel {
    CostModel costs;
    DistanceModel distance;

    static ChangeModel of(const EMCS& m, Aggregator aggregator = Aggregator::max) {
        return {CostModel::of(m), DistanceModel::of(m, aggregator)};
    }
};

// Cost(S, O): summed cost of every applicable next-operation over all contexts.
inline Cost step_cost(const CostModel& model, const EMCS& m, const BeliefState& s, const InstantObservation& obs) {
    Cost total = 0;
    for (std::size_t i = 0; i < m.contexts.size(); ++i)
        for (const auto& f : app_next(m, i, s, obs)) total += model.cost(i, f.op);
    return total;
}

inline Rational belief_distance(const DistanceModel& model, const BeliefState& a, const BeliefState& b) {
    if (a.size() != b.size() || a.size() != model.per_context.size())
        throw MalformedSystem("belief states do not match the distance model");
    Rational acc_max(0);
    Rational acc_sum(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Rational d = model.per_context[i](a[i], b[i]);
        acc_max = std::max(acc_max, d);
        acc_sum += d;
    }
    if (model.aggregator == Aggregator::max) return acc_max;
    return acc_sum / static_cast<std::int64_t>(a.size());
}

// Equilibria of M[k] given obs that no other equilibrium undercuts with a
// strictly smaller set of next-operations in every context.
inline std::vector<BeliefState> min_eq(EquilibriumTable& table, const KBConfiguration& k,
                                       const InstantObservation& obs) {
    const EMCS& m = table.system();
    const auto& eqs = table.get(k, obs);
    std::vector<std::vector<OperationSet>> ops;
    for (const auto& e : eqs) ops.push_back(next_operations(m, e.state, obs));

    auto strictly_inside = [](const OperationSet& a, const OperationSet& b) {
        return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    std::vector<BeliefState> out;
    for (std::size_t x = 0; x < eqs.size(); ++x) {
        bool dominated = false;
        for (std::size_t y = 0; y < eqs.size() && !dominated; ++y) {
            bool all = true;
            for (std::size_t i = 0; i < m.contexts.size() && all; ++i) all = strictly_inside(ops[y][i], ops[x][i]);
            dominated = all;
        }
        if (!dominated) out.push_back(eqs[x].state);
    }
    return out;
}

// Equilibria of M[k] given obs with the least step cost.
inline std::vector<BeliefState> min_cost(EquilibriumTable& table, const CostModel& model, const KBConfiguration& k,
                                         const InstantObservation& obs) {
    const EMCS& m = table.system();
    std::vector<BeliefState> out;
    std::optional<Cost> best;
    for (const auto& e : table.get(k, obs)) {
        const Cost c = step_cost(model, m, e.state, obs);
        if (!best || c < *best) {
            best = c;
            out.clear();
        }
        if (c == *best) out.push_back(e.state);
    }
    return out;
}

using StateAndConfiguration = std::pair<BeliefState, KBConfiguration>;

// Pairs (S', K') with K' ∈ NextKB(S, obs_j, k) and S' cost-minimal for
// M[K'] given obs_next, keeping only those closest to S across all K'.
inline std::vector<StateAndConfiguration> min_next(EquilibriumTable& table, const ChangeModel& model,
                                                   const BeliefState& s, const InstantObservation& obs_j,
                                                   const InstantObservation& obs_next, const KBConfiguration& k) {
    std::vector<std::pair<Rational, StateAndConfiguration>> scored;
    for (const auto& next : next_kb(table.system(), s, obs_j, k))
        for (auto& cand : min_cost(table, model.costs, next, obs_next))
            scored.push_back({belief_distance(model.distance, s, cand), {std::move(cand), next}});

    std::vector<StateAndConfiguration> out;
    if (scored.empty()) return out;
    Rational best = scored.front().first;
    for (const auto& [d, _] : scored) best = std::min(best, d);
    for (auto& [d, pair] : scored)
        if (d == best) out.push_back(std::move(pair));
    std::sort(out.begin(), out.end());
    return out;
}

// States of min_cost(M[k], obs) closest to S, for this k only.
inline std::vector<BeliefState> min_dist(EquilibriumTable& table, const ChangeModel& model, const BeliefState& s,
                                         const InstantObservation& obs, const KBConfiguration& k) {
    auto cands = min_cost(table, model.costs, k, obs);
    std::vector<BeliefState> out;
    std::optional<Rational> best;
    for (auto& c : cands) {
        const Rational d = belief_distance(model.distance, s, c);
        if (!best || d < *best) {
            best = d;
            out.clear();
        }
        if (d == *best) out.push_back(std::move(c));
    }
    return out;
}

namespace detail {

template <class Range, class Value>
bool contains(const Range& r, const Value& v) {
    return std::find(r.begin(), r.end(), v) != r.end();
}

inline void require_trace_shape(const EquilibriumTrace& t, const ObservationSequence& obs) {
    require_size(t.size(), obs);
    if (t.kb_configs.size() != t.size()) throw MalformedSystem("trace has a kb configuration count unequal to its size");
}

inline bool every_step_min_cost(EquilibriumTable& table, const ChangeModel& model, const ObservationSequence& obs,
                                const EquilibriumTrace& t) {
    for (std::size_t j = 0; j < t.size(); ++j)
        if (!contains(min_cost(table, model.costs, t.kb_configs[j], obs[j]), t.states[j])) return false;
    return true;
}

} // namespace detail

inline bool check_strong(EquilibriumTable& table, const ChangeModel& model, const ObservationSequence& obs,
                         const EquilibriumTrace& t) {
    detail::require_trace_shape(t, obs);
    if (!detail::every_step_min_cost(table, model, obs, t)) return false;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const auto allowed = min_next(table, model, t.states[j], obs[j], obs[j + 1], t.kb_configs[j]);
        if (!detail::contains(allowed, StateAndConfiguration{t.states[j + 1], t.kb_configs[j + 1]})) return false;
    }
    return true;
}

inline bool check_weak(EquilibriumTable& table, const ChangeModel& model, const ObservationSequence& obs,
                       const EquilibriumTrace& t) {
    detail::require_trace_shape(t, obs);
    if (!detail::every_step_min_cost(table, model, obs, t)) return false;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        const auto allowed = min_dist(table, model, t.states[j], obs[j + 1], t.kb_configs[j + 1]);
        if (!detail::contains(allowed, t.states[j + 1])) return false;
    }
    return true;
}

inline std::vector<EquilibriumTrace> select_strong(EquilibriumTable& table, const ChangeModel& model,
                                                   const ObservationSequence& obs, std::size_t size) {
    std::vector<EquilibriumTrace> out;
    for (auto& t : enumerate_evolving_equilibria(table, obs, size))
        if (check_strong(table, model, obs, t)) out.push_back(std::move(t));
    return out;
}

inline std::vector<EquilibriumTrace> select_weak(EquilibriumTable& table, const ChangeModel& model,
                                                 const ObservationSequence& obs, std::size_t size) {
    std::vector<EquilibriumTrace> out;
    for (auto& t : enumerate_evolving_equilibria(table, obs, size))
        if (check_weak(table, model, obs, t)) out.push_back(std::move(t));
    return out;
}

// Cost(S_e, Obs): step costs summed over the trace.
inline Cost global_cost(const CostModel& model, const EMCS& m, const EquilibriumTrace& t,
                        const ObservationSequence& obs) {
    detail::require_size(t.size(), obs);
    Cost total = 0;
    for (std::size_t j = 0; j < t.size(); ++j) total += step_cost(model, m, t.states[j], obs[j]);
    return total;
}

// Evolving equilibria of the given size with the least global cost.
inline std::vector<EquilibriumTrace> min_cost_global(EquilibriumTable& table, const CostModel& model,
                                                     const ObservationSequence& obs, std::size_t size) {
    std::vector<EquilibriumTrace> out;
    std::optional<Cost> best;
    for (auto& t : enumerate_evolving_equilibria(table, obs, size)) {
        const Cost c = global_cost(model, table.system(), t, obs);
        if (!best || c < *best) {
            best = c;
            out.clear();
        }
        if (c == *best) out.push_back(std::move(t));
    }
    return out;
}

} // namespace emcs
