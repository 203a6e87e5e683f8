#pragma once

// Evolving equilibria over observation sequences. Every kb-configuration
// branch produced by a nondeterministic management function is kept, so two
// traces may share their belief states and differ only in configurations.

#include "equilibrium.hpp"
#include "errors.hpp"
#include "system.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <set>
#include <utility>
#include <vector>

namespace emcs {

using ObservationSequence = std::vector<InstantObservation>;
using EvolvingBeliefState = std::vector<BeliefState>;

struct EquilibriumTrace {
    EvolvingBeliefState states;
    std::vector<KBConfiguration> kb_configs;
    // applied_next_ops[j][i] = app_i^next(states[j], Obs[j]) for j < size()-1
    std::vector<std::vector<OperationSet>> applied_next_ops;

    std::size_t size() const { return states.size(); }

    auto operator<=>(const EquilibriumTrace&) const = default;
    bool operator==(const EquilibriumTrace&) const = default;
};

inline std::vector<OperationSet> next_operations(const EMCS& m, const BeliefState& s, const InstantObservation& obs) {
    std::vector<OperationSet> out;
    for (std::size_t i = 0; i < m.contexts.size(); ++i) out.push_back(app_next(m, i, s, obs));
    return out;
}

// NextKB(S, O, K): every combination of per-context mng results.
inline std::set<KBConfiguration> next_kb(const EMCS& m, const BeliefState& s, const InstantObservation& obs,
                                         const KBConfiguration& k) {
    require_shape(m, s);
    require_shape(m, k);
    std::set<KBConfiguration> out{KBConfiguration{}};
    for (std::size_t i = 0; i < m.contexts.size(); ++i) {
        const auto options = mng(m.contexts[i], app_next(m, i, s, obs), k[i]);
        std::set<KBConfiguration> grown;
        for (const auto& prefix : out) {
            for (const auto& kb : options) {
                auto c = prefix;
                c.kbs.push_back(kb);
                grown.insert(std::move(c));
            }
        }
        out = std::move(grown);
    }
    return out;
}

namespace detail {

inline void require_size(std::size_t size, const ObservationSequence& obs) {
    if (size == 0) throw Error("evolving belief states have size at least 1");
    if (size > obs.size()) throw SizeExceedsObservations(size, obs.size());
}

} // namespace detail

// All evolving equilibria of the given size, each with its configuration
// branch, expanded breadth-first by time step and returned in canonical order.
inline std::vector<EquilibriumTrace> enumerate_evolving_equilibria(EquilibriumTable& table,
                                                                   const ObservationSequence& obs,
                                                                   std::size_t size) {
    const EMCS& m = table.system();
    detail::require_size(size, obs);
    for (const auto& o : obs) require_shape(m, o);

    const std::size_t budget = table.options().budget;
    std::size_t expanded = 0;
    std::vector<EquilibriumTrace> frontier(1);
    frontier.front().kb_configs.push_back(initial_configuration(m));

    for (std::size_t j = 0; j < size; ++j) {
        std::vector<EquilibriumTrace> grown;
        for (const auto& partial : frontier) {
            const auto& k = partial.kb_configs.back();
            for (const auto& eq : table.get(k, obs[j])) {
                if (++expanded > budget)
                    throw BudgetExceeded("evolving equilibrium search exceeded budget of " + std::to_string(budget));
                auto t = partial;
                t.states.push_back(eq.state);
                if (j + 1 == size) {
                    grown.push_back(std::move(t));
                    continue;
                }
                t.applied_next_ops.push_back(next_operations(m, eq.state, obs[j]));
                for (const auto& next : next_kb(m, eq.state, obs[j], k)) {
                    auto branch = t;
                    branch.kb_configs.push_back(next);
                    grown.push_back(std::move(branch));
                }
            }
        }
        frontier = std::move(grown);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

inline std::vector<EquilibriumTrace> enumerate_evolving_equilibria(const EMCS& m, const ObservationSequence& obs,
                                                                   std::size_t size,
                                                                   const SolverOptions& options = {}) {
    EquilibriumTable table(m, options);
    return enumerate_evolving_equilibria(table, obs, size);
}

// Every kb-configuration sequence witnessing `states` as an evolving
// equilibrium given obs. Empty when it is not one.
inline std::vector<std::vector<KBConfiguration>> evolving_witnesses(const EMCS& m, const ObservationSequence& obs,
                                                                    const EvolvingBeliefState& states) {
    detail::require_size(states.size(), obs);
    std::vector<std::vector<KBConfiguration>> frontier{{initial_configuration(m)}};
    for (std::size_t j = 0; j < states.size(); ++j) {
        std::vector<std::vector<KBConfiguration>> grown;
        for (const auto& seq : frontier) {
            if (!is_equilibrium(m, seq.back(), obs[j], states[j])) continue;
            if (j + 1 == states.size()) {
                grown.push_back(seq);
                continue;
            }
            for (const auto& next : next_kb(m, states[j], obs[j], seq.back())) {
                auto extended = seq;
                extended.push_back(next);
                grown.push_back(std::move(extended));
            }
        }
        frontier = std::move(grown);
    }
    std::sort(frontier.begin(), frontier.end());
    return frontier;
}

inline bool is_evolving_equilibrium(const EMCS& m, const ObservationSequence& obs, const EvolvingBeliefState& states) {
    return !evolving_witnesses(m, obs, states).empty();
}

// Rebuilds the applied next-operations of a trace from its states.
inline EquilibriumTrace make_trace(const EMCS& m, const ObservationSequence& obs, EvolvingBeliefState states,
                                   std::vector<KBConfiguration> kb_configs) {
    detail::require_size(states.size(), obs);
    EquilibriumTrace t{std::move(states), std::move(kb_configs), {}};
    for (std::size_t j = 0; j + 1 < t.size(); ++j) t.applied_next_ops.push_back(next_operations(m, t.states[j], obs[j]));
    return t;
}

// Every prefix of the trace is an evolving equilibrium given every
// observation prefix at least as long.
inline bool check_prefix_property(const EMCS& m, const ObservationSequence& obs, const EquilibriumTrace& trace) {
    for (std::size_t j = 1; j <= trace.size(); ++j) {
        EvolvingBeliefState prefix(trace.states.begin(), trace.states.begin() + static_cast<std::ptrdiff_t>(j));
        for (std::size_t k = j; k <= obs.size(); ++k) {
            ObservationSequence obs_prefix(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(k));
            if (!is_evolving_equilibrium(m, obs_prefix, prefix)) return false;
        }
    }
    return true;
}

} // namespace emcs
