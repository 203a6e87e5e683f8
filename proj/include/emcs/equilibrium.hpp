#pragma once

// Static equilibria of an eMCS for one instant observation.
//
// The solver guesses, per context, which bridge-rule heads are applicable,
// derives candidate belief sets from acc over mng(guessed now-heads, kb_i),
// assembles candidates context by context and keeps only assemblies whose
// actual applicable heads equal the guess. Heads whose rules are decided by
// the observation alone are fixed before guessing, and each head is
// re-checked as soon as every context its rule bodies query is assigned.

#include "errors.hpp"
#include "logic.hpp"
#include "system.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace emcs {

struct SolverOptions {
    // Maximum number of (partial or complete) candidate assemblies per solve.
    std::size_t budget = 1'000'000;
    // Maximum number of belief states the brute-force oracle may enumerate.
    std::size_t oracle_cap = std::size_t{1} << 20;
};

struct EquilibriumWitness {
    BeliefState state;
    KBConfiguration witness_kbs;

    auto operator<=>(const EquilibriumWitness&) const = default;
    bool operator==(const EquilibriumWitness&) const = default;
};

// Witness for S being an equilibrium of M[k] given obs, or nullopt.
inline std::optional<EquilibriumWitness> equilibrium_witness(const EMCS& m, const KBConfiguration& k,
                                                            const InstantObservation& obs, const BeliefState& s) {
    require_shape(m, k);
    require_shape(m, obs);
    require_shape(m, s);
    EquilibriumWitness w{s, {}};
    for (std::size_t i = 0; i < m.contexts.size(); ++i) {
        const auto& ctx = m.contexts[i];
        std::optional<KnowledgeBase> found;
        for (const auto& kb : mng(ctx, app_now(m, i, s, obs), k[i])) {
            if (is_acceptable(ctx.logic, kb, s[i])) {
                found = kb;
                break;
            }
        }
        if (!found) return std::nullopt;
        w.witness_kbs.kbs.push_back(std::move(*found));
    }
    return w;
}

inline std::optional<EquilibriumWitness> equilibrium_witness(const EMCS& m, const InstantObservation& obs,
                                                            const BeliefState& s) {
    return equilibrium_witness(m, initial_configuration(m), obs, s);
}

inline bool is_equilibrium(const EMCS& m, const KBConfiguration& k, const InstantObservation& obs,
                           const BeliefState& s) {
    return equilibrium_witness(m, k, obs, s).has_value();
}

inline bool is_equilibrium(const EMCS& m, const InstantObservation& obs, const BeliefState& s) {
    return equilibrium_witness(m, obs, s).has_value();
}

namespace detail {

// A distinct now-head of one context together with the belief-literal
// residue of every rule that can still fire under the current observation.
struct HeadInfo {
    OperationalFormula op;
    bool forced = false;
    std::vector<std::vector<BridgeLiteral>> residual_bodies;
    std::size_t trigger = 0; // depth at which applicability becomes decidable
};

struct Candidate {
    OperationSet guess;
    BeliefSet beliefs;
    KnowledgeBase witness;
};

inline std::vector<HeadInfo> classify_heads(const EMCS& m, std::size_t i, const InstantObservation& obs) {
    std::map<OperationalFormula, HeadInfo> by_head;
    for (const auto& br : m.contexts[i].bridge_rules) {
        if (br.head.deferred) continue;
        auto& info = by_head[br.head.inner];
        info.op = br.head.inner;
        std::vector<BridgeLiteral> residue;
        bool dead = false;
        for (const auto& lit : br.body) {
            if (lit.kind == LiteralKind::observation) {
                if (lit.target >= obs.size()) throw MalformedSystem("observation literal index out of range");
                if (obs[lit.target].contains(lit.atom) == lit.negated) dead = true;
            } else {
                if (lit.target >= m.contexts.size()) throw MalformedSystem("belief literal index out of range");
                residue.push_back(lit);
            }
        }
        if (dead) continue;
        if (residue.empty()) info.forced = true;
        info.residual_bodies.push_back(std::move(residue));
    }
    std::vector<HeadInfo> out;
    for (auto& [op, info] : by_head) {
        if (info.residual_bodies.empty()) continue; // never applicable
        info.trigger = i;
        for (const auto& body : info.residual_bodies)
            for (const auto& lit : body) info.trigger = std::max(info.trigger, lit.target);
        out.push_back(std::move(info));
    }
    return out;
}

inline std::vector<Candidate> context_candidates(const EvolvingContext& ctx, const KnowledgeBase& kb,
                                                 const std::vector<HeadInfo>& heads) {
    OperationSet forced;
    std::vector<const HeadInfo*> free;
    for (const auto& h : heads) {
        if (h.forced) forced.insert(h.op);
        else free.push_back(&h);
    }
    if (free.size() > 20) throw BudgetExceeded("context " + ctx.name + ": too many undecided bridge-rule heads");

    std::vector<Candidate> out;
    const std::uint64_t total = std::uint64_t{1} << free.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        OperationSet guess = forced;
        for (std::size_t b = 0; b < free.size(); ++b)
            if (mask >> b & 1U) guess.insert(free[b]->op);
        std::set<BeliefSet> seen;
        for (const auto& next_kb : mng(ctx, guess, kb)) {
            for (auto& s : acc(ctx.logic, next_kb)) {
                if (!seen.insert(s).second) continue;
                out.push_back({guess, s, next_kb});
            }
        }
    }
    return out;
}

inline bool body_holds(const std::vector<BridgeLiteral>& body, const BeliefState& partial) {
    return std::all_of(body.begin(), body.end(), [&](const BridgeLiteral& lit) {
        return partial[lit.target].contains(lit.atom) != lit.negated;
    });
}

class Assembler {
public:
    Assembler(const EMCS& m, const KBConfiguration& k, const InstantObservation& obs, std::size_t budget)
        : budget_(budget) {
        const std::size_t n = m.contexts.size();
        heads_.resize(n);
        candidates_.resize(n);
        checks_at_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            heads_[i] = classify_heads(m, i, obs);
            candidates_[i] = context_candidates(m.contexts[i], k[i], heads_[i]);
            for (std::size_t h = 0; h < heads_[i].size(); ++h)
                if (!heads_[i][h].forced) checks_at_[heads_[i][h].trigger].emplace_back(i, h);
        }
        partial_.sets.resize(n);
        chosen_.resize(n);
    }

    std::vector<EquilibriumWitness> run() {
        extend(0);
        std::sort(found_.begin(), found_.end());
        return std::move(found_);
    }

private:
    void extend(std::size_t depth) {
        if (depth == candidates_.size()) {
            EquilibriumWitness w;
            w.state = partial_;
            for (const auto* c : chosen_) w.witness_kbs.kbs.push_back(c->witness);
            found_.push_back(std::move(w));
            return;
        }
        for (const auto& cand : candidates_[depth]) {
            if (++visited_ > budget_)
                throw BudgetExceeded("equilibrium search exceeded budget of " + std::to_string(budget_) +
                                     " candidate states");
            partial_[depth] = cand.beliefs;
            chosen_[depth] = &cand;
            if (consistent(depth)) extend(depth + 1);
        }
        partial_[depth].clear();
    }

    bool consistent(std::size_t depth) const {
        for (const auto& [i, h] : checks_at_[depth]) {
            const auto& info = heads_[i][h];
            bool applicable = std::any_of(info.residual_bodies.begin(), info.residual_bodies.end(),
                                          [&](const auto& body) { return body_holds(body, partial_); });
            if (applicable != chosen_[i]->guess.contains(info.op)) return false;
        }
        return true;
    }

    std::size_t budget_;
    std::size_t visited_ = 0;
    std::vector<std::vector<HeadInfo>> heads_;
    std::vector<std::vector<Candidate>> candidates_;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> checks_at_;
    BeliefState partial_;
    std::vector<const Candidate*> chosen_;
    std::vector<EquilibriumWitness> found_;
};

} // namespace detail

// All equilibria of M[k] given obs, ordered by belief state.
inline std::vector<EquilibriumWitness> enumerate_equilibria(const EMCS& m, const KBConfiguration& k,
                                                            const InstantObservation& obs,
                                                            const SolverOptions& options = {}) {
    require_shape(m, k);
    require_shape(m, obs);
    return detail::Assembler(m, k, obs, options.budget).run();
}

inline std::vector<EquilibriumWitness> enumerate_equilibria(const EMCS& m, const InstantObservation& obs,
                                                            const SolverOptions& options = {}) {
    return enumerate_equilibria(m, initial_configuration(m), obs, options);
}

// Reference enumeration: every combination of signature subsets, filtered by
// the definition of equilibrium.
inline std::vector<BeliefState> oracle_equilibria(const EMCS& m, const KBConfiguration& k,
                                                  const InstantObservation& obs, const SolverOptions& options = {}) {
    require_shape(m, k);
    require_shape(m, obs);
    std::vector<std::vector<BeliefSet>> subsets;
    std::size_t space = 1;
    for (const auto& ctx : m.contexts) {
        const std::vector<Atom> sig(ctx.logic.signature.begin(), ctx.logic.signature.end());
        if (sig.size() >= 31) throw OracleCapExceeded("signature of " + ctx.name + " too large for the oracle");
        const std::size_t count = std::size_t{1} << sig.size();
        if (space > options.oracle_cap / count)
            throw OracleCapExceeded("oracle state space exceeds cap of " + std::to_string(options.oracle_cap));
        space *= count;
        auto& all = subsets.emplace_back();
        for (std::size_t mask = 0; mask < count; ++mask) {
            BeliefSet s;
            for (std::size_t b = 0; b < sig.size(); ++b)
                if (mask >> b & 1U) s.insert(sig[b]);
            all.push_back(std::move(s));
        }
    }

    std::vector<BeliefState> out;
    std::vector<std::size_t> digit(m.contexts.size(), 0);
    BeliefState s;
    s.sets.resize(m.contexts.size());
    for (std::size_t counter = 0; counter < space; ++counter) {
        for (std::size_t i = 0; i < digit.size(); ++i) s[i] = subsets[i][digit[i]];
        if (is_equilibrium(m, k, obs, s)) out.push_back(s);
        for (std::size_t i = 0; i < digit.size(); ++i) {
            if (++digit[i] < subsets[i].size()) break;
            digit[i] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<BeliefState> oracle_equilibria(const EMCS& m, const InstantObservation& obs,
                                                  const SolverOptions& options = {}) {
    return oracle_equilibria(m, initial_configuration(m), obs, options);
}

inline std::vector<BeliefState> states_of(const std::vector<EquilibriumWitness>& ws) {
    std::vector<BeliefState> out;
    out.reserve(ws.size());
    for (const auto& w : ws) out.push_back(w.state);
    return out;
}

// Memoised equilibria per (kb configuration, observation), for callers that
// revisit the same configurations many times. Not thread-safe.
class EquilibriumTable {
public:
    EquilibriumTable(const EMCS& m, SolverOptions options = {}) : m_(m), options_(options) {}

    const std::vector<EquilibriumWitness>& get(const KBConfiguration& k, const InstantObservation& obs) {
        auto key = std::make_pair(k, obs);
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(std::move(key), enumerate_equilibria(m_, k, obs, options_)).first;
        return it->second;
    }

    const EMCS& system() const { return m_; }
    const SolverOptions& options() const { return options_; }

private:
    const EMCS& m_;
    SolverOptions options_;
    std::map<std::pair<KBConfiguration, InstantObservation>, std::vector<EquilibriumWitness>> cache_;
};

} // namespace emcs
