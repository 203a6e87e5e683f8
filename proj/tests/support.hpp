#pragma once

// Test-only helpers: small system builders, an independent brute-force
// answer-set oracle, and a generator of random desk-scale instances.

#include "emcs/emcs.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace emcs::testing {

inline Rule rule(Atom head, AtomSet pos = {}, AtomSet neg = {}) {
    return Rule{std::move(head), std::move(pos), std::move(neg)};
}

inline OperationalFormula add(Atom a) { return {"add", Rule::fact(std::move(a))}; }
inline OperationalFormula del(Atom a) { return {"del", Rule::fact(std::move(a))}; }
inline EvolvingOperationalFormula now(OperationalFormula f) { return {std::move(f), false}; }
inline EvolvingOperationalFormula next(OperationalFormula f) { return {std::move(f), true}; }

inline EvolvingContext context(std::string name, LogicKind kind, AtomSet signature, KnowledgeBase kb = {}) {
    EvolvingContext c;
    c.name = std::move(name);
    c.logic = Logic{kind, std::move(signature)};
    c.kb = std::move(kb);
    return c;
}

inline ObservationContext observer(std::string name, AtomSet language) {
    return ObservationContext{std::move(name), std::move(language), {}};
}

inline BeliefState state(std::vector<BeliefSet> sets) { return BeliefState{std::move(sets)}; }
inline InstantObservation obs(std::vector<AtomSet> sets) { return InstantObservation{std::move(sets)}; }
inline KBConfiguration config(std::vector<KnowledgeBase> kbs) { return KBConfiguration{std::move(kbs)}; }

// One fact-store context c1 over {p}, one observer o1 over {q} and the two
// rules add(p) <- (o1@q) and next(add(p)) <- (o1@q): instantaneous plus
// persistent effect of the same observation.
inline EMCS instant_and_persistent_system() {
    EMCS m;
    auto c = context("c1", LogicKind::factstore, {"p"});
    c.bridge_rules.push_back({now(add("p")), {observed(0, "q")}});
    c.bridge_rules.push_back({next(add("p")), {observed(0, "q")}});
    m.contexts.push_back(std::move(c));
    m.observers.push_back(observer("o1", {"q"}));
    return m;
}

// Answer sets by definition: I is a model of the reduct P^I and no proper
// subset of I is. Enumerates every interpretation over the signature.
inline std::set<BeliefSet> brute_force_answer_sets(const KnowledgeBase& program, const AtomSet& signature) {
    const std::vector<Atom> sig(signature.begin(), signature.end());
    const std::uint32_t total = 1U << sig.size();
    auto subset = [&](std::uint32_t mask) {
        AtomSet s;
        for (std::size_t b = 0; b < sig.size(); ++b)
            if (mask >> b & 1U) s.insert(sig[b]);
        return s;
    };
    auto models_reduct = [&](const AtomSet& model, const AtomSet& guess) {
        for (const auto& r : program) {
            bool removed = false;
            for (const auto& a : r.neg) removed = removed || guess.contains(a);
            if (removed) continue;
            bool body = true;
            for (const auto& a : r.pos) body = body && model.contains(a);
            if (body && !model.contains(r.head)) return false;
        }
        return true;
    };
    std::set<BeliefSet> out;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
        const AtomSet guess = subset(mask);
        if (!models_reduct(guess, guess)) continue;
        bool minimal = true;
        for (std::uint32_t sub = (mask - 1) & mask; minimal && sub != mask; sub = (sub - 1) & mask) {
            if (models_reduct(subset(sub), guess)) minimal = false;
            if (sub == 0) break;
        }
        if (minimal) out.insert(guess);
    }
    return out;
}

struct Shape {
    std::size_t max_contexts = 3;
    std::size_t max_observers = 2;
    std::size_t max_signature = 4;
    std::size_t max_bridge_rules = 5;
    std::size_t max_steps = 4;
    Cost max_cost = 3;
};

struct Instance {
    EMCS system;
    ObservationSequence observations;
};

class Generator {
public:
    explicit Generator(std::uint64_t seed, Shape shape = {}) : rng_(seed), shape_(shape) {}

    Instance next() {
        Instance inst;
        EMCS& m = inst.system;
        const std::size_t n = pick(1, shape_.max_contexts);
        const std::size_t l = pick(0, shape_.max_observers);
        static const std::vector<Atom> belief_atoms{"a", "b", "c", "d", "e", "f"};
        static const std::vector<Atom> obs_atoms{"q", "r", "s"};

        for (std::size_t i = 0; i < n; ++i) {
            const auto kind = coin(0.6) ? LogicKind::asp : LogicKind::factstore;
            AtomSet sig;
            const std::size_t size = pick(1, shape_.max_signature);
            while (sig.size() < size) sig.insert(belief_atoms[pick(0, belief_atoms.size() - 1)]);
            auto c = context("c" + std::to_string(i + 1), kind, sig);
            c.costs["add"] = pick(0, shape_.max_cost);
            c.costs["del"] = pick(0, shape_.max_cost);
            if (kind == LogicKind::factstore) {
                for (const auto& a : sig)
                    if (coin(0.4)) c.kb.insert(Rule::fact(a));
            } else {
                const std::size_t rules = pick(0, 4);
                for (std::size_t k = 0; k < rules; ++k) c.kb.insert(random_rule(sig, true));
            }
            m.contexts.push_back(std::move(c));
        }
        for (std::size_t r = 0; r < l; ++r) {
            AtomSet lang;
            const std::size_t size = pick(1, obs_atoms.size());
            while (lang.size() < size) lang.insert(obs_atoms[pick(0, obs_atoms.size() - 1)]);
            m.observers.push_back(observer("o" + std::to_string(r + 1), lang));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t rules = pick(0, shape_.max_bridge_rules);
            for (std::size_t k = 0; k < rules; ++k) {
                BridgeRule br;
                const auto& ctx = m.contexts[i];
                br.head.deferred = coin(0.5);
                br.head.inner.op = coin(0.7) ? "add" : "del";
                br.head.inner.arg = random_rule(ctx.logic.signature, ctx.logic.kind == LogicKind::asp && coin(0.3));
                const std::size_t body = pick(0, 3);
                for (std::size_t b = 0; b < body; ++b) {
                    if (l > 0 && coin(0.4)) {
                        const std::size_t r = pick(0, l - 1);
                        br.body.insert(observed(r, any_of(m.observers[r].language), coin(0.3)));
                    } else {
                        const std::size_t r = pick(0, n - 1);
                        br.body.insert(belief(r, any_of(m.contexts[r].logic.signature), coin(0.4)));
                    }
                }
                m.contexts[i].bridge_rules.push_back(std::move(br));
            }
        }
        const std::size_t steps = pick(1, shape_.max_steps);
        for (std::size_t j = 0; j < steps; ++j) {
            InstantObservation o = empty_observation(m);
            for (std::size_t r = 0; r < l; ++r)
                for (const auto& a : m.observers[r].language)
                    if (coin(0.5)) o[r].insert(a);
            inst.observations.push_back(std::move(o));
        }
        return inst;
    }

    std::mt19937_64& rng() { return rng_; }

    std::size_t pick(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

    Atom any_of(const AtomSet& s) {
        auto it = s.begin();
        std::advance(it, static_cast<std::ptrdiff_t>(pick(0, s.size() - 1)));
        return *it;
    }

    BeliefSet subset_of(const AtomSet& s) {
        BeliefSet out;
        for (const auto& a : s)
            if (coin(0.5)) out.insert(a);
        return out;
    }

private:
    Rule random_rule(const AtomSet& sig, bool with_body) {
        Rule r = Rule::fact(any_of(sig));
        if (!with_body) return r;
        const std::size_t pos = pick(0, 1);
        const std::size_t neg = pick(0, 2);
        for (std::size_t k = 0; k < pos; ++k) r.pos.insert(any_of(sig));
        for (std::size_t k = 0; k < neg; ++k) r.neg.insert(any_of(sig));
        return r;
    }

    std::mt19937_64 rng_;
    Shape shape_;
};

} // namespace emcs::testing
