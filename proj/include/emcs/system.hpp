#pragma once

// Structure of an evolving multi-context system: evolving contexts with
// bridge rules and management functions, observation contexts, belief
// states, instant observations and knowledge-base configurations.

#include "errors.hpp"
#include "logic.hpp"

#include <boost/rational.hpp>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace emcs {

using Rational = boost::rational<std::int64_t>;
using Cost = std::uint64_t;

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// op(s): an operation of the management base applied to a kb-element.
struct OperationalFormula {
    std::string op;
    Rule arg;

    auto operator<=>(const OperationalFormula&) const = default;
    bool operator==(const OperationalFormula&) const = default;
};

// op(s) or next(op(s)).
struct EvolvingOperationalFormula {
    OperationalFormula inner;
    bool deferred = false;

    auto operator<=>(const EvolvingOperationalFormula&) const = default;
    bool operator==(const EvolvingOperationalFormula&) const = default;
};

inline std::string to_string(const OperationalFormula& f) { return f.op + "(" + to_string(f.arg) + ")"; }

inline std::string to_string(const EvolvingOperationalFormula& f) {
    return f.deferred ? "next(" + to_string(f.inner) + ")" : to_string(f.inner);
}

enum class LiteralKind { belief, observation };

// (r:b), (r@b) or their default negations. `target` is a 0-based index into
// the contexts (belief) or the observers (observation).
struct BridgeLiteral {
    bool negated = false;
    LiteralKind kind = LiteralKind::belief;
    std::size_t target = 0;
    Atom atom;

    BridgeLiteral negate() const { return {!negated, kind, target, atom}; }

    auto operator<=>(const BridgeLiteral&) const = default;
    bool operator==(const BridgeLiteral&) const = default;
};

inline BridgeLiteral belief(std::size_t r, Atom b, bool negated = false) {
    return {negated, LiteralKind::belief, r, std::move(b)};
}
inline BridgeLiteral observed(std::size_t r, Atom b, bool negated = false) {
    return {negated, LiteralKind::observation, r, std::move(b)};
}

struct BridgeRule {
    EvolvingOperationalFormula head;
    std::set<BridgeLiteral> body;

    auto operator<=>(const BridgeRule&) const = default;
    bool operator==(const BridgeRule&) const = default;
};

// Per-context distance between belief sets. Equality compares names only.
struct BeliefSetDistance {
    std::string name;
    std::function<Rational(const BeliefSet&, const BeliefSet&)> fn;

    Rational operator()(const BeliefSet& a, const BeliefSet& b) const { return fn(a, b); }
    bool operator==(const BeliefSetDistance& o) const { return name == o.name; }
};

// |a Δ b|
inline BeliefSetDistance symdiff_distance() {
    return {"symdiff", [](const BeliefSet& a, const BeliefSet& b) {
                std::int64_t n = 0;
                for (const auto& x : a) n += b.contains(x) ? 0 : 1;
                for (const auto& x : b) n += a.contains(x) ? 0 : 1;
                return Rational(n);
            }};
}

inline const std::set<std::string>& builtin_management_base() {
    static const std::set<std::string> ops{"add", "del"};
    return ops;
}

struct EvolvingContext {
    std::string name;
    Logic logic;
    KnowledgeBase kb;
    std::vector<BridgeRule> bridge_rules;
    std::set<std::string> management_base = builtin_management_base();
    std::map<std::string, Cost> costs{{"add", 1}, {"del", 1}};
    BeliefSetDistance distance = symdiff_distance();

    bool operator==(const EvolvingContext&) const = default;
};

struct ObservationContext {
    std::string name;
    AtomSet language;
    AtomSet current;

    bool operator==(const ObservationContext&) const = default;
};

struct EMCS {
    std::vector<EvolvingContext> contexts;
    std::vector<ObservationContext> observers;

    bool operator==(const EMCS&) const = default;
};

// One belief set per evolving context.
struct BeliefState {
    std::vector<BeliefSet> sets;

    std::size_t size() const { return sets.size(); }
    const BeliefSet& operator[](std::size_t i) const { return sets[i]; }
    BeliefSet& operator[](std::size_t i) { return sets[i]; }

    auto operator<=>(const BeliefState&) const = default;
    bool operator==(const BeliefState&) const = default;
};

// One observation set per observation context.
struct InstantObservation {
    std::vector<AtomSet> sets;

    std::size_t size() const { return sets.size(); }
    const AtomSet& operator[](std::size_t i) const { return sets[i]; }
    AtomSet& operator[](std::size_t i) { return sets[i]; }

    auto operator<=>(const InstantObservation&) const = default;
    bool operator==(const InstantObservation&) const = default;
};

// One knowledge base per evolving context.
struct KBConfiguration {
    std::vector<KnowledgeBase> kbs;

    std::size_t size() const { return kbs.size(); }
    const KnowledgeBase& operator[](std::size_t i) const { return kbs[i]; }
    KnowledgeBase& operator[](std::size_t i) { return kbs[i]; }

    auto operator<=>(const KBConfiguration&) const = default;
    bool operator==(const KBConfiguration&) const = default;
};

using OperationSet = std::set<OperationalFormula>;

inline KBConfiguration initial_configuration(const EMCS& m) {
    KBConfiguration k;
    for (const auto& c : m.contexts) k.kbs.push_back(c.kb);
    return k;
}

inline InstantObservation empty_observation(const EMCS& m) {
    return InstantObservation{std::vector<AtomSet>(m.observers.size())};
}

inline InstantObservation current_observation(const EMCS& m) {
    InstantObservation o;
    for (const auto& ob : m.observers) o.sets.push_back(ob.current);
    return o;
}

// Throws MalformedSystem naming the first violated structural invariant.
inline void validate_system(const EMCS& m) {
    if (m.contexts.empty()) throw MalformedSystem("a system needs at least one evolving context");
    for (const auto& ob : m.observers) {
        if (!std::includes(ob.language.begin(), ob.language.end(), ob.current.begin(), ob.current.end()))
            throw MalformedSystem("observer " + ob.name + ": current observation outside its language");
    }
    for (const auto& c : m.contexts) {
        const auto where = "context " + c.name + ": ";
        if (auto v = validate_kb(c.logic, c.kb); !v.empty())
            throw MalformedSystem(where + to_string(v.front().element) + ": " + v.front().reason);
        for (const auto& op : c.management_base) {
            if (!builtin_management_base().contains(op))
                throw MalformedSystem(where + "operation '" + op + "' has no management semantics");
            if (!c.costs.contains(op)) throw MalformedSystem(where + "no cost for operation '" + op + "'");
        }
        for (const auto& br : c.bridge_rules) {
            const auto& head = br.head.inner;
            if (!c.management_base.contains(head.op))
                throw MalformedSystem(where + "bridge head operation '" + head.op + "' not in management base");
            if (auto v = validate_element(c.logic, head.arg); !v.empty())
                throw MalformedSystem(where + "bridge head argument " + to_string(head.arg) + ": " + v.front().reason);
            for (const auto& lit : br.body) {
                if (lit.kind == LiteralKind::belief) {
                    if (lit.target >= m.contexts.size())
                        throw MalformedSystem(where + "bridge literal refers to context index " + std::to_string(lit.target));
                    if (!m.contexts[lit.target].logic.signature.contains(lit.atom))
                        throw MalformedSystem(where + "atom '" + lit.atom + "' not in signature of context " +
                                              m.contexts[lit.target].name);
                } else {
                    if (lit.target >= m.observers.size())
                        throw MalformedSystem(where + "bridge literal refers to observer index " + std::to_string(lit.target));
                    if (!m.observers[lit.target].language.contains(lit.atom))
                        throw MalformedSystem(where + "atom '" + lit.atom + "' not in language of observer " +
                                              m.observers[lit.target].name);
                }
            }
        }
    }
}

inline void require_shape(const EMCS& m, const BeliefState& s) {
    if (s.size() != m.contexts.size()) throw MalformedSystem("belief state has wrong number of contexts");
}
inline void require_shape(const EMCS& m, const InstantObservation& o) {
    if (o.size() != m.observers.size()) throw MalformedSystem("instant observation has wrong number of observers");
}
inline void require_shape(const EMCS& m, const KBConfiguration& k) {
    if (k.size() != m.contexts.size()) throw MalformedSystem("kb configuration has wrong number of contexts");
}

inline bool satisfies(const BeliefState& s, const InstantObservation& obs, const BridgeLiteral& lit) {
    bool holds = false;
    if (lit.kind == LiteralKind::belief) {
        if (lit.target >= s.size()) throw MalformedSystem("belief literal index out of range");
        holds = s[lit.target].contains(lit.atom);
    } else {
        if (lit.target >= obs.size()) throw MalformedSystem("observation literal index out of range");
        holds = obs[lit.target].contains(lit.atom);
    }
    return holds != lit.negated;
}

inline bool satisfies(const BeliefState& s, const InstantObservation& obs, const std::set<BridgeLiteral>& body) {
    for (const auto& lit : body)
        if (!satisfies(s, obs, lit)) return false;
    return true;
}

// app_i(S, O): heads of the bridge rules of context i whose bodies hold.
inline std::set<EvolvingOperationalFormula> applicable_heads(const EMCS& m, std::size_t i, const BeliefState& s,
                                                             const InstantObservation& obs) {
    if (i >= m.contexts.size()) throw MalformedSystem("context index out of range");
    std::set<EvolvingOperationalFormula> out;
    for (const auto& br : m.contexts[i].bridge_rules)
        if (satisfies(s, obs, br.body)) out.insert(br.head);
    return out;
}

struct SplitHeads {
    OperationSet now;
    OperationSet next;

    bool operator==(const SplitHeads&) const = default;
};

inline SplitHeads split_app(const std::set<EvolvingOperationalFormula>& heads) {
    SplitHeads out;
    for (const auto& h : heads) (h.deferred ? out.next : out.now).insert(h.inner);
    return out;
}

inline OperationSet app_now(const EMCS& m, std::size_t i, const BeliefState& s, const InstantObservation& obs) {
    return split_app(applicable_heads(m, i, s, obs)).now;
}

inline OperationSet app_next(const EMCS& m, std::size_t i, const BeliefState& s, const InstantObservation& obs) {
    return split_app(applicable_heads(m, i, s, obs)).next;
}

// Built-in management function over {add, del}. Elements that are both added
// and deleted are conflicts; the result then holds the add-wins and the
// del-wins resolution.
inline std::set<KnowledgeBase> mng(const EvolvingContext& ctx, const OperationSet& ops, const KnowledgeBase& kb) {
    std::set<Rule> adds;
    std::set<Rule> dels;
    for (const auto& f : ops) {
        if (!ctx.management_base.contains(f.op) || !builtin_management_base().contains(f.op))
            throw UnknownOperation("context " + ctx.name + ": unknown operation '" + f.op + "'");
        (f.op == "add" ? adds : dels).insert(f.arg);
    }
    if (ops.empty()) return {kb};

    KnowledgeBase base = kb;
    std::vector<Rule> conflicts;
    for (const auto& r : adds) {
        if (dels.contains(r)) conflicts.push_back(r);
        else base.insert(r);
    }
    for (const auto& r : dels)
        if (!adds.contains(r)) base.erase(r);

    if (conflicts.empty()) return {base};
    KnowledgeBase add_wins = base;
    KnowledgeBase del_wins = base;
    for (const auto& r : conflicts) {
        add_wins.insert(r);
        del_wins.erase(r);
    }
    return {add_wins, del_wins};
}

// M[K] with every observer's current observation set to obs.
inline EMCS replace(const EMCS& m, const KBConfiguration& k, const InstantObservation& obs) {
    require_shape(m, k);
    require_shape(m, obs);
    EMCS out = m;
    for (std::size_t i = 0; i < out.contexts.size(); ++i) out.contexts[i].kb = k[i];
    for (std::size_t i = 0; i < out.observers.size(); ++i) out.observers[i].current = obs[i];
    return out;
}

inline std::string to_string(const AtomSet& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& a : s) {
        if (!first) out += ",";
        out += a;
        first = false;
    }
    return out + "}";
}

inline std::string to_string(const BeliefState& s) {
    std::string out = "<";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += to_string(s[i]);
    }
    return out + ">";
}

} // namespace emcs
