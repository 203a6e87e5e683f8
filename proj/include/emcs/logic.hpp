#pragma once

// Context logics: knowledge bases, belief sets and their acceptability
// function. Two finite logics are built in: propositional normal programs
// under answer-set semantics, and plain fact stores.

#include "errors.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace emcs {

using Atom = std::string;
using AtomSet = std::set<Atom>;
using BeliefSet = AtomSet;

inline bool is_atom_token(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

// A normal rule `head :- pos..., not neg...`. A fact is a rule with an empty
// body; fact stores only admit facts. Rules are the kb-elements that
// operational formulas act on.
struct Rule {
    Atom head;
    AtomSet pos;
    AtomSet neg;

    static Rule fact(Atom a) { return Rule{std::move(a), {}, {}}; }

    bool is_fact() const { return pos.empty() && neg.empty(); }

    auto operator<=>(const Rule&) const = default;
    bool operator==(const Rule&) const = default;
};

using KnowledgeBase = std::set<Rule>;

inline std::string to_string(const Rule& r) {
    std::string out = r.head;
    if (!r.is_fact()) {
        out += " :- ";
        bool first = true;
        for (const auto& a : r.pos) {
            if (!first) out += ", ";
            out += a;
            first = false;
        }
        for (const auto& a : r.neg) {
            if (!first) out += ", ";
            out += "not " + a;
            first = false;
        }
    }
    return out;
}

inline KnowledgeBase facts(const AtomSet& atoms) {
    KnowledgeBase kb;
    for (const auto& a : atoms) kb.insert(Rule::fact(a));
    return kb;
}

enum class LogicKind { asp, factstore };

inline std::string_view to_string(LogicKind k) { return k == LogicKind::asp ? "asp" : "factstore"; }

struct Logic {
    LogicKind kind = LogicKind::factstore;
    AtomSet signature;

    bool operator==(const Logic&) const = default;
};

struct Violation {
    Rule element;
    std::string reason;

    bool operator==(const Violation&) const = default;
};

inline std::vector<Violation> validate_element(const Logic& logic, const Rule& r) {
    std::vector<Violation> out;
    auto check = [&](const Atom& a) {
        if (!logic.signature.contains(a)) out.push_back({r, "atom '" + a + "' not in signature"});
    };
    check(r.head);
    for (const auto& a : r.pos) check(a);
    for (const auto& a : r.neg) check(a);
    if (logic.kind == LogicKind::factstore && !r.is_fact())
        out.push_back({r, "fact store admits only facts"});
    return out;
}

// Empty result means kb is a knowledge base of the logic.
inline std::vector<Violation> validate_kb(const Logic& logic, const KnowledgeBase& kb) {
    std::vector<Violation> out;
    for (const auto& r : kb) {
        auto v = validate_element(logic, r);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

inline void require_valid(const Logic& logic, const KnowledgeBase& kb) {
    auto v = validate_kb(logic, kb);
    if (!v.empty()) throw InvalidKb("invalid knowledge base: " + to_string(v.front().element) + ": " + v.front().reason);
}

namespace detail {

// Least model of the reduct of `program` relative to `candidate`.
inline AtomSet reduct_least_model(const KnowledgeBase& program, const AtomSet& candidate) {
    std::vector<const Rule*> reduct;
    for (const auto& r : program) {
        bool blocked = std::any_of(r.neg.begin(), r.neg.end(), [&](const Atom& a) { return candidate.contains(a); });
        if (!blocked) reduct.push_back(&r);
    }
    AtomSet model;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Rule* r : reduct) {
            if (model.contains(r->head)) continue;
            if (std::all_of(r->pos.begin(), r->pos.end(), [&](const Atom& a) { return model.contains(a); })) {
                model.insert(r->head);
                changed = true;
            }
        }
    }
    return model;
}

} // namespace detail

inline bool is_answer_set(const KnowledgeBase& program, const AtomSet& candidate) {
    return detail::reduct_least_model(program, candidate) == candidate;
}

// All answer sets of a normal program. Only head atoms can be derived, so the
// search ranges over subsets of the heads; every candidate is checked by
// computing the least model of its reduct.
inline std::set<BeliefSet> asp_answer_sets(const KnowledgeBase& program, const AtomSet& signature) {
    require_valid(Logic{LogicKind::asp, signature}, program);
    AtomSet heads;
    for (const auto& r : program) heads.insert(r.head);
    std::vector<Atom> universe(heads.begin(), heads.end());
    if (universe.size() > 24) throw BudgetExceeded("answer-set enumeration over more than 24 head atoms");

    std::set<BeliefSet> out;
    const std::uint64_t total = std::uint64_t{1} << universe.size();
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        AtomSet candidate;
        for (std::size_t b = 0; b < universe.size(); ++b)
            if (mask >> b & 1U) candidate.insert(universe[b]);
        if (is_answer_set(program, candidate)) out.insert(std::move(candidate));
    }
    return out;
}

// ACC of the logic. Throws InvalidKb when kb is not a knowledge base of it.
inline std::set<BeliefSet> acc(const Logic& logic, const KnowledgeBase& kb) {
    require_valid(logic, kb);
    switch (logic.kind) {
    case LogicKind::factstore: {
        BeliefSet s;
        for (const auto& r : kb) s.insert(r.head);
        return {s};
    }
    case LogicKind::asp:
        return asp_answer_sets(kb, logic.signature);
    }
    return {};
}

// Membership test S ∈ acc(kb) without enumerating acc.
inline bool is_acceptable(const Logic& logic, const KnowledgeBase& kb, const BeliefSet& s) {
    require_valid(logic, kb);
    if (!std::includes(logic.signature.begin(), logic.signature.end(), s.begin(), s.end())) return false;
    switch (logic.kind) {
    case LogicKind::factstore: {
        BeliefSet heads;
        for (const auto& r : kb) heads.insert(r.head);
        return heads == s;
    }
    case LogicKind::asp:
        return is_answer_set(kb, s);
    }
    return false;
}

} // namespace emcs
