#pragma once

// Text formats for system descriptions and observation sequences.
//
// System description (whitespace-insensitive, '#' starts a comment):
//
//   context <name> kind (asp|factstore) signature { a, b, ... }
//   kb <context> { h :- p, not q. f. ... }
//   cost <context> { add = 1, del = 1 }
//   distance <context> symdiff
//   aggregator (max|avg)
//   observer <name> language { q, r, ... }
//   bridge <context> { [next] op(elem) <- (ctx:atom), not (obs@atom), ... ; ... }
//
// Observation document, one time step per line:
//
//   step: <observer> = { atoms } ; <observer> = { atoms }
//
// Observers omitted from a step observe nothing.

#include "errors.hpp"
#include "evolution.hpp"
#include "logic.hpp"
#include "minimal_change.hpp"
#include "system.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emcs {

struct SystemDescription {
    EMCS system;
    Aggregator aggregator = Aggregator::max;

    ChangeModel change_model() const { return ChangeModel::of(system, aggregator); }

    bool operator==(const SystemDescription&) const = default;
};

class ParseError : public Error {
public:
    enum class Kind { syntax, semantic, unknown_observation_atom };

    ParseError(Kind kind, std::size_t line, std::size_t column, std::string reason)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + kind_name(kind) + ": " + reason),
          kind_(kind), line_(line), column_(column), reason_(std::move(reason)) {}

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& reason() const { return reason_; }

    static std::string kind_name(Kind k) {
        switch (k) {
        case Kind::syntax: return "syntax-error";
        case Kind::semantic: return "semantic-error";
        case Kind::unknown_observation_atom: return "unknown-observation-atom";
        }
        return "error";
    }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

namespace detail {

struct Token {
    enum class Kind { ident, punct, end };
    Kind kind = Kind::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

inline bool is_reserved(std::string_view s) { return s == "not" || s == "next"; }

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto ident_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
        } else if (ident_char(c)) {
            Token t{Token::Kind::ident, {}, line, col};
            while (i < text.size() && ident_char(text[i])) {
                t.text += text[i];
                advance(1);
            }
            out.push_back(std::move(t));
        } else if ((c == '<' || c == ':') && i + 1 < text.size() && text[i + 1] == '-') {
            out.push_back({Token::Kind::punct, std::string{c, '-'}, line, col});
            advance(2);
        } else if (std::string_view("{}(),;.:@=").find(c) != std::string_view::npos) {
            out.push_back({Token::Kind::punct, std::string(1, c), line, col});
            advance(1);
        } else {
            throw ParseError(ParseError::Kind::syntax, line, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::Kind::end, {}, line, col});
    return out;
}

class Cursor {
public:
    explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    bool at_end() const { return peek().kind == Token::Kind::end; }
    bool is(std::string_view punct_or_word, std::size_t ahead = 0) const {
        const auto& t = peek(ahead);
        return t.kind != Token::Kind::end && t.text == punct_or_word;
    }
    bool accept(std::string_view s) {
        if (!is(s)) return false;
        ++pos_;
        return true;
    }
    Token expect(std::string_view s) {
        if (!is(s)) fail(peek(), "expected '" + std::string(s) + "'");
        return tokens_[pos_++];
    }
    Token ident(std::string_view what) {
        const auto& t = peek();
        if (t.kind != Token::Kind::ident) fail(t, "expected " + std::string(what));
        return tokens_[pos_++];
    }
    Token atom() {
        auto t = ident("atom");
        if (is_reserved(t.text)) fail(t, "'" + t.text + "' is reserved and cannot be an atom");
        return t;
    }

    [[noreturn]] static void fail(const Token& t, const std::string& reason) {
        const std::string found = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
        throw ParseError(ParseError::Kind::syntax, t.line, t.column, reason + ", found " + found);
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

[[noreturn]] inline void semantic(const Token& t, const std::string& reason) {
    throw ParseError(ParseError::Kind::semantic, t.line, t.column, reason);
}

struct RawRule {
    Token head;
    std::vector<std::pair<bool, Token>> body; // (negated, atom)
};

struct RawLiteral {
    bool negated = false;
    bool observation = false;
    Token target;
    Token atom;
};

struct RawBridge {
    bool deferred = false;
    Token op;
    RawRule arg;
    std::vector<RawLiteral> body;
};

struct RawContext {
    Token name;
    LogicKind kind = LogicKind::factstore;
    std::vector<Token> signature;
};

struct RawObserver {
    Token name;
    std::vector<Token> language;
};

inline std::vector<Token> atom_list(Cursor& in) {
    std::vector<Token> out;
    in.expect("{");
    if (in.accept("}")) return out;
    do {
        out.push_back(in.atom());
    } while (in.accept(","));
    in.expect("}");
    return out;
}

inline RawRule raw_rule(Cursor& in) {
    RawRule r{in.atom(), {}};
    if (in.accept(":-")) {
        do {
            const bool neg = in.accept("not");
            r.body.emplace_back(neg, in.atom());
        } while (in.accept(","));
    }
    return r;
}

inline RawLiteral raw_literal(Cursor& in) {
    RawLiteral lit;
    lit.negated = in.accept("not");
    in.expect("(");
    lit.target = in.ident("context or observer name");
    if (in.accept("@")) lit.observation = true;
    else in.expect(":");
    lit.atom = in.atom();
    in.expect(")");
    return lit;
}

inline RawBridge raw_bridge(Cursor& in) {
    RawBridge b;
    bool wrapped = false;
    if (in.accept("next")) {
        b.deferred = true;
        wrapped = in.accept("(");
    }
    b.op = in.ident("operation name");
    in.expect("(");
    b.arg = raw_rule(in);
    in.accept(".");
    in.expect(")");
    if (wrapped) in.expect(")");
    if (in.accept("<-")) {
        if (!in.is(";") && !in.is("}")) {
            do {
                b.body.push_back(raw_literal(in));
            } while (in.accept(","));
        }
    }
    return b;
}

class SystemBuilder {
public:
    SystemDescription parse(std::string_view text) {
        Cursor in(tokenize(text));
        while (!in.at_end()) statement(in);
        return resolve(in.peek());
    }

private:
    void statement(Cursor& in) {
        const Token kw = in.ident("statement keyword");
        if (kw.text == "context") {
            RawContext c;
            c.name = in.ident("context name");
            in.expect("kind");
            const Token kind = in.ident("logic kind");
            if (kind.text == "asp") c.kind = LogicKind::asp;
            else if (kind.text == "factstore") c.kind = LogicKind::factstore;
            else Cursor::fail(kind, "expected 'asp' or 'factstore'");
            in.expect("signature");
            c.signature = atom_list(in);
            contexts_.push_back(std::move(c));
        } else if (kw.text == "kb") {
            const Token name = in.ident("context name");
            in.expect("{");
            auto& rules = kbs_[name.text];
            if (rules.empty()) kb_refs_.push_back(name);
            while (!in.accept("}")) {
                rules.push_back(raw_rule(in));
                in.expect(".");
                in.accept(";");
            }
        } else if (kw.text == "cost") {
            const Token name = in.ident("context name");
            cost_refs_.push_back(name);
            auto& entries = costs_[name.text];
            in.expect("{");
            if (!in.accept("}")) {
                do {
                    const Token op = in.ident("operation name");
                    in.expect("=");
                    const Token value = in.ident("non-negative integer");
                    if (value.text.find_first_not_of("0123456789") != std::string::npos || value.text.size() > 18)
                        Cursor::fail(value, "expected non-negative integer");
                    entries.emplace_back(op, std::stoull(value.text));
                } while (in.accept(","));
                in.expect("}");
            }
        } else if (kw.text == "distance") {
            const Token name = in.ident("context name");
            const Token fn = in.ident("distance name");
            distances_.emplace_back(name, fn);
        } else if (kw.text == "aggregator") {
            const Token agg = in.ident("aggregator");
            if (aggregator_) semantic(kw, "aggregator declared twice");
            if (agg.text == "max") aggregator_ = Aggregator::max;
            else if (agg.text == "avg") aggregator_ = Aggregator::avg;
            else Cursor::fail(agg, "expected 'max' or 'avg'");
        } else if (kw.text == "observer") {
            RawObserver o;
            o.name = in.ident("observer name");
            in.expect("language");
            o.language = atom_list(in);
            observers_.push_back(std::move(o));
        } else if (kw.text == "bridge") {
            const Token name = in.ident("context name");
            auto& rules = bridges_[name.text];
            if (rules.empty()) bridge_refs_.push_back(name);
            in.expect("{");
            while (!in.accept("}")) {
                rules.push_back(raw_bridge(in));
                if (!in.accept(";") && !in.is("}")) Cursor::fail(in.peek(), "expected ';' or '}'");
            }
        } else {
            Cursor::fail(kw, "expected a statement keyword");
        }
    }

    std::size_t context_index(const Token& t) const {
        for (std::size_t i = 0; i < contexts_.size(); ++i)
            if (contexts_[i].name.text == t.text) return i;
        semantic(t, "undeclared context '" + t.text + "'");
    }

    std::size_t observer_index(const Token& t) const {
        for (std::size_t i = 0; i < observers_.size(); ++i)
            if (observers_[i].name.text == t.text) return i;
        semantic(t, "undeclared observer '" + t.text + "'");
    }

public:
    static Rule resolve_rule(const RawRule& raw, const EvolvingContext& ctx) {
        auto check = [&](const Token& t) {
            if (!ctx.logic.signature.contains(t.text))
                semantic(t, "atom '" + t.text + "' not in signature of context " + ctx.name);
        };
        Rule r;
        check(raw.head);
        r.head = raw.head.text;
        for (const auto& [neg, atom] : raw.body) {
            check(atom);
            (neg ? r.neg : r.pos).insert(atom.text);
        }
        if (ctx.logic.kind == LogicKind::factstore && !r.is_fact())
            semantic(raw.head, "fact store " + ctx.name + " admits only facts");
        return r;
    }

private:
    SystemDescription resolve(const Token& eof) {
        SystemDescription out;
        out.aggregator = aggregator_.value_or(Aggregator::max);
        if (contexts_.empty()) semantic(eof, "a system needs at least one evolving context");

        std::map<std::string, Token> names;
        auto declare = [&](const Token& t) {
            if (!names.emplace(t.text, t).second) semantic(t, "duplicate name '" + t.text + "'");
        };
        for (const auto& c : contexts_) {
            declare(c.name);
            EvolvingContext ctx;
            ctx.name = c.name.text;
            ctx.logic.kind = c.kind;
            for (const auto& a : c.signature) ctx.logic.signature.insert(a.text);
            out.system.contexts.push_back(std::move(ctx));
        }
        for (const auto& o : observers_) {
            declare(o.name);
            ObservationContext obs;
            obs.name = o.name.text;
            for (const auto& a : o.language) obs.language.insert(a.text);
            out.system.observers.push_back(std::move(obs));
        }

        for (const auto& ref : kb_refs_) {
            auto& ctx = out.system.contexts[context_index(ref)];
            for (const auto& raw : kbs_.at(ref.text)) ctx.kb.insert(resolve_rule(raw, ctx));
        }
        for (const auto& ref : cost_refs_) {
            auto& ctx = out.system.contexts[context_index(ref)];
            for (const auto& [op, value] : costs_.at(ref.text)) {
                if (!ctx.management_base.contains(op.text)) semantic(op, "unknown operation '" + op.text + "'");
                ctx.costs[op.text] = value;
            }
        }
        for (const auto& [ref, fn] : distances_) {
            auto& ctx = out.system.contexts[context_index(ref)];
            if (fn.text != "symdiff") semantic(fn, "unknown distance '" + fn.text + "'");
            ctx.distance = symdiff_distance();
        }
        for (const auto& ref : bridge_refs_) {
            const std::size_t i = context_index(ref);
            for (const auto& raw : bridges_.at(ref.text)) {
                auto& ctx = out.system.contexts[i];
                if (!ctx.management_base.contains(raw.op.text))
                    semantic(raw.op, "unknown operation '" + raw.op.text + "'");
                BridgeRule br;
                br.head.deferred = raw.deferred;
                br.head.inner.op = raw.op.text;
                br.head.inner.arg = resolve_rule(raw.arg, ctx);
                for (const auto& lit : raw.body) {
                    if (lit.observation) {
                        const std::size_t r = observer_index(lit.target);
                        if (!out.system.observers[r].language.contains(lit.atom.text))
                            semantic(lit.atom, "atom '" + lit.atom.text + "' not in language of observer " +
                                                   lit.target.text);
                        br.body.insert(observed(r, lit.atom.text, lit.negated));
                    } else {
                        const std::size_t r = context_index(lit.target);
                        if (!out.system.contexts[r].logic.signature.contains(lit.atom.text))
                            semantic(lit.atom, "atom '" + lit.atom.text + "' not in signature of context " +
                                                   lit.target.text);
                        br.body.insert(belief(r, lit.atom.text, lit.negated));
                    }
                }
                out.system.contexts[i].bridge_rules.push_back(std::move(br));
            }
        }
        return out;
    }

    std::vector<RawContext> contexts_;
    std::vector<RawObserver> observers_;
    std::vector<Token> kb_refs_;
    std::map<std::string, std::vector<RawRule>> kbs_;
    std::vector<Token> cost_refs_;
    std::map<std::string, std::vector<std::pair<Token, Cost>>> costs_;
    std::vector<std::pair<Token, Token>> distances_;
    std::vector<Token> bridge_refs_;
    std::map<std::string, std::vector<RawBridge>> bridges_;
    std::optional<Aggregator> aggregator_;
};

// "{ a, b }", or "{}" when empty.
inline std::string braced(const AtomSet& atoms) {
    std::string out;
    for (const auto& a : atoms) out += (out.empty() ? "{ " : ", ") + a;
    return out.empty() ? "{}" : out + " }";
}

} // namespace detail

inline SystemDescription parse_system(std::string_view text) { return detail::SystemBuilder().parse(text); }

// Parses one kb-element of context `ctx`, e.g. "h :- p, not q" (the final
// '.' is optional).
inline Rule parse_rule(std::string_view text, const EvolvingContext& ctx) {
    detail::Cursor in(detail::tokenize(text));
    auto raw = detail::raw_rule(in);
    in.accept(".");
    if (!in.at_end()) detail::Cursor::fail(in.peek(), "expected end of element");
    return detail::SystemBuilder::resolve_rule(raw, ctx);
}

inline std::string to_string(const EMCS& m, const BridgeLiteral& lit) {
    std::string out = lit.negated ? "not (" : "(";
    if (lit.kind == LiteralKind::belief) out += m.contexts.at(lit.target).name + ":";
    else out += m.observers.at(lit.target).name + "@";
    return out + lit.atom + ")";
}

inline std::string to_string(const EMCS& m, const BridgeRule& br) {
    std::string out = to_string(br.head);
    if (br.body.empty()) return out;
    out += " <- ";
    bool first = true;
    for (const auto& lit : br.body) {
        if (!first) out += ", ";
        out += to_string(m, lit);
        first = false;
    }
    return out;
}

// Canonical text of a system description; parse_system reads it back to an
// equal description.
inline std::string serialize_system(const SystemDescription& d) {
    const EMCS& m = d.system;
    std::string out;
    for (const auto& c : m.contexts) {
        out += "context " + c.name + " kind " + std::string(to_string(c.logic.kind)) + " signature " +
               detail::braced(c.logic.signature) + "\n";
        if (!c.kb.empty()) {
            out += "kb " + c.name + " {";
            for (const auto& r : c.kb) out += " " + to_string(r) + ".";
            out += " }\n";
        }
        out += "cost " + c.name + " {";
        bool first = true;
        for (const auto& [op, value] : c.costs) {
            out += (first ? " " : ", ") + op + " = " + std::to_string(value);
            first = false;
        }
        out += " }\n";
        out += "distance " + c.name + " " + c.distance.name + "\n";
    }
    for (const auto& o : m.observers)
        out += "observer " + o.name + " language " + detail::braced(o.language) + "\n";
    for (const auto& c : m.contexts) {
        if (c.bridge_rules.empty()) continue;
        out += "bridge " + c.name + " {\n";
        for (std::size_t k = 0; k < c.bridge_rules.size(); ++k)
            out += "  " + to_string(m, c.bridge_rules[k]) + (k + 1 < c.bridge_rules.size() ? ";\n" : "\n");
        out += "}\n";
    }
    out += "aggregator " + std::string(to_string(d.aggregator)) + "\n";
    return out;
}

inline ObservationSequence parse_observations(std::string_view text, const EMCS& m) {
    using detail::Token;
    auto tokens = detail::tokenize(text);
    ObservationSequence out;
    std::size_t k = 0;
    while (tokens[k].kind != Token::Kind::end) {
        const std::size_t line = tokens[k].line;
        std::vector<Token> line_tokens;
        while (tokens[k].kind != Token::Kind::end && tokens[k].line == line) line_tokens.push_back(tokens[k++]);
        Token eol = tokens[k];
        eol.kind = Token::Kind::end;
        eol.text.clear();
        if (eol.line != line) {
            eol.line = line;
            eol.column = line_tokens.back().column + line_tokens.back().text.size();
        }
        line_tokens.push_back(eol);

        detail::Cursor in(std::move(line_tokens));
        in.expect("step");
        in.expect(":");
        InstantObservation step = empty_observation(m);
        std::vector<bool> seen(m.observers.size(), false);
        while (!in.at_end()) {
            const Token name = in.ident("observer name");
            std::size_t r = m.observers.size();
            for (std::size_t i = 0; i < m.observers.size(); ++i)
                if (m.observers[i].name == name.text) r = i;
            if (r == m.observers.size()) detail::semantic(name, "undeclared observer '" + name.text + "'");
            if (seen[r]) detail::semantic(name, "observer '" + name.text + "' listed twice in one step");
            seen[r] = true;
            in.expect("=");
            for (const auto& atom : detail::atom_list(in)) {
                if (!m.observers[r].language.contains(atom.text))
                    throw ParseError(ParseError::Kind::unknown_observation_atom, atom.line, atom.column,
                                     "atom '" + atom.text + "' not in language of observer " + name.text);
                step[r].insert(atom.text);
            }
            if (!in.accept(";") && !in.at_end()) detail::Cursor::fail(in.peek(), "expected ';' or end of line");
        }
        out.push_back(std::move(step));
    }
    return out;
}

inline std::string serialize_observations(const ObservationSequence& obs, const EMCS& m) {
    std::string out;
    for (const auto& step : obs) {
        out += "step:";
        for (std::size_t i = 0; i < m.observers.size(); ++i)
            out += std::string(i ? " ;" : "") + " " + m.observers[i].name + " = " + detail::braced(step[i]);
        out += "\n";
    }
    return out;
}

} // namespace emcs
