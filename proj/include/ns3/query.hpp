#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ns3/error.hpp"
#include "ns3/kg.hpp"

namespace ns3 {

using Tuple = std::vector<EntityId>;
using AnswerSet = std::set<Tuple>;

enum class TermKind { constant, existential, free };

struct Term {
    TermKind kind = TermKind::constant;
    EntityId entity = 0;   // constants only
    int placeholder = 0;   // > 0 for an ungrounded template constant `?N`
    std::string name;      // variables only

    static Term constant(EntityId id) { return {TermKind::constant, id, 0, {}}; }
    static Term placeholder_constant(int slot) { return {TermKind::constant, 0, slot, {}}; }
    static Term existential(std::string name) { return {TermKind::existential, 0, 0, std::move(name)}; }
    static Term free(std::string name) { return {TermKind::free, 0, 0, std::move(name)}; }

    bool is_constant() const noexcept { return kind == TermKind::constant; }
    bool is_variable() const noexcept { return kind != TermKind::constant; }

    friend bool operator==(const Term&, const Term&) = default;
};

/// One atom r(h, t), possibly negated.
struct QueryEdge {
    Term head;
    RelationId relation = 0;
    int relation_placeholder = 0;  // > 0 for an ungrounded template relation `?rN`
    Term tail;
    bool negated = false;

    friend bool operator==(const QueryEdge&, const QueryEdge&) = default;
};

/// A conjunctive query graph. Multi-edges are allowed.
struct QueryGraph {
    std::vector<QueryEdge> edges;
    std::vector<std::string> free_vars;
    std::vector<std::string> exist_vars;

    std::size_t atom_count() const noexcept { return edges.size(); }
    std::size_t arity() const noexcept { return free_vars.size(); }

    bool is_free(std::string_view name) const {
        return std::find(free_vars.begin(), free_vars.end(), name) != free_vars.end();
    }

    friend bool operator==(const QueryGraph&, const QueryGraph&) = default;
};

/// Disjunction of conjunctive query graphs sharing one ordered free-variable list.
struct DnfQuery {
    std::vector<std::string> free_vars;
    std::vector<QueryGraph> conjuncts;

    std::size_t arity() const noexcept { return free_vars.size(); }

    std::size_t free_index(std::string_view name) const {
        auto it = std::find(free_vars.begin(), free_vars.end(), name);
        if (it == free_vars.end()) fail(ErrorKind::logic, "'" + std::string(name) + "' is not a free variable");
        return static_cast<std::size_t>(it - free_vars.begin());
    }

    bool is_grounded() const {
        for (const auto& c : conjuncts)
            for (const auto& e : c.edges)
                if (e.relation_placeholder || e.head.placeholder || e.tail.placeholder) return false;
        return true;
    }

    friend bool operator==(const DnfQuery&, const DnfQuery&) = default;
};

// ---------------------------------------------------------------------------
// Parsing

struct ParseOptions {
    bool allow_placeholders = false;
};

namespace detail {

struct Token {
    enum Kind { open, close, atom, end } kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

class Lexer {
   public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space();
        if (pos_ >= text_.size()) return {Token::end, "", line_, column_};
        auto line = line_;
        auto column = column_;
        char c = text_[pos_];
        if (c == '(' || c == ')') {
            advance();
            return {c == '(' ? Token::open : Token::close, std::string(1, c), line, column};
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')' && text_[pos_] != '#')
            advance();
        return {Token::atom, std::string(text_.substr(start, pos_ - start)), line, column};
    }

   private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
   public:
    Parser(std::string_view text, const Vocab* vocab, ParseOptions options)
        : lexer_(text), vocab_(vocab), options_(options) {
        peek_ = lexer_.next();
    }

    DnfQuery parse() {
        DnfQuery q;
        expect_open("q");
        expect_open("f");
        while (peek_.kind == Token::atom) {
            auto tok = take();
            check_name(tok);
            if (std::find(q.free_vars.begin(), q.free_vars.end(), tok.text) != q.free_vars.end())
                throw ParseError("duplicate variable '" + tok.text + "'", tok.line, tok.column);
            q.free_vars.push_back(tok.text);
        }
        if (q.free_vars.empty()) throw ParseError("free declaration needs at least one name", peek_.line, peek_.column);
        expect_close();
        free_vars_ = &q.free_vars;

        if (peek_.kind == Token::open && peek_head() == "or") {
            expect_open("or");
            while (peek_.kind == Token::open) q.conjuncts.push_back(parse_conjunct());
            if (q.conjuncts.empty()) throw ParseError("'or' needs at least one conjunct", peek_.line, peek_.column);
            expect_close();
        } else {
            q.conjuncts.push_back(parse_conjunct());
        }
        expect_close();
        if (peek_.kind != Token::end) throw ParseError("trailing input after query", peek_.line, peek_.column);
        for (auto& c : q.conjuncts) c.free_vars = q.free_vars;
        return q;
    }

   private:
    // Head symbol of the form that starts at the current '(' token, without consuming.
    std::string peek_head() {
        if (!lookahead_) lookahead_ = lexer_.next();
        return lookahead_->kind == Token::atom ? lookahead_->text : std::string{};
    }

    Token take() {
        Token tok = std::move(peek_);
        if (lookahead_) {
            peek_ = std::move(*lookahead_);
            lookahead_.reset();
        } else {
            peek_ = lexer_.next();
        }
        return tok;
    }

    [[noreturn]] void unexpected(const std::string& wanted) {
        std::string got = peek_.kind == Token::end ? "end of input" : "'" + peek_.text + "'";
        throw ParseError("expected " + wanted + ", got " + got, peek_.line, peek_.column);
    }

    void expect_open(std::string_view head) {
        if (peek_.kind != Token::open) unexpected("'(" + std::string(head) + "'");
        take();
        if (peek_.kind != Token::atom || peek_.text != head) unexpected("'" + std::string(head) + "'");
        take();
    }

    void expect_close() {
        if (peek_.kind != Token::close) unexpected("')'");
        take();
    }

    void check_name(const Token& tok) {
        if (tok.text.empty() || tok.text[0] == '?')
            throw ParseError("invalid variable name '" + tok.text + "'", tok.line, tok.column);
    }

    QueryGraph parse_conjunct() {
        QueryGraph g;
        exist_ = &g.exist_vars;
        bool wrapped = peek_.kind == Token::open && peek_head() == "exists";
        if (wrapped) {
            expect_open("exists");
            if (peek_.kind != Token::open) unexpected("'('");
            take();
            while (peek_.kind == Token::atom) {
                auto tok = take();
                check_name(tok);
                bool clash = std::find(g.exist_vars.begin(), g.exist_vars.end(), tok.text) != g.exist_vars.end() ||
                             std::find(free_vars_->begin(), free_vars_->end(), tok.text) != free_vars_->end();
                if (clash) throw ParseError("duplicate variable '" + tok.text + "'", tok.line, tok.column);
                g.exist_vars.push_back(tok.text);
            }
            expect_close();
        }
        if (peek_.kind == Token::open && peek_head() == "and") {
            expect_open("and");
            while (peek_.kind == Token::open) g.edges.push_back(parse_atom());
            if (g.edges.empty()) throw ParseError("'and' needs at least one atom", peek_.line, peek_.column);
            expect_close();
        } else {
            g.edges.push_back(parse_atom());
        }
        if (wrapped) expect_close();
        return g;
    }

    QueryEdge parse_atom() {
        if (peek_.kind == Token::open && peek_head() == "not") {
            expect_open("not");
            auto edge = parse_relation_atom();
            edge.negated = true;
            expect_close();
            return edge;
        }
        return parse_relation_atom();
    }

    QueryEdge parse_relation_atom() {
        QueryEdge edge;
        expect_open("r");
        if (peek_.kind != Token::atom) unexpected("relation name");
        auto rel = take();
        if (options_.allow_placeholders && rel.text.size() > 2 && rel.text.rfind("?r", 0) == 0) {
            edge.relation_placeholder = placeholder_slot(rel, 2);
        } else {
            edge.relation = lookup(rel, false);
        }
        edge.head = parse_term();
        edge.tail = parse_term();
        expect_close();
        return edge;
    }

    int placeholder_slot(const Token& tok, std::size_t prefix) {
        int slot = 0;
        for (std::size_t i = prefix; i < tok.text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(tok.text[i])))
                throw ParseError("bad placeholder '" + tok.text + "'", tok.line, tok.column);
            slot = slot * 10 + (tok.text[i] - '0');
        }
        if (slot <= 0) throw ParseError("bad placeholder '" + tok.text + "'", tok.line, tok.column);
        return slot;
    }

    std::uint32_t lookup(const Token& tok, bool entity) {
        if (!vocab_) throw ParseError("no vocabulary to resolve '" + tok.text + "'", tok.line, tok.column);
        const auto& map = entity ? vocab_->entities : vocab_->relations;
        if (!map.contains(tok.text))
            throw ParseError(std::string("unknown ") + (entity ? "entity" : "relation") + " '" + tok.text + "'",
                             tok.line, tok.column);
        return map.id(tok.text);
    }

    Term parse_term() {
        if (peek_.kind != Token::open) unexpected("term");
        take();
        if (peek_.kind != Token::atom) unexpected("term kind");
        auto kind = take();
        if (peek_.kind != Token::atom) unexpected("name");
        auto name = take();
        Term term;
        if (kind.text == "e") {
            if (options_.allow_placeholders && name.text.size() > 1 && name.text[0] == '?')
                term = Term::placeholder_constant(placeholder_slot(name, 1));
            else
                term = Term::constant(lookup(name, true));
        } else if (kind.text == "x") {
            if (std::find(exist_->begin(), exist_->end(), name.text) == exist_->end())
                throw ParseError("undeclared existential variable '" + name.text + "'", name.line, name.column);
            term = Term::existential(name.text);
        } else if (kind.text == "v") {
            if (std::find(free_vars_->begin(), free_vars_->end(), name.text) == free_vars_->end())
                throw ParseError("undeclared free variable '" + name.text + "'", name.line, name.column);
            term = Term::free(name.text);
        } else {
            throw ParseError("unknown term kind '" + kind.text + "'", kind.line, kind.column);
        }
        expect_close();
        return term;
    }

    Lexer lexer_;
    const Vocab* vocab_;
    ParseOptions options_;
    Token peek_;
    std::optional<Token> lookahead_;
    const std::vector<std::string>* free_vars_ = nullptr;
    std::vector<std::string>* exist_ = nullptr;
};

}  // namespace detail

inline DnfQuery parse_query(std::string_view text, const Vocab& vocab, ParseOptions options = {}) {
    return detail::Parser(text, &vocab, options).parse();
}

/// Parses a template skeleton: every constant and relation must be a placeholder.
inline DnfQuery parse_template(std::string_view text) {
    return detail::Parser(text, nullptr, ParseOptions{true}).parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline void print_term(std::ostream& out, const Term& t, const Vocab* vocab) {
    switch (t.kind) {
        case TermKind::constant:
            out << "(e ";
            if (t.placeholder)
                out << '?' << t.placeholder;
            else if (vocab)
                out << vocab->entities.label(t.entity);
            else
                out << '#' << t.entity;
            break;
        case TermKind::existential: out << "(x " << t.name; break;
        case TermKind::free: out << "(v " << t.name; break;
    }
    out << ')';
}

inline void print_edge(std::ostream& out, const QueryEdge& e, const Vocab* vocab) {
    if (e.negated) out << "(not ";
    out << "(r ";
    if (e.relation_placeholder)
        out << "?r" << e.relation_placeholder;
    else if (vocab)
        out << vocab->relations.label(e.relation);
    else
        out << '#' << e.relation;
    out << ' ';
    print_term(out, e.head, vocab);
    out << ' ';
    print_term(out, e.tail, vocab);
    out << ')';
    if (e.negated) out << ')';
}

}  // namespace detail

/// Renders a query in the s-expression DSL, on one line. Without a vocabulary,
/// bound ids print as `#<id>` (not parseable, used as a key).
inline std::string print_query(const DnfQuery& q, const Vocab* vocab) {
    std::ostringstream out;
    out << "(q (f";
    for (const auto& name : q.free_vars) out << ' ' << name;
    out << ") ";
    if (q.conjuncts.size() > 1) out << "(or ";
    for (std::size_t c = 0; c < q.conjuncts.size(); ++c) {
        const auto& g = q.conjuncts[c];
        if (c) out << ' ';
        if (!g.exist_vars.empty()) {
            out << "(exists (";
            for (std::size_t i = 0; i < g.exist_vars.size(); ++i) out << (i ? " " : "") << g.exist_vars[i];
            out << ") ";
        }
        if (g.edges.size() > 1) out << "(and ";
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            if (i) out << ' ';
            detail::print_edge(out, g.edges[i], vocab);
        }
        if (g.edges.size() > 1) out << ')';
        if (!g.exist_vars.empty()) out << ')';
    }
    if (q.conjuncts.size() > 1) out << ')';
    out << ')';
    return out.str();
}

inline std::string print_query(const DnfQuery& q, const Vocab& vocab) { return print_query(q, &vocab); }

// ---------------------------------------------------------------------------
// Marginalization

/// Keeps the free variables in `keep` (in their original order) and turns the
/// rest into existential variables of every conjunct. Edges are unchanged.
inline DnfQuery marginalize_query(const DnfQuery& q, std::span<const std::string> keep) {
    if (keep.empty()) fail(ErrorKind::logic, "marginalization needs a non-empty variable set");
    std::set<std::string> wanted(keep.begin(), keep.end());
    for (const auto& name : wanted)
        if (std::find(q.free_vars.begin(), q.free_vars.end(), name) == q.free_vars.end())
            fail(ErrorKind::logic, "'" + name + "' is not a free variable");
    if (wanted.size() >= q.free_vars.size())
        fail(ErrorKind::logic, "marginalization needs a proper subset of the free variables");

    DnfQuery out;
    std::vector<std::string> dropped;
    for (const auto& name : q.free_vars) (wanted.count(name) ? out.free_vars : dropped).push_back(name);
    for (const auto& g : q.conjuncts) {
        QueryGraph m = g;
        m.free_vars = out.free_vars;
        m.exist_vars.insert(m.exist_vars.end(), dropped.begin(), dropped.end());
        for (auto& e : m.edges)
            for (Term* t : {&e.head, &e.tail})
                if (t->kind == TermKind::free && !wanted.count(t->name)) t->kind = TermKind::existential;
        out.conjuncts.push_back(std::move(m));
    }
    return out;
}

inline DnfQuery marginalize_query(const DnfQuery& q, std::initializer_list<std::string> keep) {
    std::vector<std::string> names(keep);
    return marginalize_query(q, std::span<const std::string>(names));
}

/// Projects every tuple onto `positions` (in the given order); duplicates collapse.
inline AnswerSet marginalize_answers(const AnswerSet& answers, std::span<const std::size_t> positions) {
    AnswerSet out;
    for (const auto& tuple : answers) {
        Tuple projected;
        projected.reserve(positions.size());
        for (std::size_t p : positions) {
            if (p >= tuple.size()) fail(ErrorKind::logic, "projection position out of range");
            projected.push_back(tuple[p]);
        }
        out.insert(std::move(projected));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Merge transformation

/// An edge of a merged graph. `head_pos` / `tail_pos` are the hypernode
/// positions an endpoint touches, or -1 when the endpoint is outside it.
struct HyperEdge {
    std::size_t id = 0;  // index of the edge in the source graph
    QueryEdge edge;
    int head_pos = -1;
    int tail_pos = -1;
};

/// A query graph in which a group of free variables has been replaced by one
/// hypernode whose tuple positions follow `members`.
struct MergedQuery {
    std::vector<std::string> members;
    std::vector<HyperEdge> external;   // exactly one endpoint inside the hypernode
    std::vector<HyperEdge> internal;   // both endpoints inside (self-loops of the hypernode)
    std::vector<HyperEdge> untouched;  // no endpoint inside
    std::vector<std::string> free_vars;
    std::vector<std::string> exist_vars;

    int position(std::string_view name) const {
        auto it = std::find(members.begin(), members.end(), name);
        return it == members.end() ? -1 : static_cast<int>(it - members.begin());
    }
};

/// Replaces the free-variable groups `a` and `b` with one hypernode. Position
/// order is the lexicographic order of the member names.
inline MergedQuery merge_structure(const QueryGraph& g, std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) fail(ErrorKind::logic, "merge needs two non-empty groups");
    std::set<std::string> members;
    for (auto group : {a, b})
        for (const auto& name : group) {
            if (!g.is_free(name)) fail(ErrorKind::logic, "'" + name + "' is not a free variable");
            if (!members.insert(name).second) fail(ErrorKind::logic, "merge groups overlap on '" + name + "'");
        }
    MergedQuery m;
    m.members.assign(members.begin(), members.end());
    for (const auto& name : g.free_vars)
        if (!members.count(name)) m.free_vars.push_back(name);
    m.exist_vars = g.exist_vars;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        HyperEdge h{i, e, -1, -1};
        if (e.head.kind == TermKind::free) h.head_pos = m.position(e.head.name);
        if (e.tail.kind == TermKind::free) h.tail_pos = m.position(e.tail.name);
        if (h.head_pos >= 0 && h.tail_pos >= 0)
            m.internal.push_back(std::move(h));
        else if (h.head_pos >= 0 || h.tail_pos >= 0)
            m.external.push_back(std::move(h));
        else
            m.untouched.push_back(std::move(h));
    }
    return m;
}

inline MergedQuery merge_structure(const QueryGraph& g, const std::string& a, const std::string& b) {
    if (a == b) fail(ErrorKind::logic, "cannot merge '" + a + "' with itself");
    return merge_structure(g, std::span<const std::string>(&a, 1), std::span<const std::string>(&b, 1));
}

// ---------------------------------------------------------------------------
// Grounding of template placeholders

struct Grounding {
    std::map<int, EntityId> entities;
    std::map<int, RelationId> relations;
};

inline DnfQuery ground(const DnfQuery& skeleton, const Grounding& binding) {
    DnfQuery q = skeleton;
    auto bind_term = [&](Term& t) {
        if (!t.placeholder) return;
        auto it = binding.entities.find(t.placeholder);
        if (it == binding.entities.end()) fail(ErrorKind::logic, "unbound placeholder ?" + std::to_string(t.placeholder));
        t = Term::constant(it->second);
    };
    for (auto& g : q.conjuncts)
        for (auto& e : g.edges) {
            bind_term(e.head);
            bind_term(e.tail);
            if (e.relation_placeholder) {
                auto it = binding.relations.find(e.relation_placeholder);
                if (it == binding.relations.end())
                    fail(ErrorKind::logic, "unbound placeholder ?r" + std::to_string(e.relation_placeholder));
                e.relation = it->second;
                e.relation_placeholder = 0;
            }
        }
    return q;
}

}  // namespace ns3
