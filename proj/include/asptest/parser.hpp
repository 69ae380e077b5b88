#pragma once
// Parser for the ASP subset plus the `%** @... **%` test annotation language.

#include "error.hpp"
#include "lexer.hpp"
#include "model.hpp"
#include "serialize.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace asptest {

struct SourceUnit {
    std::string path;
    std::string text;
    Program     program; ///< every statement of the file, annotations ignored
    TestSuite   suite;
};

namespace detail {

struct SyntaxAbort {
    ParseError error;
};

struct AttrValue;

struct Attr {
    std::string               key; ///< empty for a positional value
    std::shared_ptr<AttrValue> value;
    std::size_t               token = 0;
};

struct AttrValue {
    enum class Kind { string, integer, list, annotation } kind = Kind::string;
    std::size_t            token = 0; ///< index of the first token of the value
    std::vector<AttrValue> items;     ///< list items
    std::string            name;      ///< annotation name
    std::vector<Attr>      attrs;     ///< annotation attributes
};

class Parser {
public:
    Parser(std::vector<Token> tokens, const Locator& loc, std::string file, std::vector<ParseError>& errors)
        : toks_(std::move(tokens)), loc_(loc), file_(std::move(file)), errors_(errors) {}

    /// Whole-file mode: statements and annotation blocks.
    void parse_unit(Program& program, TestSuite& suite) {
        suite_ = &suite;
        while (kind() != Tok::end) {
            if (kind() == Tok::anno_begin) {
                parse_annotation_block();
                continue;
            }
            if (kind() == Tok::anno_end) {
                report(cur(), "stray '**%'", ParseErrorKind::syntactic);
                advance();
                continue;
            }
            auto pending = std::exchange(pending_rule_, std::nullopt);
            try {
                auto stmt = parse_statement(true);
                if (!check_safety(stmt)) continue;
                if (pending) bind_named(*pending, stmt);
                else suite.anonymous_rules.push_back(stmt);
                program.add(std::move(stmt));
            } catch (const SyntaxAbort& e) {
                errors_.push_back(e.error);
                recover();
            }
        }
        if (pending_rule_) {
            errors_.push_back(pending_rule_->error("@rule must be followed by a rule"));
            pending_rule_.reset();
        }
        for (auto& e : block_conflicts(suite)) errors_.push_back(std::move(e));
    }

    /// Fragment mode for `input = "..."`: statements only.
    Program parse_statements() {
        Program p;
        while (kind() != Tok::end) {
            if (kind() == Tok::anno_begin || kind() == Tok::anno_end) {
                report(cur(), "annotations are not allowed here", ParseErrorKind::syntactic);
                advance();
                continue;
            }
            try {
                auto stmt = parse_statement(true);
                if (check_safety(stmt)) p.add(std::move(stmt));
            } catch (const SyntaxAbort& e) {
                errors_.push_back(e.error);
                recover();
            }
        }
        return p;
    }

    /// Period-separated ground atoms, trailing period optional.
    std::vector<Atom> parse_ground_atoms() {
        std::vector<Atom> atoms;
        try {
            while (kind() != Tok::end) {
                std::size_t at = index_;
                Atom        a  = parse_atom();
                if (!a.is_ground())
                    throw SyntaxAbort{make_error(toks_[at], "assertion atoms must be ground: " + to_string(a),
                                                 ParseErrorKind::annotation)};
                atoms.push_back(std::move(a));
                if (kind() == Tok::dot) advance();
                else if (kind() != Tok::end && kind() != Tok::ident) throw SyntaxAbort{unexpected("'.' between atoms")};
            }
            if (atoms.empty()) throw SyntaxAbort{make_error(cur(), "expected at least one atom", ParseErrorKind::annotation)};
        } catch (const SyntaxAbort& e) {
            errors_.push_back(e.error);
            return {};
        }
        return atoms;
    }

    /// A single `:- body` constraint, trailing period optional.
    std::optional<Rule> parse_constraint() {
        try {
            const Token& first = cur();
            if (kind() != Tok::if_)
                throw SyntaxAbort{make_error(first, "constraint must have the form ':- body.'", ParseErrorKind::annotation)};
            advance();
            Rule r;
            r.origin = span(first);
            r.body   = parse_body();
            if (kind() == Tok::dot) advance();
            if (kind() != Tok::end) throw SyntaxAbort{unexpected("end of constraint")};
            Statement s = r;
            if (!check_safety(s)) return std::nullopt;
            return r;
        } catch (const SyntaxAbort& e) {
            errors_.push_back(e.error);
            return std::nullopt;
        }
    }

    /// `{ @a(...), @b }` or a bare assertion sequence.
    std::vector<Assertion> parse_assertions() {
        std::vector<Assertion> out;
        try {
            bool braced = kind() == Tok::lbrace;
            if (braced) advance();
            while (kind() == Tok::at) {
                AttrValue v = parse_value();
                if (auto a = to_assertion(v)) out.push_back(std::move(*a));
                if (kind() == Tok::comma) advance();
            }
            if (braced) expect(Tok::rbrace, "'}' closing the assertion list");
            if (kind() != Tok::end) throw SyntaxAbort{unexpected("an assertion '@name(...)'")};
        } catch (const SyntaxAbort& e) {
            errors_.push_back(e.error);
        }
        return out;
    }

private:
    struct PendingRule {
        std::string name;
        std::string block;
        ParseError  origin;
        [[nodiscard]] ParseError error(std::string msg, ParseErrorKind kind = ParseErrorKind::annotation) const {
            ParseError e = origin;
            e.message    = std::move(msg);
            e.kind       = kind;
            return e;
        }
    };

    // -- token cursor -------------------------------------------------------
    [[nodiscard]] const Token& cur() const { return toks_[index_]; }
    [[nodiscard]] Tok          kind(std::size_t ahead = 0) const {
        return toks_[std::min(index_ + ahead, toks_.size() - 1)].kind;
    }
    void advance() {
        if (index_ + 1 < toks_.size()) ++index_;
    }

    [[nodiscard]] ParseError make_error(const Token& t, std::string msg, ParseErrorKind kind) const {
        auto p = loc_.at(t.offset);
        return {std::move(msg), p.line, p.column, kind};
    }
    [[nodiscard]] ParseError unexpected(const std::string& wanted) const {
        std::string got = describe(cur().kind);
        if (!cur().text.empty() && cur().kind != Tok::string) got += " '" + cur().text + "'";
        return make_error(cur(), "expected " + wanted + ", found " + got, ParseErrorKind::syntactic);
    }
    void report(const Token& t, std::string msg, ParseErrorKind kind) { errors_.push_back(make_error(t, std::move(msg), kind)); }

    const Token& expect(Tok t, const std::string& wanted) {
        if (kind() != t) throw SyntaxAbort{unexpected(wanted)};
        const Token& tok = cur();
        advance();
        return tok;
    }

    [[nodiscard]] SourceSpan span(const Token& t) const {
        auto p = loc_.at(t.offset);
        return {file_, p.line, p.column};
    }

    /// Skips past the statement that failed to parse.
    void recover() {
        while (kind() != Tok::end && kind() != Tok::anno_begin && kind() != Tok::anno_end) {
            Tok k = kind();
            advance();
            if (k == Tok::dot) {
                if (kind() == Tok::lbracket) { // weight of a weak constraint
                    while (kind() != Tok::end && kind() != Tok::rbracket) advance();
                    if (kind() == Tok::rbracket) advance();
                }
                return;
            }
        }
    }

    // -- statements -----------------------------------------------------------
    Term parse_term() {
        const Token& t = cur();
        switch (t.kind) {
            case Tok::integer: advance(); return integer(t.value);
            case Tok::ident: advance(); return symbol(t.text);
            case Tok::variable:
                advance();
                if (t.text == "_") return variable("_Anon" + std::to_string(anonymous_++));
                return variable(t.text);
            default: throw SyntaxAbort{unexpected("a term")};
        }
    }

    Atom parse_atom() {
        const Token& name = expect(Tok::ident, "an atom");
        Atom         a{name.text, {}};
        if (kind() == Tok::lparen) {
            advance();
            a.args.push_back(parse_term());
            while (kind() == Tok::comma) {
                advance();
                a.args.push_back(parse_term());
            }
            expect(Tok::rparen, "')'");
        }
        return a;
    }

    static bool is_compare(Tok t) { return t >= Tok::eq && t <= Tok::ge; }
    static CompareOp to_op(Tok t) { return static_cast<CompareOp>(static_cast<int>(t) - static_cast<int>(Tok::eq)); }

    CompareOp parse_op() {
        if (!is_compare(kind())) throw SyntaxAbort{unexpected("a comparison operator")};
        CompareOp op = to_op(kind());
        advance();
        return op;
    }

    Literal parse_comparison_rest(Term lhs) {
        CompareOp op = parse_op();
        if (kind() == Tok::count)
            throw SyntaxAbort{make_error(cur(), "aggregate guards must appear on the right: '#count{...} op term'",
                                         ParseErrorKind::syntactic)};
        Term rhs = parse_term();
        return Literal{false, Comparison{std::move(lhs), op, std::move(rhs)}};
    }

    Literal parse_literal() {
        switch (kind()) {
            case Tok::not_: {
                advance();
                if (kind() != Tok::ident) throw SyntaxAbort{unexpected("an atom after 'not'")};
                Atom a = parse_atom();
                if (is_compare(kind())) throw SyntaxAbort{make_error(cur(), "negated comparisons are not supported", ParseErrorKind::syntactic)};
                return neg(std::move(a));
            }
            case Tok::count: {
                advance();
                expect(Tok::lbrace, "'{' after '#count'");
                CountAggregate agg;
                agg.tuple.push_back(parse_term());
                while (kind() == Tok::comma) {
                    advance();
                    agg.tuple.push_back(parse_term());
                }
                expect(Tok::colon, "':' in aggregate element");
                if (kind() != Tok::ident) throw SyntaxAbort{unexpected("a condition atom")};
                agg.condition = parse_atom();
                expect(Tok::rbrace, "'}' closing the aggregate");
                agg.op    = parse_op();
                agg.guard = parse_term();
                return Literal{false, std::move(agg)};
            }
            case Tok::integer:
            case Tok::variable: return parse_comparison_rest(parse_term());
            case Tok::ident: {
                Atom a = parse_atom();
                if (is_compare(kind())) {
                    if (!a.args.empty())
                        throw SyntaxAbort{make_error(cur(), "only constants and variables can be compared", ParseErrorKind::syntactic)};
                    return parse_comparison_rest(symbol(a.predicate));
                }
                return pos(std::move(a));
            }
            default: throw SyntaxAbort{unexpected("a body literal")};
        }
    }

    std::vector<Literal> parse_body() {
        std::vector<Literal> body;
        body.push_back(parse_literal());
        while (kind() == Tok::comma) {
            advance();
            body.push_back(parse_literal());
        }
        return body;
    }

    std::int64_t parse_weight(const char* what) {
        if (kind() == Tok::variable)
            throw SyntaxAbort{make_error(cur(), std::string(what) + " must be an integer constant", ParseErrorKind::syntactic)};
        const Token& t = expect(Tok::integer, std::string("an integer ") + what);
        if (t.value < 0) throw SyntaxAbort{make_error(t, std::string(what) + " must be nonnegative", ParseErrorKind::syntactic)};
        return t.value;
    }

    Statement parse_statement(bool require_dot) {
        const Token& first = cur();
        if (kind() == Tok::wif) {
            advance();
            WeakConstraint w;
            w.origin = span(first);
            w.body   = parse_body();
            expect(Tok::dot, "'.' before the weight");
            expect(Tok::lbracket, "'[cost@level]'");
            w.cost = parse_weight("cost");
            if (kind() == Tok::at) {
                advance();
                w.level = parse_weight("level");
            }
            if (kind() == Tok::comma)
                throw SyntaxAbort{make_error(cur(), "weak-constraint term tuples are not supported", ParseErrorKind::syntactic)};
            expect(Tok::rbracket, "']'");
            return w;
        }
        Rule r;
        r.origin = span(first);
        if (kind() == Tok::ident) {
            r.head.push_back(parse_atom());
            while (kind() == Tok::bar) {
                advance();
                r.head.push_back(parse_atom());
            }
        }
        if (kind() == Tok::if_) {
            advance();
            r.body = parse_body();
        }
        if (r.head.empty() && r.body.empty()) throw SyntaxAbort{unexpected("a rule")};
        if (require_dot) expect(Tok::dot, "'.' at end of rule");
        return r;
    }

    bool check_safety(const Statement& s) {
        std::set<std::string> bad;
        SourceSpan            origin;
        if (auto* r = std::get_if<Rule>(&s)) {
            bad    = unsafe_variables(r->head, r->body);
            origin = r->origin;
        }
        else {
            const auto& w = std::get<WeakConstraint>(s);
            bad           = unsafe_variables({}, w.body);
            origin        = w.origin;
        }
        if (bad.empty()) return true;
        std::string names;
        for (const auto& v : bad) names += (names.empty() ? "" : ", ") + v;
        errors_.push_back({"unsafe variable(s) " + names + " in '" + to_string(s) + "'", origin.line, origin.column,
                           ParseErrorKind::safety});
        return false;
    }

    // -- annotations ------------------------------------------------------------
    void parse_annotation_block() {
        advance(); // %**
        try {
            do {
                std::size_t at = index_;
                AttrValue   v  = parse_value();
                if (v.kind != AttrValue::Kind::annotation) throw SyntaxAbort{make_error(toks_[at], "expected an annotation", ParseErrorKind::annotation)};
                handle_annotation(v);
            } while (kind() == Tok::at);
            if (kind() != Tok::anno_end) throw SyntaxAbort{unexpected("'**%' closing the annotation")};
            advance();
        } catch (SyntaxAbort& e) {
            if (e.error.kind == ParseErrorKind::syntactic) e.error.kind = ParseErrorKind::annotation;
            errors_.push_back(e.error);
            while (kind() != Tok::end && kind() != Tok::anno_end) advance();
            if (kind() == Tok::anno_end) advance();
        }
    }

    static bool starts_value(Tok t) {
        return t == Tok::string || t == Tok::integer || t == Tok::lbrace || t == Tok::at;
    }

    AttrValue parse_value() {
        AttrValue v;
        v.token = index_;
        switch (kind()) {
            case Tok::string: v.kind = AttrValue::Kind::string; advance(); return v;
            case Tok::integer: v.kind = AttrValue::Kind::integer; advance(); return v;
            case Tok::lbrace:
                v.kind = AttrValue::Kind::list;
                advance();
                while (kind() != Tok::rbrace) {
                    if (!starts_value(kind())) throw SyntaxAbort{unexpected("a list element or '}'")};
                    v.items.push_back(parse_value());
                    if (kind() == Tok::comma) advance();
                }
                advance();
                return v;
            case Tok::at: {
                v.kind = AttrValue::Kind::annotation;
                advance();
                v.name = expect(Tok::ident, "an annotation name").text;
                if (kind() != Tok::lparen) return v;
                advance();
                while (kind() != Tok::rparen) {
                    Attr a;
                    a.token = index_;
                    if (kind() == Tok::ident && kind(1) == Tok::eq) {
                        a.key = cur().text;
                        advance();
                        advance();
                    }
                    if (!starts_value(kind())) throw SyntaxAbort{unexpected("an attribute value")};
                    a.value = std::make_shared<AttrValue>(parse_value());
                    v.attrs.push_back(std::move(a));
                    // commas between attributes are optional
                    if (kind() == Tok::comma) advance();
                    else if (kind() != Tok::rparen && !(kind() == Tok::ident && kind(1) == Tok::eq))
                        throw SyntaxAbort{unexpected("',' or ')'")};
                }
                advance();
                return v;
            }
            default: throw SyntaxAbort{unexpected("an attribute value")};
        }
    }

    /// Attribute lookup with unknown/duplicate detection.
    class AttrSet {
    public:
        AttrSet(Parser& p, const AttrValue& v, std::initializer_list<const char*> allowed, const char* positional)
            : p_(p), v_(v) {
            for (const auto& a : v.attrs) {
                std::string key = a.key.empty() && positional ? positional : a.key;
                if (key.empty())
                    throw SyntaxAbort{p.make_error(p.toks_[a.token], "@" + v.name + " takes named attributes only", ParseErrorKind::annotation)};
                if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; }) == allowed.end())
                    throw SyntaxAbort{p.make_error(p.toks_[a.token], "unknown attribute '" + key + "' for @" + v.name, ParseErrorKind::annotation)};
                if (!seen_.emplace(key, &a).second)
                    throw SyntaxAbort{p.make_error(p.toks_[a.token], "duplicate attribute '" + key + "'", ParseErrorKind::annotation)};
            }
        }
        [[nodiscard]] const Attr* find(const std::string& key) const {
            auto it = seen_.find(key);
            return it == seen_.end() ? nullptr : it->second;
        }
        const Attr& require(const std::string& key) const {
            if (auto* a = find(key)) return *a;
            throw SyntaxAbort{p_.make_error(p_.toks_[v_.token], "@" + v_.name + " requires attribute '" + key + "'", ParseErrorKind::annotation)};
        }
        const Token& string(const Attr& a) const {
            if (a.value->kind != AttrValue::Kind::string)
                throw SyntaxAbort{p_.make_error(p_.toks_[a.value->token], "attribute '" + a.key + "' must be a string", ParseErrorKind::annotation)};
            return p_.toks_[a.value->token];
        }
        std::int64_t natural(const Attr& a) const {
            const Token& t = p_.toks_[a.value->token];
            if (a.value->kind != AttrValue::Kind::integer || t.value < 0)
                throw SyntaxAbort{p_.make_error(t, "attribute '" + a.key + "' must be a nonnegative integer", ParseErrorKind::annotation)};
            return t.value;
        }
        std::vector<std::string> strings(const Attr& a) const {
            if (a.value->kind != AttrValue::Kind::list)
                throw SyntaxAbort{p_.make_error(p_.toks_[a.value->token], "attribute '" + a.key + "' must be a list {...}", ParseErrorKind::annotation)};
            std::vector<std::string> out;
            for (const auto& item : a.value->items) {
                if (item.kind != AttrValue::Kind::string)
                    throw SyntaxAbort{p_.make_error(p_.toks_[item.token], "list '" + a.key + "' must contain strings", ParseErrorKind::annotation)};
                out.push_back(p_.toks_[item.token].text);
            }
            return out;
        }

    private:
        Parser&                                 p_;
        const AttrValue&                        v_;
        std::map<std::string, const Attr*>      seen_;
    };

    /// Runs a nested parser over the contents of a string token.
    template <typename Fn>
    auto parse_embedded(const Token& str, Fn&& fn) {
        Locator sub = Locator::explicit_table(str.content_positions);
        std::vector<ParseError> nested;
        Lexer   lex(str.text, sub);
        auto    toks = lex.run(nested);
        Parser  inner(std::move(toks), sub, file_, nested);
        auto    result = fn(inner);
        bool    ok     = nested.empty();
        errors_.insert(errors_.end(), nested.begin(), nested.end());
        return std::pair{std::move(result), ok};
    }

    std::vector<Atom> atoms_of(const AttrSet& s, const Attr& a, bool& ok) {
        auto [atoms, good] = parse_embedded(s.string(a), [](Parser& p) { return p.parse_ground_atoms(); });
        ok = ok && good;
        return atoms;
    }

    Rule constraint_of(const AttrSet& s, const Attr& a, bool& ok) {
        auto [c, good] = parse_embedded(s.string(a), [](Parser& p) { return p.parse_constraint(); });
        ok = ok && good && c.has_value();
        return c.value_or(Rule{});
    }

    std::optional<Assertion> to_assertion(const AttrValue& v) {
        if (v.kind != AttrValue::Kind::annotation)
            throw SyntaxAbort{make_error(toks_[v.token], "expected an assertion '@name(...)'", ParseErrorKind::annotation)};
        const std::string& n  = v.name;
        bool               ok = true;
        std::optional<Assertion> out;
        auto counted = [&](auto tag) {
            using T = decltype(tag);
            AttrSet s(*this, v, {"number", "atoms"}, "atoms");
            T       x;
            x.number = static_cast<std::uint64_t>(s.natural(s.require("number")));
            x.atoms  = atoms_of(s, s.require("atoms"), ok);
            out      = x;
        };
        auto constrained = [&](auto tag) {
            using T = decltype(tag);
            AttrSet s(*this, v, {"number", "constraint"}, "constraint");
            T       x;
            x.number     = static_cast<std::uint64_t>(s.natural(s.require("number")));
            x.constraint = constraint_of(s, s.require("constraint"), ok);
            out          = x;
        };
        if (n == "noAnswerSet") {
            AttrSet s(*this, v, {}, nullptr);
            out = NoAnswerSet{};
        }
        else if (n == "trueInAll") {
            AttrSet s(*this, v, {"atoms"}, "atoms");
            out = TrueInAll{atoms_of(s, s.require("atoms"), ok)};
        }
        else if (n == "trueInAtLeast") counted(TrueInAtLeast{});
        else if (n == "trueInAtMost") counted(TrueInAtMost{});
        else if (n == "trueInExactly") counted(TrueInExactly{});
        else if (n == "constraintForAll") {
            AttrSet s(*this, v, {"constraint"}, "constraint");
            out = ConstraintForAll{constraint_of(s, s.require("constraint"), ok)};
        }
        else if (n == "constraintInAtLeast") constrained(ConstraintInAtLeast{});
        else if (n == "constraintInAtMost") constrained(ConstraintInAtMost{});
        else if (n == "constraintInExactly") constrained(ConstraintInExactly{});
        else if (n == "bestModelCost") {
            AttrSet       s(*this, v, {"cost", "level"}, nullptr);
            BestModelCost b;
            b.cost  = s.natural(s.require("cost"));
            b.level = s.natural(s.require("level"));
            out     = b;
        }
        else {
            throw SyntaxAbort{make_error(toks_[v.token], "unknown assertion '@" + n + "'", ParseErrorKind::annotation)};
        }
        if (!ok) return std::nullopt;
        return out;
    }

    void handle_annotation(const AttrValue& v) {
        const Token& at = toks_[v.token];
        if (pending_rule_) {
            errors_.push_back(pending_rule_->error("@rule must be followed by a rule, found another annotation"));
            pending_rule_.reset();
        }
        if (v.name == "rule") {
            AttrSet     s(*this, v, {"name", "block"}, nullptr);
            PendingRule p;
            p.name = s.string(s.require("name")).text;
            if (auto* b = s.find("block")) p.block = s.string(*b).text;
            p.origin = make_error(at, "", ParseErrorKind::annotation);
            if (suite_->named_rules.count(p.name))
                throw SyntaxAbort{make_error(at, "duplicate rule name '" + p.name + "'", ParseErrorKind::duplicate_name)};
            pending_rule_ = std::move(p);
        }
        else if (v.name == "block") {
            AttrSet     s(*this, v, {"name", "rules"}, nullptr);
            Block       b;
            b.name   = s.string(s.require("name")).text;
            b.origin = span(at);
            if (auto* r = s.find("rules")) b.listed = s.strings(*r);
            if (suite_->blocks.count(b.name))
                throw SyntaxAbort{make_error(at, "duplicate block name '" + b.name + "'", ParseErrorKind::duplicate_name)};
            suite_->blocks.emplace(b.name, std::move(b));
        }
        else if (v.name == "test") {
            AttrSet  s(*this, v, {"name", "scope", "programFiles", "input", "inputFiles", "assert"}, nullptr);
            TestSpec t;
            t.name   = s.string(s.require("name")).text;
            t.origin = span(at);
            t.scope  = s.strings(s.require("scope"));
            if (t.scope.empty())
                throw SyntaxAbort{make_error(at, "test '" + t.name + "' has an empty scope", ParseErrorKind::annotation)};
            if (auto* a = s.find("programFiles")) t.program_files = s.strings(*a);
            if (auto* a = s.find("inputFiles")) t.input_files = s.strings(*a);
            bool ok = true;
            if (auto* a = s.find("input")) {
                const Token& str = s.string(*a);
                t.input          = str.text;
                ok               = parse_embedded(str, [](Parser& p) { return p.parse_statements(); }).second;
            }
            const Attr& asserts = s.require("assert");
            if (asserts.value->kind != AttrValue::Kind::list)
                throw SyntaxAbort{make_error(toks_[asserts.value->token], "attribute 'assert' must be a list {...}", ParseErrorKind::annotation)};
            for (const auto& item : asserts.value->items) {
                if (auto a = to_assertion(item)) t.asserts.push_back(std::move(*a));
                else ok = false;
            }
            if (ok) suite_->tests.push_back(std::move(t));
        }
        else {
            throw SyntaxAbort{make_error(at, "unknown annotation '@" + v.name + "'", ParseErrorKind::annotation)};
        }
    }

    void bind_named(const PendingRule& p, const Statement& stmt) {
        if (suite_->named_rules.count(p.name)) {
            errors_.push_back(p.error("duplicate rule name '" + p.name + "'", ParseErrorKind::duplicate_name));
            return;
        }
        suite_->named_rules.emplace(p.name, NamedRule{p.name, stmt, p.block});
        suite_->rule_order.push_back(p.name);
    }

public:
    /// A rule claiming block A while block B lists it is contradictory.
    static std::vector<ParseError> block_conflicts(const TestSuite& suite) {
        std::vector<ParseError> out;
        for (const auto& [name, block] : suite.blocks) {
            for (const auto& member : block.listed) {
                auto it = suite.named_rules.find(member);
                if (it != suite.named_rules.end() && !it->second.block.empty() && it->second.block != name) {
                    out.push_back({"rule '" + member + "' claims block '" + it->second.block + "' but block '" + name +
                                       "' lists it",
                                   block.origin.line, block.origin.column, ParseErrorKind::duplicate_name});
                }
            }
        }
        return out;
    }

private:
    std::vector<Token>         toks_;
    const Locator&             loc_;
    std::string                file_;
    std::vector<ParseError>&   errors_;
    std::size_t                index_     = 0;
    std::size_t                anonymous_ = 0;
    TestSuite*                 suite_     = nullptr;
    std::optional<PendingRule> pending_rule_;
};

template <typename Fn>
auto run_parser(std::string_view text, const std::string& path, Fn&& fn) {
    std::vector<ParseError> errors;
    Locator                 loc = Locator::for_text(text);
    Lexer                   lex(text, loc);
    auto                    toks = lex.run(errors);
    Parser                  parser(std::move(toks), loc, path, errors);
    auto                    result = fn(parser);
    if (!errors.empty()) {
        std::stable_sort(errors.begin(), errors.end(), [](const ParseError& a, const ParseError& b) {
            return std::pair(a.line, a.column) < std::pair(b.line, b.column);
        });
        throw ParseFailure(path, std::move(errors));
    }
    return result;
}

} // namespace detail

/// Parses a file with its annotations. Throws ParseFailure listing every error found.
inline SourceUnit parse_unit(const std::string& path, std::string text) {
    SourceUnit unit;
    unit.path = path;
    detail::run_parser(text, path, [&](detail::Parser& p) {
        p.parse_unit(unit.program, unit.suite);
        return 0;
    });
    unit.text = std::move(text);
    return unit;
}

/// Plain program text (rules, facts, weak constraints); annotations are rejected.
inline Program parse_program(std::string_view text, const std::string& path = "") {
    return detail::run_parser(text, path, [](detail::Parser& p) { return p.parse_statements(); });
}

/// Value of an `assert = {...}` attribute.
inline std::vector<Assertion> parse_assertion_list(std::string_view text) {
    return detail::run_parser(text, "", [](detail::Parser& p) { return p.parse_assertions(); });
}

/// Whitespace-separated ground atoms, each optionally terminated by '.'; used for solver output.
inline std::vector<Atom> parse_ground_atoms(std::string_view text) {
    return detail::run_parser(text, "", [](detail::Parser& p) { return p.parse_ground_atoms(); });
}

inline Rule parse_constraint(std::string_view text) {
    return detail::run_parser(text, "", [](detail::Parser& p) { return p.parse_constraint(); }).value();
}

/// Blanks out every `%** @... **%` block, keeping line structure.
inline std::string strip_annotations(std::string text) {
    std::size_t pos = 0;
    while ((pos = text.find("%**", pos)) != std::string::npos) {
        std::size_t i = pos + 3;
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size() || text[i] != '@') {
            pos += 3;
            continue;
        }
        auto close = text.find("**%", i);
        if (close == std::string::npos) break;
        for (std::size_t k = pos; k < close + 3; ++k)
            if (text[k] != '\n') text[k] = ' ';
        pos = close + 3;
    }
    return text;
}

/// Combines several files into one unit: programs are concatenated, rule and block names must stay unique.
inline SourceUnit merge_units(std::vector<SourceUnit> units) {
    if (units.size() == 1) return std::move(units.front());
    SourceUnit              out;
    std::vector<ParseError> errors;
    for (auto& u : units) {
        if (!out.path.empty()) out.path += ',';
        out.path += u.path;
        out.text += u.text;
        out.program.append(u.program);
        for (const auto& name : u.suite.rule_order) {
            const auto& nr = u.suite.named_rules.at(name);
            if (!out.suite.named_rules.emplace(name, nr).second) {
                SourceSpan o = std::visit([](const auto& s) { return s.origin; }, nr.statement);
                errors.push_back({"duplicate rule name '" + name + "' (in " + u.path + ")", o.line, o.column,
                                  ParseErrorKind::duplicate_name});
                continue;
            }
            out.suite.rule_order.push_back(name);
        }
        for (const auto& [name, b] : u.suite.blocks) {
            if (!out.suite.blocks.emplace(name, b).second)
                errors.push_back({"duplicate block name '" + name + "' (in " + u.path + ")", b.origin.line,
                                  b.origin.column, ParseErrorKind::duplicate_name});
        }
        out.suite.tests.insert(out.suite.tests.end(), u.suite.tests.begin(), u.suite.tests.end());
        out.suite.anonymous_rules.insert(out.suite.anonymous_rules.end(), u.suite.anonymous_rules.begin(),
                                         u.suite.anonymous_rules.end());
    }
    for (auto& e : detail::Parser::block_conflicts(out.suite)) errors.push_back(std::move(e));
    if (!errors.empty()) throw ParseFailure(out.path, std::move(errors));
    return out;
}

} // namespace asptest
