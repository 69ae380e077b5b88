#pragma once

#include "error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace asptest {

struct Position {
    int line   = 1;
    int column = 1;
};

/// Maps byte offsets of a lexed buffer back to positions in the original file. Buffers cut out of a
/// quoted annotation attribute carry an explicit per-byte table; whole files use line starts.
class Locator {
public:
    static Locator for_text(std::string_view text, Position origin = {}) {
        Locator loc;
        loc.origin_ = origin;
        loc.line_starts_.push_back(0);
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n') loc.line_starts_.push_back(i + 1);
        return loc;
    }
    static Locator explicit_table(std::vector<Position> table) {
        Locator loc;
        loc.table_ = std::move(table);
        return loc;
    }

    [[nodiscard]] Position at(std::size_t offset) const {
        if (!table_.empty()) return table_[std::min(offset, table_.size() - 1)];
        auto it   = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
        auto line = static_cast<int>(it - line_starts_.begin());
        auto col  = static_cast<int>(offset - line_starts_[line - 1]) + 1;
        if (line == 1) col += origin_.column - 1;
        return {line + origin_.line - 1, col};
    }

private:
    Position                 origin_;
    std::vector<std::size_t> line_starts_;
    std::vector<Position>    table_;
};

enum class Tok {
    ident, variable, integer, string,
    lparen, rparen, lbrace, rbrace, lbracket, rbracket,
    comma, dot, colon, if_, wif, bar, at,
    eq, ne, lt, le, gt, ge,
    count, not_,
    anno_begin, anno_end,
    end
};

inline const char* describe(Tok t) {
    switch (t) {
        case Tok::ident:      return "identifier";
        case Tok::variable:   return "variable";
        case Tok::integer:    return "integer";
        case Tok::string:     return "string";
        case Tok::lparen:     return "'('";
        case Tok::rparen:     return "')'";
        case Tok::lbrace:     return "'{'";
        case Tok::rbrace:     return "'}'";
        case Tok::lbracket:   return "'['";
        case Tok::rbracket:   return "']'";
        case Tok::comma:      return "','";
        case Tok::dot:        return "'.'";
        case Tok::colon:      return "':'";
        case Tok::if_:        return "':-'";
        case Tok::wif:        return "':~'";
        case Tok::bar:        return "'|'";
        case Tok::at:         return "'@'";
        case Tok::eq:         return "'='";
        case Tok::ne:         return "'<>'";
        case Tok::lt:         return "'<'";
        case Tok::le:         return "'<='";
        case Tok::gt:         return "'>'";
        case Tok::ge:         return "'>='";
        case Tok::count:      return "'#count'";
        case Tok::not_:       return "'not'";
        case Tok::anno_begin: return "'%**'";
        case Tok::anno_end:   return "'**%'";
        case Tok::end:        return "end of input";
    }
    return "token";
}

struct Token {
    Tok                   kind = Tok::end;
    std::string           text;     ///< identifier name, or unescaped string contents
    std::int64_t          value = 0;
    std::size_t           offset = 0;
    std::vector<Position> content_positions; ///< strings only: source position of every unescaped byte, plus one past the end
};

/// Splits a buffer into tokens. Annotation blocks `%** @... **%` are delimited by anno_begin/anno_end;
/// plain `%` and `%* ... *%` comments are dropped. Lexical errors are collected and lexing resumes.
class Lexer {
public:
    Lexer(std::string_view text, const Locator& loc) : text_(text), loc_(loc) {}

    std::vector<Token> run(std::vector<ParseError>& errors) {
        std::vector<Token> out;
        bool               in_annotation = false;
        std::size_t        anno_start    = 0;
        for (;;) {
            skip_space_and_comments(in_annotation, errors);
            if (pos_ >= text_.size()) break;
            std::size_t start = pos_;
            char        c     = text_[pos_];
            if (!in_annotation && starts_annotation()) {
                pos_ += 3;
                out.push_back({Tok::anno_begin, "", 0, start, {}});
                in_annotation = true;
                anno_start    = start;
                continue;
            }
            if (in_annotation && text_.substr(pos_, 3) == "**%") {
                pos_ += 3;
                out.push_back({Tok::anno_end, "", 0, start, {}});
                in_annotation = false;
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
                lex_integer(out, errors);
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                lex_word(out, errors);
                continue;
            }
            if (c == '"') {
                lex_string(out, errors);
                continue;
            }
            if (c == '#') {
                std::size_t e = pos_ + 1;
                while (e < text_.size() && std::isalpha(static_cast<unsigned char>(text_[e]))) ++e;
                std::string_view word = text_.substr(pos_, e - pos_);
                pos_                  = e;
                if (word == "#count") out.push_back({Tok::count, std::string(word), 0, start, {}});
                else error(errors, start, "unsupported directive '" + std::string(word) + "'");
                continue;
            }
            if (auto t = punct(); t != Tok::end) {
                out.push_back({t, "", 0, start, {}});
                continue;
            }
            error(errors, start, std::string("unexpected character '") + c + "'");
            ++pos_;
        }
        if (in_annotation) error(errors, anno_start, "unterminated annotation, missing '**%'");
        out.push_back({Tok::end, "", 0, text_.size(), {}});
        return out;
    }

private:
    void error(std::vector<ParseError>& errors, std::size_t offset, std::string msg) const {
        auto p = loc_.at(offset);
        errors.push_back({std::move(msg), p.line, p.column, ParseErrorKind::lexical});
    }

    [[nodiscard]] bool starts_annotation() const {
        if (text_.substr(pos_, 3) != "%**") return false;
        std::size_t i = pos_ + 3;
        while (i < text_.size() && std::isspace(static_cast<unsigned char>(text_[i]))) ++i;
        return i < text_.size() && text_[i] == '@';
    }

    void skip_space_and_comments(bool in_annotation, std::vector<ParseError>& errors) {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            }
            else if (c == '%' && !in_annotation && !starts_annotation()) {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                    auto close = text_.find("*%", pos_ + 2);
                    if (close == std::string_view::npos) {
                        error(errors, pos_, "unterminated block comment, missing '*%'");
                        pos_ = text_.size();
                    }
                    else {
                        pos_ = close + 2;
                    }
                }
                else {
                    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
                }
            }
            else {
                return;
            }
        }
    }

    void lex_integer(std::vector<Token>& out, std::vector<ParseError>& errors) {
        std::size_t start = pos_;
        if (text_[pos_] == '-') ++pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string digits(text_.substr(start, pos_ - start));
        try {
            out.push_back({Tok::integer, digits, std::stoll(digits), start, {}});
        } catch (const std::out_of_range&) {
            error(errors, start, "integer out of range: " + digits);
        }
    }

    void lex_word(std::vector<Token>& out, std::vector<ParseError>& errors) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] == '_') ++pos_;
        std::size_t first = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '\''))
            ++pos_;
        std::string word(text_.substr(start, pos_ - start));
        if (first == pos_) {
            if (word == "_") out.push_back({Tok::variable, "_", 0, start, {}});
            else error(errors, start, "invalid identifier '" + word + "'");
            return;
        }
        char lead = text_[first];
        if (std::isupper(static_cast<unsigned char>(lead))) out.push_back({Tok::variable, word, 0, start, {}});
        else if (std::islower(static_cast<unsigned char>(lead)))
            out.push_back({word == "not" ? Tok::not_ : Tok::ident, word, 0, start, {}});
        else error(errors, start, "invalid identifier '" + word + "'");
    }

    void lex_string(std::vector<Token>& out, std::vector<ParseError>& errors) {
        std::size_t start = pos_++;
        Token       tok{Tok::string, "", 0, start, {}};
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                char n = text_[pos_ + 1];
                tok.content_positions.push_back(loc_.at(pos_ + 1));
                tok.text += n == 'n' ? '\n' : n == 't' ? '\t' : n;
                pos_ += 2;
                continue;
            }
            tok.content_positions.push_back(loc_.at(pos_));
            tok.text += text_[pos_++];
        }
        if (pos_ >= text_.size()) {
            error(errors, start, "unterminated string");
            return;
        }
        tok.content_positions.push_back(loc_.at(pos_));
        ++pos_;
        out.push_back(std::move(tok));
    }

    Tok punct() {
        auto two = text_.substr(pos_, 2);
        struct P {
            std::string_view s;
            Tok              t;
        };
        static constexpr P twos[] = {{":-", Tok::if_}, {":~", Tok::wif}, {"<>", Tok::ne}, {"!=", Tok::ne},
                                     {"<=", Tok::le},  {">=", Tok::ge},  {"==", Tok::eq}};
        for (const auto& p : twos) {
            if (two == p.s) {
                pos_ += 2;
                return p.t;
            }
        }
        Tok t = Tok::end;
        switch (text_[pos_]) {
            case '(': t = Tok::lparen; break;
            case ')': t = Tok::rparen; break;
            case '{': t = Tok::lbrace; break;
            case '}': t = Tok::rbrace; break;
            case '[': t = Tok::lbracket; break;
            case ']': t = Tok::rbracket; break;
            case ',': t = Tok::comma; break;
            case '.': t = Tok::dot; break;
            case ':': t = Tok::colon; break;
            case '|': t = Tok::bar; break;
            case '@': t = Tok::at; break;
            case '=': t = Tok::eq; break;
            case '<': t = Tok::lt; break;
            case '>': t = Tok::gt; break;
            default: return Tok::end;
        }
        ++pos_;
        return t;
    }

    std::string_view text_;
    const Locator&   loc_;
    std::size_t      pos_ = 0;
};

} // namespace asptest
