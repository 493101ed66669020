#include "pdm/errors.hpp"
#include "pdm/expr.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

namespace pdm {

namespace {

enum class Tok { End, Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen };

struct Token {
    Tok kind = Tok::End;
    std::size_t offset = 0;
    std::string_view text;
    double number = 0.0;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Number:
    case Tok::Ident: return "'" + std::string(t.text) + "'";
    default: return "'" + std::string(t.text) + "'";
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= text_.size()) return t;

        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_ + 1;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            t.kind = Tok::Ident;
            t.text = text_.substr(pos_, end - pos_);
            pos_ = end;
            return t;
        }

        switch (c) {
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '^': t.kind = Tok::Caret; break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        default:
            throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                                 std::to_string(pos_),
                             pos_, {});
        }
        t.text = text_.substr(pos_, 1);
        ++pos_;
        return t;
    }

private:
    // digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
    Token number() {
        Token t;
        t.offset = pos_;
        std::size_t end = pos_;
        auto digits = [&] {
            std::size_t start = end;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            return end - start;
        };
        std::size_t mantissa = digits();
        if (end < text_.size() && text_[end] == '.') {
            ++end;
            mantissa += digits();
        }
        if (mantissa == 0) throw ParseError("malformed number at offset " + std::to_string(pos_), pos_, {"digit"});
        if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
            std::size_t save = end;
            ++end;
            if (end < text_.size() && (text_[end] == '+' || text_[end] == '-')) ++end;
            if (digits() == 0) end = save;
        }
        t.kind = Tok::Number;
        t.text = text_.substr(pos_, end - pos_);
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
            throw ParseError("number out of range at offset " + std::to_string(pos_), pos_, {});
        }
        pos_ = end;
        return t;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) { advance(); }

    Expr parse() {
        Expr e = expr();
        if (cur_.kind != Tok::End) fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string msg = "syntax error at offset " + std::to_string(cur_.offset) + ": unexpected " +
                          describe(cur_) + ", expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
        }
        throw ParseError(std::move(msg), cur_.offset, std::move(expected));
    }

    Expr expr() {
        Expr lhs = term();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            const Op op = cur_.kind == Tok::Plus ? Op::Add : Op::Sub;
            advance();
            lhs = Expr::binary(op, std::move(lhs), term());
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = factor();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
            const Op op = cur_.kind == Tok::Star ? Op::Mul : Op::Div;
            advance();
            lhs = Expr::binary(op, std::move(lhs), factor());
        }
        return lhs;
    }

    Expr factor() {
        if (cur_.kind != Tok::Minus) return power();
        advance();
        Expr p = power();
        if (p.is_constant() && last_atom_was_literal_) return Expr::constant(-p.value());
        return -p;
    }

    Expr power() {
        Expr base = atom();
        if (cur_.kind != Tok::Caret) return base;
        advance();
        Expr e = pow(std::move(base), factor());
        last_atom_was_literal_ = false;
        return e;
    }

    Expr atom() {
        last_atom_was_literal_ = false;
        switch (cur_.kind) {
        case Tok::Number: {
            const double v = cur_.number;
            advance();
            last_atom_was_literal_ = true;
            return Expr::constant(v);
        }
        case Tok::Ident: {
            const Token id = cur_;
            advance();
            if (cur_.kind == Tok::LParen) {
                auto fn = function_from_name(id.text);
                if (!fn) {
                    throw ParseError("unknown function '" + std::string(id.text) + "' at offset " +
                                         std::to_string(id.offset),
                                     id.offset, {"function name"});
                }
                advance();
                Expr arg = expr();
                expect_rparen();
                last_atom_was_literal_ = false;
                return Expr::unary(*fn, std::move(arg));
            }
            if (id.text == "x") return Expr::variable();
            return Expr::parameter(std::string(id.text));
        }
        case Tok::LParen: {
            advance();
            Expr inner = expr();
            expect_rparen();
            last_atom_was_literal_ = false;
            return inner;
        }
        default:
            fail({"number", "identifier", "'('", "'-'"});
        }
    }

    void expect_rparen() {
        if (cur_.kind != Tok::RParen) fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"});
        advance();
    }

    Lexer lexer_;
    Token cur_;
    bool last_atom_was_literal_ = false;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse(); }

}  // namespace pdm
