#pragma once
#include <cctype>
#include <string>
#include <vector>

#include "quiver.hpp"

namespace saguaro {

// Line-oriented DSL, grammar per the project README:
//   quiver    { vertices 1..n ; arrow NAME : i -> j ; ... }
//   relations { TERM (+|- TERM)* ; ... ; loewy L }
//   module    { gen NAME @ VERTEX ; rel TERM(GEN) (+|- TERM(GEN))* ; ... }
// TERM = [COEFF *] NAME(*NAME)*, where a*b means "a after b".
// COEFF = decimal integer or p/q. '#' starts a comment to end of line.

namespace detail {

struct Token {
    enum Kind { Ident, Int, Sym, End } kind = End;
    std::string text;
    int line = 0, col = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw input_error("parse error at line " + std::to_string(tok_.line) + ", col " +
                          std::to_string(tok_.col) + ": " + msg +
                          (tok_.kind == Token::End ? " (at end of input)"
                                                   : " (near '" + tok_.text + "')"));
    }

  private:
    void advance() {
        skip_ws();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_ = {Token::End, "", line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                s += take();
            tok_ = {Token::Ident, s, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                s += take();
            tok_ = {Token::Int, s, tok_.line, tok_.col};
            return;
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            take();
            take();
            tok_ = {Token::Sym, "->", tok_.line, tok_.col};
            return;
        }
        if (c == '.' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '.') {
            take();
            take();
            tok_ = {Token::Sym, "..", tok_.line, tok_.col};
            return;
        }
        static const std::string singles = "{};:*@()+-/";
        if (singles.find(c) != std::string::npos) {
            tok_ = {Token::Sym, std::string(1, take()), tok_.line, tok_.col};
            return;
        }
        tok_ = {Token::Sym, std::string(1, c), line_, col_};
        fail("unexpected character");
    }
    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                break;
            }
        }
    }
    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

inline void expect_sym(Lexer& lx, const std::string& s) {
    if (lx.peek().kind != Token::Sym || lx.peek().text != s)
        lx.fail("expected '" + s + "'");
    lx.next();
}
inline void expect_kw(Lexer& lx, const std::string& kw) {
    if (lx.peek().kind != Token::Ident || lx.peek().text != kw)
        lx.fail("expected keyword '" + kw + "'");
    lx.next();
}
inline long expect_int(Lexer& lx) {
    if (lx.peek().kind != Token::Int)
        lx.fail("expected integer");
    return std::stol(lx.next().text);
}
inline std::string expect_ident(Lexer& lx) {
    if (lx.peek().kind != Token::Ident)
        lx.fail("expected identifier");
    return lx.next().text;
}

// [COEFF *] NAME (*NAME)* — arrow names in composition order (first = last applied).
struct RawTerm {
    Scalar coeff;
    std::vector<std::string> names;
};

inline RawTerm parse_term(Lexer& lx) {
    RawTerm t;
    if (lx.peek().kind == Token::Int) {
        t.coeff.num = std::stol(lx.next().text);
        if (lx.peek().kind == Token::Sym && lx.peek().text == "/") {
            lx.next();
            t.coeff.den = expect_int(lx);
            if (t.coeff.den == 0)
                lx.fail("zero denominator");
        }
        expect_sym(lx, "*");
    }
    t.names.push_back(expect_ident(lx));
    while (lx.peek().kind == Token::Sym && lx.peek().text == "*") {
        lx.next();
        t.names.push_back(expect_ident(lx));
    }
    return t;
}

// Resolve a composition-order name list into a Path (storage is application order).
inline Path resolve_path(const std::vector<std::string>& names, const Quiver& q, Lexer& lx) {
    Path p;
    p.word.reserve(names.size());
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
        auto f = q.arrow_index.find(*it);
        if (f == q.arrow_index.end())
            lx.fail("unknown arrow '" + *it + "'");
        p.word.push_back(f->second);
    }
    p.source = q.arrows[p.word.front()].source;
    if (!p.composable(q))
        lx.fail("path is not composable under the 'a*b = a after b' convention");
    return p;
}

} // namespace detail

inline Presentation parse_presentation(const std::string& text) {
    using namespace detail;
    Lexer lx(text);
    Presentation pres;

    expect_kw(lx, "quiver");
    expect_sym(lx, "{");
    expect_kw(lx, "vertices");
    long lo = expect_int(lx);
    expect_sym(lx, "..");
    long hi = expect_int(lx);
    if (lo != 1 || hi < 1)
        lx.fail("vertex range must be 1..n with n >= 1");
    pres.quiver.num_vertices = static_cast<int>(hi);
    expect_sym(lx, ";");
    while (lx.peek().kind == Token::Ident && lx.peek().text == "arrow") {
        lx.next();
        std::string name = expect_ident(lx);
        expect_sym(lx, ":");
        long s = expect_int(lx);
        expect_sym(lx, "->");
        long t = expect_int(lx);
        expect_sym(lx, ";");
        if (!pres.quiver.valid_vertex(static_cast<int>(s)) ||
            !pres.quiver.valid_vertex(static_cast<int>(t)))
            lx.fail("arrow endpoint outside declared vertex range");
        pres.quiver.add_arrow(name, static_cast<int>(s), static_cast<int>(t));
    }
    expect_sym(lx, "}");

    expect_kw(lx, "relations");
    expect_sym(lx, "{");
    std::vector<Relation> raw;
    bool have_loewy = false;
    while (true) {
        if (lx.peek().kind == Token::Ident && lx.peek().text == "loewy") {
            lx.next();
            long L = expect_int(lx);
            if (L < 2)
                lx.fail("loewy bound must be >= 2");
            pres.loewy_bound = static_cast<int>(L);
            have_loewy = true;
            if (lx.peek().kind == Token::Sym && lx.peek().text == ";")
                lx.next();
            break;
        }
        if (lx.peek().kind == Token::Sym && lx.peek().text == "}")
            break;
        Relation rel;
        bool neg = false;
        if (lx.peek().kind == Token::Sym && (lx.peek().text == "-" || lx.peek().text == "+")) {
            neg = lx.next().text == "-";
        }
        while (true) {
            RawTerm rt = parse_term(lx);
            RelationTerm term;
            term.coeff = rt.coeff;
            if (neg)
                term.coeff.num = -term.coeff.num;
            term.path = resolve_path(rt.names, pres.quiver, lx);
            rel.terms.push_back(term);
            if (lx.peek().kind == Token::Sym &&
                (lx.peek().text == "+" || lx.peek().text == "-")) {
                neg = lx.next().text == "-";
                continue;
            }
            break;
        }
        expect_sym(lx, ";");
        raw.push_back(rel);
    }
    expect_sym(lx, "}");
    if (lx.peek().kind != Token::End)
        lx.fail("trailing input after relations block");
    if (!have_loewy)
        throw input_error("relations block must declare a loewy bound");

    // Redundancy pruning: terms at or beyond the loewy bound are already zero.
    for (auto& rel : raw) {
        std::vector<RelationTerm> kept;
        for (auto& t : rel.terms)
            if (t.path.length() < pres.loewy_bound)
                kept.push_back(t);
        rel.terms = kept;
        if (!rel.terms.empty())
            pres.relations.push_back(rel);
    }
    pres.validate();
    return pres;
}

inline ModuleSpec parse_module_spec(const std::string& text, const Presentation& pres) {
    using namespace detail;
    Lexer lx(text);
    ModuleSpec spec;

    expect_kw(lx, "module");
    expect_sym(lx, "{");
    while (lx.peek().kind == Token::Ident &&
           (lx.peek().text == "gen" || lx.peek().text == "rel")) {
        std::string kw = lx.next().text;
        if (kw == "gen") {
            std::string name = expect_ident(lx);
            expect_sym(lx, "@");
            long v = expect_int(lx);
            expect_sym(lx, ";");
            if (spec.gen_index(name) >= 0)
                lx.fail("duplicate generator '" + name + "'");
            if (!pres.quiver.valid_vertex(static_cast<int>(v)))
                lx.fail("generator vertex outside declared range");
            spec.gens.emplace_back(name, static_cast<int>(v));
        } else {
            std::vector<ModuleSpecTerm> rel;
            bool neg = false;
            if (lx.peek().kind == Token::Sym &&
                (lx.peek().text == "-" || lx.peek().text == "+"))
                neg = lx.next().text == "-";
            while (true) {
                RawTerm rt = parse_term(lx);
                expect_sym(lx, "(");
                std::string gname = expect_ident(lx);
                expect_sym(lx, ")");
                int gi = spec.gen_index(gname);
                if (gi < 0)
                    lx.fail("unknown generator '" + gname + "'");
                ModuleSpecTerm term;
                term.coeff = rt.coeff;
                if (neg)
                    term.coeff.num = -term.coeff.num;
                term.path = resolve_path(rt.names, pres.quiver, lx);
                term.gen = gi;
                rel.push_back(term);
                if (lx.peek().kind == Token::Sym &&
                    (lx.peek().text == "+" || lx.peek().text == "-")) {
                    neg = lx.next().text == "-";
                    continue;
                }
                break;
            }
            expect_sym(lx, ";");
            spec.relators.push_back(rel);
        }
    }
    expect_sym(lx, "}");
    if (lx.peek().kind != Token::End)
        lx.fail("trailing input after module block");
    spec.validate(pres.quiver);
    return spec;
}

// Round-trip printer: parse(pretty_print(p)) == p up to whitespace.
inline std::string pretty_print(const Presentation& p) {
    std::string out = "quiver {\n  vertices 1.." + std::to_string(p.quiver.num_vertices) + ";\n";
    for (const auto& a : p.quiver.arrows)
        out += "  arrow " + a.name + " : " + std::to_string(a.source) + " -> " +
               std::to_string(a.target) + ";\n";
    out += "}\nrelations {\n";
    for (const auto& r : p.relations) {
        out += "  ";
        for (size_t i = 0; i < r.terms.size(); ++i) {
            const auto& t = r.terms[i];
            long num = t.coeff.num;
            if (i == 0) {
                if (num < 0)
                    out += "- ";
            } else {
                out += num < 0 ? " - " : " + ";
            }
            long an = num < 0 ? -num : num;
            if (an != 1 || t.coeff.den != 1) {
                out += std::to_string(an);
                if (t.coeff.den != 1)
                    out += "/" + std::to_string(t.coeff.den);
                out += " * ";
            }
            out += t.path.str(p.quiver);
        }
        out += ";\n";
    }
    out += "  loewy " + std::to_string(p.loewy_bound) + ";\n}\n";
    return out;
}

inline std::string pretty_print(const ModuleSpec& s, const Presentation& p) {
    std::string out = "module {\n";
    for (const auto& g : s.gens)
        out += "  gen " + g.first + " @ " + std::to_string(g.second) + ";\n";
    for (const auto& rel : s.relators) {
        out += "  rel ";
        for (size_t i = 0; i < rel.size(); ++i) {
            const auto& t = rel[i];
            long num = t.coeff.num;
            if (i == 0) {
                if (num < 0)
                    out += "- ";
            } else {
                out += num < 0 ? " - " : " + ";
            }
            long an = num < 0 ? -num : num;
            if (an != 1 || t.coeff.den != 1) {
                out += std::to_string(an);
                if (t.coeff.den != 1)
                    out += "/" + std::to_string(t.coeff.den);
                out += " * ";
            }
            out += t.path.str(p.quiver) + "(" + s.gens[t.gen].first + ")";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

// Parse a single path written in composition order, e.g. "d*g" or "e3".
inline Path parse_path(const std::string& text, const Quiver& q) {
    using namespace detail;
    if (!text.empty() && text[0] == 'e' &&
        text.find_first_not_of("0123456789", 1) == std::string::npos && text.size() > 1 &&
        !q.arrow_index.count(text)) {
        int v = std::stoi(text.substr(1));
        if (!q.valid_vertex(v))
            throw input_error("trivial path at undeclared vertex " + text);
        return Path::trivial(v);
    }
    Lexer lx(text);
    RawTerm t = parse_term(lx);
    if (lx.peek().kind != Token::End)
        lx.fail("trailing input after path");
    if (t.coeff.num != 1 || t.coeff.den != 1)
        throw input_error("path literal cannot carry a coefficient");
    return resolve_path(t.names, q, lx);
}

} // namespace saguaro
