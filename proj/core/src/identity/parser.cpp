#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "hqva/identity/script.hpp"

namespace hqva::dsl {

ParseError::ParseError(int l, int c, const std::string& what)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what),
      line(l),
      column(c) {}

namespace {

enum class Tok { Ident, Int, LParen, RParen, LBrace, RBrace, Comma, Star, Slash, Plus, Minus, Caret, EqEq, Eq, Sep, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "name";
        case Tok::Int: return "integer";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::Comma: return "','";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Caret: return "'^'";
        case Tok::EqEq: return "'=='";
        case Tok::Eq: return "'='";
        case Tok::Sep: return "end of statement";
        case Tok::End: return "end of input";
    }
    return "token";
}

// Newlines separate statements except inside brackets. Input without a
// final newline is treated as if it had one, and the end-of-input token sits
// one column past that newline.
std::vector<Token> lex(std::string text) {
    if (text.empty() || text.back() != '\n') text.push_back('\n');
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    int depth = 0;
    std::size_t i = 0;
    auto push = [&](Tok k, std::string s, int c) { out.push_back({k, std::move(s), line, c}); };
    while (i < text.size()) {
        const unsigned char ch = static_cast<unsigned char>(text[i]);
        const int start = col;
        if (ch == '\n') {
            if (depth == 0) push(Tok::Sep, "\n", start);
            if (i + 1 == text.size()) {
                out.push_back({Tok::End, "", line, start + 1});
                return out;
            }
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (ch == '#') {
            while (text[i] != '\n') ++i;
            continue;
        }
        if (std::isspace(ch)) {
            ++i;
            ++col;
            continue;
        }
        // Greek kappa in UTF-8.
        if (ch == 0xCE && i + 1 < text.size() && static_cast<unsigned char>(text[i + 1]) == 0xBA) {
            push(Tok::Ident, "kappa", start);
            i += 2;
            ++col;
            continue;
        }
        if (std::isalpha(ch) || ch == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            push(Tok::Ident, text.substr(i, j - i), start);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(ch)) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            push(Tok::Int, text.substr(i, j - i), start);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        Tok k;
        std::size_t len = 1;
        switch (ch) {
            case '(': k = Tok::LParen; ++depth; break;
            case ')': k = Tok::RParen; depth = std::max(0, depth - 1); break;
            case '{': k = Tok::LBrace; ++depth; break;
            case '}': k = Tok::RBrace; depth = std::max(0, depth - 1); break;
            case ',': k = Tok::Comma; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '^': k = Tok::Caret; break;
            case ';':
                if (depth > 0) throw ParseError(line, start, "unexpected ';' inside brackets");
                k = Tok::Sep;
                break;
            case '=':
                if (i + 1 < text.size() && text[i + 1] == '=') {
                    k = Tok::EqEq;
                    len = 2;
                } else {
                    k = Tok::Eq;
                }
                break;
            default:
                throw ParseError(line, start, std::string("unexpected character '") + text[i] + "'");
        }
        push(k, text.substr(i, len), start);
        i += len;
        col += static_cast<int>(len);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

const std::set<std::string> kReserved = {"h",   "kappa", "c",      "exp",   "inv",     "odot_LR",        "odot_RL",
                                         "family", "rank", "order", "level", "spectral", "multiplicative", "capped",
                                         "slots"};

const std::regex kAtom("^(Rhat|Rtilde|Rt|R|Minv|M|P|conjMinv|conjM)([1-9]*)$");
const std::regex kTransposeSlot("^t([1-9][0-9]*)$");

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    IdentityScript script() {
        IdentityScript s;
        for (;;) {
            skip_seps();
            if (peek().kind == Tok::Ident && is_decl_keyword(peek().text)) {
                declaration(s.decls);
                if (peek().kind != Tok::End) expect(Tok::Sep);
                continue;
            }
            break;
        }
        if (peek().kind == Tok::End) fail(peek(), "expected an equation");
        apply_defaults(s.decls);
        decls_ = &s.decls;
        s.lhs = expr();
        expect(Tok::EqEq);
        s.rhs = expr();
        skip_seps();
        expect(Tok::End);
        int m = 0;
        max_slot(*s.lhs, m);
        max_slot(*s.rhs, m);
        if (s.decls.slots) {
            if (*s.decls.slots < m) {
                fail(toks_.front(), "slot " + std::to_string(m) + " exceeds declared slot count " +
                                        std::to_string(*s.decls.slots));
            }
            m = *s.decls.slots;
        }
        s.slot_count = std::max(m, 1);
        check_odot(*s.lhs, s.slot_count);
        check_odot(*s.rhs, s.slot_count);
        return s;
    }

private:
    static bool is_decl_keyword(const std::string& w) {
        return w == "family" || w == "rank" || w == "order" || w == "level" || w == "spectral" ||
               w == "multiplicative" || w == "capped" || w == "slots";
    }

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        next();
        return true;
    }
    const Token& expect(Tok k) {
        if (peek().kind != k) fail(peek(), std::string("expected ") + describe(k));
        return next();
    }
    [[noreturn]] static void fail(const Token& t, const std::string& what) { throw ParseError(t.line, t.column, what); }

    void skip_seps() {
        while (peek().kind == Tok::Sep) next();
    }

    int integer() {
        const Token& t = expect(Tok::Int);
        try {
            return std::stoi(t.text);
        } catch (const std::out_of_range&) {
            fail(t, "integer too large");
        }
    }

    int signed_integer() {
        const bool neg = accept(Tok::Minus);
        const int v = integer();
        return neg ? -v : v;
    }

    Rational rational_literal() {
        const bool neg = accept(Tok::Minus);
        Rational r = integer();
        if (accept(Tok::Slash)) {
            const Token& t = peek();
            const int d = integer();
            if (d == 0) fail(t, "division by zero");
            r /= d;
        }
        r.canonicalize();
        return neg ? Rational(-r) : r;
    }

    std::string new_name(std::set<std::string>& seen) {
        const Token& t = expect(Tok::Ident);
        if (kReserved.count(t.text) != 0 || std::regex_match(t.text, kAtom)) {
            fail(t, "'" + t.text + "' is reserved");
        }
        if (!seen.insert(t.text).second) fail(t, "'" + t.text + "' declared twice");
        return t.text;
    }

    void declaration(Declarations& d) {
        const Token kw = next();
        const std::string& w = kw.text;
        if (w == "family") {
            const Token& t = expect(Tok::Ident);
            if (t.text != "B" && t.text != "C" && t.text != "D") fail(t, "family must be B, C or D");
            d.family = parse_family(t.text);
        } else if (w == "rank") {
            d.rank = integer();
        } else if (w == "order") {
            d.order = integer();
        } else if (w == "slots") {
            d.slots = integer();
        } else if (w == "level") {
            d.level = rational_literal();
        } else if (w == "spectral" || w == "multiplicative") {
            auto& list = w == "spectral" ? d.spectral : d.multiplicative;
            do {
                list.push_back(new_name(names_));
            } while (accept(Tok::Comma));
        } else {
            do {
                std::string n = new_name(names_);
                expect(Tok::Eq);
                const Token& t = peek();
                const int cap = integer();
                if (cap < 1) fail(t, "cap must be positive");
                d.capped.emplace_back(std::move(n), cap);
            } while (accept(Tok::Comma));
        }
    }

    void apply_defaults(Declarations& d) {
        auto fill = [&](std::vector<std::string>& list, std::initializer_list<const char*> defaults) {
            if (!list.empty()) return;
            for (const char* n : defaults) {
                if (names_.insert(n).second) list.emplace_back(n);
            }
        };
        fill(d.spectral, {"u", "v", "w"});
        fill(d.multiplicative, {"x", "y"});
    }

    bool is_spectral(const std::string& n) const {
        return std::find(decls_->spectral.begin(), decls_->spectral.end(), n) != decls_->spectral.end();
    }
    bool is_multiplicative(const std::string& n) const {
        return std::find(decls_->multiplicative.begin(), decls_->multiplicative.end(), n) !=
               decls_->multiplicative.end();
    }
    bool is_capped(const std::string& n) const {
        return n == "h" || std::any_of(decls_->capped.begin(), decls_->capped.end(),
                                       [&](const auto& c) { return c.first == n; });
    }

    ExprPtr expr() {
        const Token& first = peek();
        std::vector<ExprPtr> factors{factor()};
        while (accept(Tok::Star)) factors.push_back(factor());
        if (factors.size() == 1) return factors[0];
        auto e = std::make_shared<Expr>();
        e->kind = Expr::Kind::Product;
        e->kids = std::move(factors);
        e->line = first.line;
        e->column = first.column;
        return e;
    }

    ExprPtr factor() {
        ExprPtr e = primary();
        while (peek().kind == Tok::Caret) {
            const Token& caret = next();
            expect(Tok::LBrace);
            auto w = std::make_shared<Expr>();
            w->line = caret.line;
            w->column = caret.column;
            w->kids = {e};
            if (accept(Tok::Minus)) {
                const Token& t = peek();
                if (integer() != 1) fail(t, "only ^{-1} is supported");
                w->kind = Expr::Kind::Inverse;
            } else {
                const Token& t = expect(Tok::Ident);
                std::smatch m;
                if (!std::regex_match(t.text, m, kTransposeSlot)) fail(t, "expected t<slot> or -1");
                w->kind = Expr::Kind::Transpose;
                w->slots = {std::stoi(m[1].str())};
            }
            expect(Tok::RBrace);
            e = w;
        }
        return e;
    }

    static std::vector<int> digits(const std::string& s) {
        std::vector<int> r;
        for (char ch : s) r.push_back(ch - '0');
        return r;
    }

    ExprPtr primary() {
        const Token& t = peek();
        auto e = std::make_shared<Expr>();
        e->line = t.line;
        e->column = t.column;
        if (t.kind == Tok::Int) {
            if (t.text != "1") fail(t, "only the identity 1 may appear as a number");
            next();
            e->kind = Expr::Kind::One;
            return e;
        }
        if (t.kind == Tok::LParen) {
            if (peek(1).kind == Tok::Ident && is_multiplicative(peek(1).text) && peek(2).kind != Tok::LParen) {
                return prefactor(e);
            }
            next();
            ExprPtr inner = expr();
            expect(Tok::RParen);
            return inner;
        }
        if (t.kind != Tok::Ident) fail(t, "expected an expression");
        const std::string word = next().text;
        if (word == "inv") {
            expect(Tok::LParen);
            e->kind = Expr::Kind::Inverse;
            e->kids = {expr()};
            expect(Tok::RParen);
            return e;
        }
        if (word == "odot_LR" || word == "odot_RL") {
            e->kind = Expr::Kind::Odot;
            e->mode = word == "odot_LR" ? OdotMode::LR : OdotMode::RL;
            expect(Tok::LParen);
            ExprPtr a = expr();
            expect(Tok::Comma);
            ExprPtr b = expr();
            expect(Tok::Comma);
            e->left = slot_list();
            expect(Tok::Comma);
            e->right = slot_list();
            expect(Tok::RParen);
            e->kids = {a, b};
            return e;
        }
        std::smatch m;
        if (!std::regex_match(word, m, kAtom)) {
            if (is_spectral(word) || is_capped(word) || is_multiplicative(word)) {
                fail(t, "variable '" + word + "' cannot stand alone as an operator");
            }
            fail(t, "unknown atom '" + word + "'");
        }
        const std::string head = m[1].str();
        std::vector<int> slots = digits(m[2].str());
        auto arity = [&](std::size_t want, std::vector<int> fallback) {
            if (slots.empty()) slots = std::move(fallback);
            if (slots.size() != want) {
                fail(t, "'" + head + "' takes " + std::to_string(want) + " slot" + (want == 1 ? "" : "s") + ", got " +
                            std::to_string(slots.size()));
            }
            if (want == 2 && slots[0] == slots[1]) fail(t, "'" + word + "' repeats a slot");
        };
        if (head == "R" || head == "Rhat") {
            arity(2, {1, 2});
            e->kind = Expr::Kind::RHat;
            expect(Tok::LParen);
            e->additive = linear_form();
            expect(Tok::RParen);
        } else if (head == "Rt" || head == "Rtilde") {
            arity(2, {1, 2});
            e->kind = Expr::Kind::RTilde;
            expect(Tok::LParen);
            e->multiplicative = mult_form();
            expect(Tok::RParen);
        } else if (head == "M" || head == "Minv") {
            arity(1, {1});
            e->kind = head == "M" ? Expr::Kind::M : Expr::Kind::MInv;
        } else if (head == "P") {
            arity(2, {1, 2});
            e->kind = Expr::Kind::P;
        } else {
            arity(1, {1});
            e->kind = head == "conjM" ? Expr::Kind::ConjM : Expr::Kind::ConjMInv;
            expect(Tok::LParen);
            e->kids = {expr()};
            expect(Tok::RParen);
        }
        e->slots = std::move(slots);
        return e;
    }

    std::vector<int> slot_list() {
        expect(Tok::LBrace);
        std::vector<int> r;
        do {
            const Token& t = peek();
            const int s = integer();
            if (s < 1) fail(t, "slots are numbered from 1");
            if (std::find(r.begin(), r.end(), s) != r.end()) fail(t, "repeated slot");
            r.push_back(s);
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
        return r;
    }

    ExprPtr prefactor(const std::shared_ptr<Expr>& e) {
        e->kind = Expr::Kind::Prefactor;
        expect(Tok::LParen);
        e->prefactor_left = mono_form();
        expect(Tok::Minus);
        e->prefactor_right = mono_form();
        expect(Tok::RParen);
        e->power = 1;
        const bool postfix_follows = peek(1).kind == Tok::LBrace && peek(2).kind == Tok::Ident;
        if (!postfix_follows && accept(Tok::Caret)) {
            if (accept(Tok::LBrace)) {
                e->power = signed_integer();
                expect(Tok::RBrace);
            } else {
                e->power = signed_integer();
            }
        }
        return e;
    }

    // Products of multiplicative names only.
    MultForm mono_form() {
        MultForm f = mult_form();
        for (const auto& fac : f.factors) {
            if (fac.name.empty()) fail(peek(), "prefactor terms take no exp(...) factors");
        }
        return f;
    }

    MultForm mult_form() {
        MultForm f;
        bool divide = false;
        for (;;) {
            const Token& t = peek();
            if (t.kind == Tok::Int && t.text == "1" && f.factors.empty() && peek(1).kind == Tok::Slash) {
                next();
                next();
                divide = true;
            }
            const Token& nt = expect(Tok::Ident);
            MultFactor fac;
            if (nt.text == "exp") {
                if (divide) fail(nt, "write exp(-...) instead of dividing by exp(...)");
                expect(Tok::LParen);
                fac.name.clear();
                fac.exponent = linear_form(true);
                expect(Tok::RParen);
            } else {
                if (!is_multiplicative(nt.text)) {
                    fail(nt, "undeclared multiplicative variable '" + nt.text + "'");
                }
                fac.name = nt.text;
                if (accept(Tok::Caret)) {
                    if (accept(Tok::LBrace)) {
                        fac.power = signed_integer();
                        expect(Tok::RBrace);
                    } else {
                        fac.power = signed_integer();
                    }
                    if (fac.power == 0) fail(nt, "zero power");
                }
                if (divide) fac.power = -fac.power;
            }
            f.factors.push_back(std::move(fac));
            if (accept(Tok::Star)) {
                divide = false;
            } else if (accept(Tok::Slash)) {
                divide = true;
            } else {
                break;
            }
        }
        return f;
    }

    LinearForm linear_form(bool in_exp = false) {
        LinearForm f;
        bool negative = accept(Tok::Minus);
        if (!negative) accept(Tok::Plus);
        for (;;) {
            LinearTerm term = linear_term(in_exp);
            if (negative) term.coeff = -term.coeff;
            f.terms.push_back(std::move(term));
            if (accept(Tok::Plus)) {
                negative = false;
            } else if (accept(Tok::Minus)) {
                negative = true;
            } else {
                break;
            }
        }
        return f;
    }

    LinearTerm linear_term(bool in_exp) {
        const Token& start = peek();
        LinearTerm term;
        bool have_var = false;
        for (bool first = true;; first = false) {
            if (!first) {
                if (accept(Tok::Slash)) {
                    const Token& dt = peek();
                    const int d = integer();
                    if (d == 0) fail(dt, "division by zero");
                    term.coeff /= d;
                    if (!continues_term()) break;
                    continue;
                }
                // Juxtaposition multiplies, as in "κh".
                accept(Tok::Star);
            }
            const Token& it = peek();
            if (it.kind == Tok::Int) {
                term.coeff *= integer();
            } else if (it.kind == Tok::Ident) {
                const std::string w = next().text;
                if (w == "kappa" || w == "c") {
                    if (term.symbol != LinearTerm::Symbol::None) fail(it, "at most one of kappa, c per term");
                    term.symbol = w == "kappa" ? LinearTerm::Symbol::Kappa : LinearTerm::Symbol::Level;
                } else if (is_spectral(w) || is_capped(w)) {
                    if (have_var) fail(it, "a term takes exactly one variable");
                    have_var = true;
                    term.var = w;
                } else if (is_multiplicative(w) && in_exp) {
                    fail(it, "multiplicative variable '" + w + "' inside exp(...)");
                } else {
                    fail(it, "undeclared variable '" + w + "'");
                }
            } else {
                fail(it, "expected a term");
            }
            if (!continues_term()) break;
        }
        term.coeff.canonicalize();
        if (!have_var) fail(start, "term without a variable");
        if (term.symbol != LinearTerm::Symbol::None && term.var != "h") fail(start, "kappa and c multiply only h");
        return term;
    }

    bool continues_term() const {
        const Tok k = peek().kind;
        return k == Tok::Star || k == Tok::Slash || k == Tok::Ident || k == Tok::Int;
    }

    static void max_slot(const Expr& e, int& m) {
        for (int s : e.slots) m = std::max(m, s);
        for (int s : e.left) m = std::max(m, s);
        for (int s : e.right) m = std::max(m, s);
        for (const auto& k : e.kids) max_slot(*k, m);
    }

    static void check_odot(const Expr& e, int m) {
        if (e.kind == Expr::Kind::Odot) {
            std::set<int> all(e.left.begin(), e.left.end());
            for (int s : e.right) {
                if (!all.insert(s).second) {
                    throw ParseError(e.line, e.column, "odot slot groups overlap at slot " + std::to_string(s));
                }
            }
            if (static_cast<int>(all.size()) != m) {
                throw ParseError(e.line, e.column,
                                 "odot slot groups must cover all " + std::to_string(m) + " slots");
            }
        }
        for (const auto& k : e.kids) check_odot(*k, m);
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::set<std::string> names_;
    const Declarations* decls_ = nullptr;
};

}  // namespace

IdentityScript parse_script(const std::string& text) { return Parser(text).script(); }

}  // namespace hqva::dsl
