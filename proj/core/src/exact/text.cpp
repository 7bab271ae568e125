#include "hqva/exact/text.hpp"

#include <cctype>
#include <stdexcept>

namespace hqva {

namespace {

class Scanner {
public:
    Scanner(const std::string& text, const VarNames& names) : s_(text), names_(names) {}

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip();
        return pos_ >= s_.size();
    }
    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument(what + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
    }

    int integer() {
        skip();
        std::size_t start = pos_;
        if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start || (pos_ == start + 1 && s_[start] == '-')) fail("expected integer");
        return std::stoi(s_.substr(start, pos_ - start));
    }

    Rational rational() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
        if (pos_ == start) fail("expected number");
        return parse_rational(s_.substr(start, pos_ - start));
    }

    std::string name() {
        skip();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (pos_ == start) fail("expected name");
        return s_.substr(start, pos_ - start);
    }

    bool starts_number() {
        const char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    }

    Mono mono() {
        Mono m;
        if (starts_number()) {
            if (rational() != 1) fail("expected monomial");
            return m;
        }
        do {
            const std::string n = name();
            const int var = names_.find_exp(n);
            if (var < 0) fail("unknown variable " + n);
            int e = 1;
            if (accept('^')) e = integer();
            m = m * Mono::var(var, e);
        } while (accept('*'));
        return m;
    }

    Term term() {
        Rational c = 1;
        if (starts_number()) {
            c = rational();
            if (!accept('*')) return {Mono{}, c};
        }
        return {mono(), c};
    }

    Poly poly() {
        std::vector<Term> terms;
        bool negative = accept('-');
        for (;;) {
            Term t = term();
            if (negative) t.coeff = -t.coeff;
            terms.push_back(std::move(t));
            if (accept('+')) {
                negative = false;
            } else if (accept('-')) {
                negative = true;
            } else {
                break;
            }
        }
        if (terms.size() == 1 && terms[0].coeff == 0) return {};
        return Poly::from_terms(std::move(terms));
    }

    RatFunc ratfunc() {
        if (peek() != '(') return RatFunc(poly());
        expect('(');
        Poly num = poly();
        expect(')');
        expect('/');
        expect('(');
        std::vector<DenFactor> den;
        do {
            expect('(');
            if (rational() != 1) fail("expected 1");
            expect('-');
            Mono base = mono();
            expect(')');
            int p = 1;
            if (accept('^')) p = integer();
            den.push_back({base, p});
        } while (accept('*'));
        expect(')');
        return RatFunc::fraction(std::move(num), den);
    }

    Series series() {
        expect('{');
        CapList caps;
        if (peek() != '|') {
            do {
                const std::string n = name();
                const int var = names_.find_capped(n);
                if (var < 0) fail("unknown capped variable " + n);
                expect('<');
                caps.push_back({var, integer()});
            } while (accept(','));
        }
        expect('|');
        Series r = Series::zero(caps);
        if (accept('}')) return r;
        do {
            expect('[');
            std::vector<std::pair<int, int>> deg;
            for (std::size_t k = 0; k < caps.size(); ++k) {
                if (k > 0) expect(',');
                deg.emplace_back(caps[k].var, integer());
            }
            expect(']');
            RatFunc c = ratfunc();
            Series mono_series = Series::constant(c, caps);
            for (const auto& [var, d] : deg) {
                for (int i = 0; i < d; ++i) mono_series = mono_series * Series::variable(var, caps);
            }
            r += mono_series;
        } while (accept(';'));
        expect('}');
        return r;
    }

private:
    const std::string& s_;
    const VarNames& names_;
    std::size_t pos_ = 0;
};

template <class T, class F>
T parse_all(const std::string& text, const VarNames& names, F f) {
    Scanner sc(text, names);
    T r = f(sc);
    if (!sc.at_end()) sc.fail("trailing input");
    return r;
}

}  // namespace

Poly parse_poly(const std::string& text, const VarNames& names) {
    return parse_all<Poly>(text, names, [](Scanner& s) { return s.poly(); });
}

RatFunc parse_ratfunc(const std::string& text, const VarNames& names) {
    return parse_all<RatFunc>(text, names, [](Scanner& s) { return s.ratfunc(); });
}

Series parse_series(const std::string& text, const VarNames& names) {
    return parse_all<Series>(text, names, [](Scanner& s) { return s.series(); });
}

}  // namespace hqva
