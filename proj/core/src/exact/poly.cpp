#include "hqva/exact/poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace hqva {

Rational parse_rational(const std::string& text) {
    Rational q;
    if (q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational: " + text);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

Poly::Poly(const Rational& c) {
    if (c != 0) terms_.push_back({Mono{}, c});
}

Poly Poly::monomial(const Mono& m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_.push_back({m, c});
    return p;
}

Poly Poly::binomial(const Mono& m) {
    return from_terms({{Mono{}, 1}, {m, -1}});
}

Poly Poly::binomial_power(const Mono& m, int k) {
    std::vector<Term> t;
    mpz_class b = 1;
    Mono p;
    for (int j = 0; j <= k; ++j) {
        t.push_back({p, Rational((j % 2 == 0) ? b : mpz_class(-b))});
        b = b * (k - j) / (j + 1);
        p = p * m;
    }
    return from_terms(std::move(t));
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.mono < b.mono; });
    Poly p;
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
            p.terms_.back().coeff += t.coeff;
        } else {
            if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
            p.terms_.push_back(std::move(t));
        }
    }
    if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one());
}

Rational Poly::constant_term() const {
    for (const auto& t : terms_) {
        if (t.mono.is_one()) return t.coeff;
    }
    return 0;
}

Poly Poly::operator+(const Poly& o) const {
    Poly r;
    r.terms_.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin();
    auto b = o.terms_.begin();
    while (a != terms_.end() && b != o.terms_.end()) {
        if (a->mono < b->mono) {
            r.terms_.push_back(*a++);
        } else if (b->mono < a->mono) {
            r.terms_.push_back(*b++);
        } else {
            Rational c = a->coeff + b->coeff;
            if (c != 0) r.terms_.push_back({a->mono, std::move(c)});
            ++a;
            ++b;
        }
    }
    r.terms_.insert(r.terms_.end(), a, terms_.end());
    r.terms_.insert(r.terms_.end(), b, o.terms_.end());
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly& Poly::operator+=(const Poly& o) {
    *this = *this + o;
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    *this = *this - o;
    return *this;
}

Poly Poly::operator*(const Poly& o) const {
    if (terms_.empty() || o.terms_.empty()) return {};
    if (o.terms_.size() == 1) {
        Poly r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back({t.mono * o.terms_[0].mono, t.coeff * o.terms_[0].coeff});
        return r;
    }
    if (terms_.size() == 1) return o * *this;
    std::vector<Term> prod;
    prod.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) prod.push_back({a.mono * b.mono, a.coeff * b.coeff});
    }
    return from_terms(std::move(prod));
}

Poly Poly::scaled(const Rational& c) const {
    if (c == 0) return {};
    Poly r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
}

Poly Poly::times_mono(const Mono& m) const {
    Poly r = *this;
    for (auto& t : r.terms_) t.mono = t.mono * m;
    return r;
}

std::optional<Poly> Poly::divide_binomial(const Mono& m) const {
    if (m.is_one()) throw std::domain_error("division by 1 - 1");
    if (terms_.empty()) return Poly{};
    // Monomials e and e + t*a lie in the same class; within a class the
    // polynomial is univariate in m, and divisibility by 1 - m means the
    // coefficients sum to zero. The quotient coefficients are prefix sums.
    const int lead = m.leading_var();
    const int a = m.get(lead);
    if (a < 0) {
        // 1 - m = -m (1 - m^{-1})
        auto q = divide_binomial(m.inverse());
        if (!q) return std::nullopt;
        return q->times_mono(m.inverse()).scaled(-1);
    }
    struct Keyed {
        Mono rep;
        long t;
        const Rational* c;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(terms_.size());
    for (const auto& term : terms_) {
        const int e = term.mono.get(lead);
        const long t = (e >= 0) ? e / a : -((-e + a - 1) / a);
        Mono rep = term.mono * m.pow(static_cast<int>(-t));
        keyed.push_back({rep, t, &term.coeff});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& x, const Keyed& y) {
        if (x.rep != y.rep) return x.rep < y.rep;
        return x.t < y.t;
    });
    std::vector<Term> out;
    std::size_t i = 0;
    while (i < keyed.size()) {
        std::size_t j = i;
        while (j < keyed.size() && keyed[j].rep == keyed[i].rep) ++j;
        Rational run = 0;
        for (std::size_t k = i; k < j; ++k) {
            run += *keyed[k].c;
            const long next_t = (k + 1 < j) ? keyed[k + 1].t : keyed[k].t + 1;
            if (run != 0) {
                for (long t = keyed[k].t; t < next_t; ++t) {
                    out.push_back({keyed[i].rep * m.pow(static_cast<int>(t)), run});
                }
            }
        }
        if (run != 0) return std::nullopt;
        i = j;
    }
    return from_terms(std::move(out));
}

Poly Poly::theta(int var) const {
    Poly r;
    for (const auto& t : terms_) {
        const int e = t.mono.get(var);
        if (e != 0) r.terms_.push_back({t.mono, t.coeff * e});
    }
    return r;
}

Poly Poly::substitute(const std::vector<std::pair<int, Mono>>& map) const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        Mono base = t.mono;
        Mono image;
        for (const auto& [var, m] : map) {
            const int e = base.get(var);
            if (e != 0) image = image * m.pow(e);
        }
        for (const auto& [var, m] : map) base.set(var, 0);
        out.push_back({base * image, t.coeff});
    }
    return from_terms(std::move(out));
}

std::pair<int, int> Poly::degree_range(int var) const {
    if (terms_.empty()) return {0, 0};
    int lo = terms_[0].mono.get(var);
    int hi = lo;
    for (const auto& t : terms_) {
        lo = std::min(lo, t.mono.get(var));
        hi = std::max(hi, t.mono.get(var));
    }
    return {lo, hi};
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coeff != b.terms_[i].coeff) return false;
    }
    return true;
}

bool operator<(const Poly& a, const Poly& b) {
    const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.terms_[i].mono != b.terms_[i].mono) return a.terms_[i].mono < b.terms_[i].mono;
        if (a.terms_[i].coeff != b.terms_[i].coeff) return a.terms_[i].coeff < b.terms_[i].coeff;
    }
    return a.terms_.size() < b.terms_.size();
}

}  // namespace hqva
