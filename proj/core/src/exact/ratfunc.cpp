#include "hqva/exact/ratfunc.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hqva {

namespace {

bool oriented(const Mono& m) { return Mono{} < m; }

// Largest g such that m is a g-th power.
int power_gcd(const Mono& m) {
    int g = 0;
    for (int i = 0; i < Mono::kMaxVars; ++i) g = std::gcd(g, std::abs(m.get(i)));
    return g;
}

Mono root(const Mono& m, int g) {
    Mono r;
    for (int i = 0; i < Mono::kMaxVars; ++i) r.set(i, m.get(i) / g);
    return r;
}

using DenMap = std::map<Mono, int>;

DenMap to_map(const std::vector<DenFactor>& den) {
    DenMap m;
    for (const auto& f : den) m[f.base] += f.power;
    return m;
}

}  // namespace

RatFunc RatFunc::fraction(Poly num, const std::vector<DenFactor>& den) {
    DenMap merged;
    for (const auto& f : den) {
        if (f.base.is_one()) throw std::domain_error("zero denominator factor (1 - 1)");
        if (f.power == 0) continue;
        Mono base = f.base;
        if (!oriented(base)) {
            // (1 - m)^{-p} = (-1)^p m^{-p} (1 - m^{-1})^{-p}
            num = num.times_mono(base.pow(-f.power));
            if (f.power % 2 != 0) num = -num;
            base = base.inverse();
        }
        merged[base] += f.power;
    }
    RatFunc r;
    for (const auto& [base, power] : merged) {
        if (power < 0) {
            num = num * Poly::binomial_power(base, -power);
        } else if (power > 0) {
            r.den_.push_back({base, power});
        }
    }
    r.num_ = std::move(num);
    r.reduce();
    return r;
}

RatFunc RatFunc::monomial(const Mono& m, const Rational& c) { return RatFunc(Poly::monomial(m, c)); }

RatFunc RatFunc::inv_binomial(const Mono& m, int power) { return fraction(Poly(1), {{m, power}}); }

void RatFunc::reduce() {
    if (num_.is_zero()) {
        den_.clear();
        return;
    }
    std::vector<DenFactor> kept;
    for (auto& f : den_) {
        while (f.power > 0) {
            auto q = num_.divide_binomial(f.base);
            if (!q) break;
            num_ = std::move(*q);
            --f.power;
        }
        if (f.power > 0) kept.push_back(f);
    }
    den_ = std::move(kept);
}

Poly RatFunc::denominator_poly() const {
    Poly d(1);
    for (const auto& f : den_) d = d * Poly::binomial_power(f.base, f.power);
    return d;
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    bool same = den_.size() == o.den_.size();
    for (std::size_t i = 0; same && i < den_.size(); ++i) {
        same = den_[i].base == o.den_[i].base && den_[i].power == o.den_[i].power;
    }
    RatFunc r;
    if (same) {
        r.num_ = num_ + o.num_;
        r.den_ = den_;
    } else {
        DenMap a = to_map(den_);
        DenMap b = to_map(o.den_);
        DenMap lcm = a;
        for (const auto& [base, p] : b) lcm[base] = std::max(lcm[base], p);
        Poly na = num_;
        Poly nb = o.num_;
        for (const auto& [base, p] : lcm) {
            auto ia = a.find(base);
            const int pa = ia == a.end() ? 0 : ia->second;
            auto ib = b.find(base);
            const int pb = ib == b.end() ? 0 : ib->second;
            if (p > pa) na = na * Poly::binomial_power(base, p - pa);
            if (p > pb) nb = nb * Poly::binomial_power(base, p - pb);
            r.den_.push_back({base, p});
        }
        r.num_ = na + nb;
    }
    r.reduce();
    return r;
}

RatFunc RatFunc::operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator*(const RatFunc& o) const {
    if (is_zero() || o.is_zero()) return {};
    RatFunc r;
    r.num_ = num_ * o.num_;
    if (o.den_.empty()) {
        r.den_ = den_;
        if (!r.den_.empty() && o.num_.is_monomial()) return r;
    } else if (den_.empty()) {
        r.den_ = o.den_;
        if (num_.is_monomial()) return r;
    } else {
        DenMap m = to_map(den_);
        for (const auto& f : o.den_) m[f.base] += f.power;
        for (const auto& [base, p] : m) r.den_.push_back({base, p});
    }
    r.reduce();
    return r;
}

RatFunc& RatFunc::operator+=(const RatFunc& o) { return *this = *this + o; }
RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this = *this - o; }
RatFunc& RatFunc::operator*=(const RatFunc& o) { return *this = *this * o; }

RatFunc RatFunc::scaled(const Rational& c) const {
    if (c == 0) return {};
    RatFunc r = *this;
    r.num_ = r.num_.scaled(c);
    return r;
}

RatFunc RatFunc::times_mono(const Mono& m) const {
    RatFunc r = *this;
    r.num_ = r.num_.times_mono(m);
    return r;
}

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero rational function");
    // Split the numerator into unit * prod (1 - m) by trial division with
    // candidate bases taken from ratios of its terms.
    Poly rest = num_;
    std::vector<DenFactor> factors;
    while (!rest.is_monomial()) {
        const auto& terms = rest.terms();
        bool found = false;
        for (std::size_t j = 1; j < terms.size() && !found; ++j) {
            Mono ratio = terms[j].mono * terms[0].mono.inverse();
            if (!oriented(ratio)) ratio = ratio.inverse();
            const int g = power_gcd(ratio);
            std::vector<Mono> candidates{ratio};
            for (int d = g - 1; d >= 1; --d) {
                if (g % d == 0) candidates.push_back(root(ratio, g / d));
            }
            for (const auto& c : candidates) {
                if (auto q = rest.divide_binomial(c)) {
                    rest = std::move(*q);
                    factors.push_back({c, 1});
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            throw std::invalid_argument("cannot invert rational function with numerator " +
                                        poly_to_string(num_, VarNames::defaults()));
        }
    }
    const Term& unit = rest.terms()[0];
    Poly num = denominator_poly().times_mono(unit.mono.inverse()).scaled(1 / unit.coeff);
    return fraction(std::move(num), factors);
}

RatFunc RatFunc::operator/(const RatFunc& o) const {
    if (o.is_zero()) throw std::domain_error("division by zero rational function");
    if (is_zero()) return {};
    return *this * o.inverse();
}

RatFunc RatFunc::theta(int var) const {
    RatFunc r(num_.theta(var));
    r.den_ = den_;
    r.reduce();
    for (std::size_t k = 0; k < den_.size(); ++k) {
        const int a = den_[k].base.get(var);
        if (a == 0) continue;
        // theta (1 - m)^{-p} = p a m (1 - m)^{-p-1}
        std::vector<DenFactor> den = den_;
        den[k].power += 1;
        r += fraction(num_.times_mono(den_[k].base).scaled(Rational(a) * den_[k].power), den);
    }
    return r;
}

RatFunc RatFunc::substitute(const std::vector<std::pair<int, Mono>>& map) const {
    Poly num = num_.substitute(map);
    std::vector<DenFactor> den;
    den.reserve(den_.size());
    for (const auto& f : den_) {
        Poly b = Poly::monomial(f.base).substitute(map);
        const Mono& image = b.terms()[0].mono;
        if (image.is_one()) throw std::domain_error("substitution makes a denominator vanish");
        den.push_back({image, f.power});
    }
    return fraction(std::move(num), den);
}

bool RatFunc::depends_on(int var) const {
    for (const auto& t : num_.terms()) {
        if (t.mono.get(var) != 0) return true;
    }
    for (const auto& f : den_) {
        if (f.base.get(var) != 0) return true;
    }
    return false;
}

bool operator==(const RatFunc& a, const RatFunc& b) { return (a - b).is_zero(); }

std::string mono_to_string(const Mono& m, const VarNames& names) {
    std::string s;
    for (int i = 0; i < Mono::kMaxVars; ++i) {
        const int e = m.get(i);
        if (e == 0) continue;
        if (!s.empty()) s += "*";
        s += names.exp_name(i);
        if (e != 1) s += "^" + std::to_string(e);
    }
    return s.empty() ? "1" : s;
}

std::string poly_to_string(const Poly& p, const VarNames& names) {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : p.terms()) {
        Rational c = t.coeff;
        if (first) {
            if (c < 0) {
                s += "-";
                c = -c;
            }
        } else {
            s += c < 0 ? " - " : " + ";
            if (c < 0) c = -c;
        }
        first = false;
        if (t.mono.is_one()) {
            s += c.get_str();
        } else {
            if (c != 1) s += c.get_str() + "*";
            s += mono_to_string(t.mono, names);
        }
    }
    return s;
}

std::string RatFunc::to_string(const VarNames& names) const {
    if (den_.empty()) return poly_to_string(num_, names);
    std::string s = "(" + poly_to_string(num_, names) + ")/(";
    for (std::size_t i = 0; i < den_.size(); ++i) {
        if (i > 0) s += "*";
        s += "(1 - " + mono_to_string(den_[i].base, names) + ")";
        if (den_[i].power != 1) s += "^" + std::to_string(den_[i].power);
    }
    return s + ")";
}

}  // namespace hqva
