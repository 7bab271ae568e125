#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hqva/exact/mono.hpp"

namespace hqva {

using Rational = mpq_class;

Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

struct Term {
    Mono mono;
    Rational coeff;
};

// Sparse Laurent polynomial over Q. Terms are kept sorted by monomial with
// nonzero coefficients.
class Poly {
public:
    Poly() = default;
    explicit Poly(const Rational& c);
    static Poly monomial(const Mono& m, const Rational& c = 1);
    // 1 - m
    static Poly binomial(const Mono& m);
    // (1 - m)^k
    static Poly binomial_power(const Mono& m, int k);
    // Builds from unsorted terms, combining duplicates.
    static Poly from_terms(std::vector<Term> terms);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_monomial() const { return terms_.size() == 1; }
    Rational constant_term() const;
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly scaled(const Rational& c) const;
    Poly times_mono(const Mono& m) const;

    // Exact quotient by (1 - m), or nullopt if not divisible.
    std::optional<Poly> divide_binomial(const Mono& m) const;

    // Euler operator Z_var d/dZ_var.
    Poly theta(int var) const;
    // Simultaneously replaces each listed variable by a monomial.
    Poly substitute(const std::vector<std::pair<int, Mono>>& map) const;
    Poly subst_var(int var, const Mono& m) const { return substitute({{var, m}}); }

    // Minimum and maximum exponent of a variable over all terms (0,0 if zero).
    std::pair<int, int> degree_range(int var) const;

    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    friend bool operator<(const Poly& a, const Poly& b);

private:
    std::vector<Term> terms_;
};

}  // namespace hqva
