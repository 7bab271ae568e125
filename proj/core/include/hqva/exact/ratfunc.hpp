#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hqva/exact/names.hpp"
#include "hqva/exact/poly.hpp"

namespace hqva {

// One denominator factor (1 - base)^power. The base is oriented so that its
// first nonzero exponent is positive.
struct DenFactor {
    Mono base;
    int power;
};

// Rational function whose denominator is a product of binomials (1 - m).
// Every denominator met in exponential coordinates has this shape, so
// reduction is trial division by the listed binomials. With primitive bases
// the reduced form is unique; equality never depends on it, since a == b is
// decided by (a - b).numerator() == 0.
class RatFunc {
public:
    RatFunc() = default;
    RatFunc(const Rational& c) : num_(c) {}  // NOLINT(google-explicit-constructor)
    RatFunc(int c) : num_(Rational(c)) {}    // NOLINT(google-explicit-constructor)
    explicit RatFunc(Poly p) : num_(std::move(p)) {}

    // num / prod (1 - base)^power; bases need not be oriented.
    static RatFunc fraction(Poly num, const std::vector<DenFactor>& den);
    static RatFunc monomial(const Mono& m, const Rational& c = 1);
    // 1 / (1 - m)^power
    static RatFunc inv_binomial(const Mono& m, int power = 1);

    const Poly& numerator() const { return num_; }
    const std::vector<DenFactor>& denominator() const { return den_; }
    Poly denominator_poly() const;

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.empty(); }
    bool is_constant() const { return den_.empty() && num_.is_constant(); }
    Rational constant_value() const { return num_.constant_term(); }

    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator-() const;
    RatFunc operator*(const RatFunc& o) const;
    // Throws std::domain_error on a zero divisor, and std::invalid_argument
    // when the divisor's numerator is not a unit times binomials.
    RatFunc operator/(const RatFunc& o) const;
    RatFunc& operator+=(const RatFunc& o);
    RatFunc& operator-=(const RatFunc& o);
    RatFunc& operator*=(const RatFunc& o);
    RatFunc scaled(const Rational& c) const;
    RatFunc times_mono(const Mono& m) const;
    RatFunc inverse() const;

    // Z_var d/dZ_var
    RatFunc theta(int var) const;
    // Simultaneous monomial substitution. Throws std::domain_error if a
    // denominator factor becomes 1 - 1.
    RatFunc substitute(const std::vector<std::pair<int, Mono>>& map) const;

    // Whether the numerator or any denominator factor involves the variable.
    bool depends_on(int var) const;

    std::string to_string(const VarNames& names = VarNames::defaults()) const;

    friend bool operator==(const RatFunc& a, const RatFunc& b);
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

private:
    void reduce();

    Poly num_;
    std::vector<DenFactor> den_;
};

// Writes "Z0^2*Z1^-1" style monomials; the unit monomial prints as "1".
std::string mono_to_string(const Mono& m, const VarNames& names);
std::string poly_to_string(const Poly& p, const VarNames& names);

}  // namespace hqva
