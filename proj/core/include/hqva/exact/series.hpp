#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hqva/exact/ratfunc.hpp"

namespace hqva {

// Capped formal variable: only degrees 0 .. cap-1 are kept.
struct Cap {
    int var;
    int cap;
    friend bool operator==(const Cap& a, const Cap& b) { return a.var == b.var && a.cap == b.cap; }
};

using CapList = std::vector<Cap>;

// Index 0 of the capped variables is h.
constexpr int kH = 0;

// Caps of two operands combined: union of variables, minimum where both cap.
CapList merge_caps(const CapList& a, const CapList& b);

// Truncated power series in capped formal variables with RatFunc
// coefficients, stored densely over the box of kept degrees. A variable
// without a cap does not occur and is known exactly (degree 0 only).
class Series {
public:
    Series() = default;
    Series(const RatFunc& c) : coeffs_{c} {}  // NOLINT(google-explicit-constructor)
    Series(const Rational& c) : coeffs_{RatFunc(c)} {}  // NOLINT(google-explicit-constructor)
    Series(int c) : coeffs_{RatFunc(c)} {}  // NOLINT(google-explicit-constructor)

    static Series zero(const CapList& caps);
    static Series constant(const RatFunc& c, const CapList& caps);
    static Series variable(int var, const CapList& caps);
    // exp(sum coeff * var) truncated at the caps; every var needs a cap.
    static Series exp_linear(const std::vector<std::pair<int, Rational>>& form, const CapList& caps);

    const CapList& caps() const { return caps_; }
    int cap_of(int var) const;  // -1 when the variable is uncapped
    std::size_t box_size() const { return coeffs_.size(); }
    const std::vector<RatFunc>& raw() const { return coeffs_; }

    bool is_zero() const;
    // Coefficient at the origin of the box (h^0 u^0 ...).
    const RatFunc& leading() const;
    // Coefficient of prod var^deg; throws std::out_of_range beyond a cap.
    RatFunc coeff(const std::vector<std::pair<int, int>>& degrees) const;
    // Coefficient of h^k as a series in the remaining capped variables.
    Series h_coeff(int k) const;

    // Truncates (or extends with exact zero degrees) to the given caps.
    Series conform(const CapList& caps) const;

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator-() const;
    Series operator*(const Series& o) const;
    Series& operator+=(const Series& o);
    Series& operator-=(const Series& o);
    Series& operator*=(const Series& o);
    Series scaled(const RatFunc& c) const;
    Series scaled(const Rational& c) const;

    // Multiplicative inverse by Neumann recursion around leading().
    Series inverse() const;
    // log(self) for a series whose leading coefficient is 1.
    Series log1p_part() const;

    // Substitutes the exponential variable var by factor, whose leading
    // coefficient must be a monic monomial; re-expands in the capped
    // variables through Z d/dZ derivatives.
    Series subst_mult(int var, const Series& factor) const;
    Series substitute(const std::vector<std::pair<int, Mono>>& map) const;
    Series theta(int var) const;
    // d/dvar for a capped variable; the cap drops by one.
    Series derivative(int capped_var) const;
    Series times_mono(const Mono& m) const;

    template <class F>
    Series map(F&& f) const {
        Series r = *this;
        for (auto& c : r.coeffs_) {
            if (!c.is_zero()) c = f(c);
        }
        return r;
    }

    // Number of multi-degrees at which the coefficient is nonzero.
    std::size_t nonzero_count() const;
    // Degrees (per cap, in cap order) of each coefficient slot.
    std::vector<int> degrees_of(std::size_t flat) const;

    std::string to_string(const VarNames& names = VarNames::defaults()) const;

    friend bool operator==(const Series& a, const Series& b);
    friend bool operator!=(const Series& a, const Series& b) { return !(a == b); }

private:
    Series(CapList caps, std::vector<RatFunc> coeffs) : caps_(std::move(caps)), coeffs_(std::move(coeffs)) {}
    static std::size_t box(const CapList& caps);
    int total_degree_bound() const;

    CapList caps_;
    std::vector<RatFunc> coeffs_{RatFunc()};
};

}  // namespace hqva
